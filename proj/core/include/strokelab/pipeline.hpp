#pragma once

#include "strokelab/eval.hpp"
#include "strokelab/ingest.hpp"
#include "strokelab/preprocess.hpp"
#include "strokelab/segment.hpp"
#include "strokelab/svm.hpp"
#include "strokelab/synth.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace strokelab::pipeline {

enum class Task { Skill, Phase };
enum class FeatureMode { Frames, Aggregates };
enum class PhaseLabels { Auto, Truth, Detector };

std::string_view to_string(Task t);
std::string_view to_string(FeatureMode m);
std::string_view to_string(PhaseLabels l);
Task parse_task(std::string_view s);
FeatureMode parse_feature_mode(std::string_view s);
PhaseLabels parse_phase_labels(std::string_view s);

/// Mixes a base seed with stream tags into an independent 64-bit seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

struct Dataset {
  std::vector<ingest::Recording> recordings;
  std::optional<std::vector<synth::SwingTruth>> truth;
  std::vector<std::string> warnings;
};

/// Accepts a dataset directory (manifest.json plus optional truth.json) or a
/// path to the manifest itself.
Dataset load_dataset_dir(const std::filesystem::path& path, const ingest::LoadOptions& options = {});

struct FeatureParams {
  segment::SwingParams swing;
  std::size_t min_seg_len = 3;
  FeatureMode mode = FeatureMode::Frames;
  PhaseLabels phase_labels = PhaseLabels::Auto;
  bool segment_on_pca = true;
  double pca_variance = 0.95;
};

/// Rows with labels and the participant each row came from.
struct SampleSet {
  FeatureMatrix x;
  std::vector<int> y;
  std::vector<std::string> group;

  SampleSet subset(const std::vector<std::size_t>& rows) const;
  std::vector<std::size_t> rows_of(const std::vector<std::string>& participants) const;
};

/// Swing frames (or per-swing aggregates) labelled with participant skill.
SampleSet build_skill_samples(const Dataset& data, const FeatureParams& params);

/// Swing frames (or per-phase aggregates) labelled with phase 0..4.
SampleSet build_phase_samples(const Dataset& data, const FeatureParams& params);

/// mean, std, min, max of each column of `x` rows [start, end), in that order.
std::vector<double> aggregate_features(const FeatureMatrix& x, std::size_t start, std::size_t end);

struct SwingSegmentation {
  std::string participant_id;
  ingest::Session session = ingest::Session::Forehand10A;
  std::size_t swing_index = 0;
  segment::SwingWindow window;
  segment::PhaseSegmentation phases;
};

/// Swing extraction followed by five-phase change-point segmentation for every
/// recording. Recordings without a detectable swing are reported in `warnings`.
std::vector<SwingSegmentation> segment_dataset(const Dataset& data, const FeatureParams& params,
                                               std::vector<std::string>* warnings = nullptr);

struct ModelConfig {
  svm::KernelSpec kernel;
  svm::SmoOptions smo;
  std::size_t pca_components = 0;  // 0 = smallest count reaching pca_variance
  double pca_variance = 0.95;
  std::size_t max_train_rows = 1500;  // SVM training rows per model; 0 = no cap
};

struct Preprocessor {
  preprocess::Standardizer standardizer;
  preprocess::PcaModel pca;

  static Preprocessor fit(const FeatureMatrix& x, const ModelConfig& config);
  FeatureMatrix transform(const FeatureMatrix& x) const;
};

struct PipelineBundle {
  Task task = Task::Skill;
  FeatureMode features = FeatureMode::Frames;
  Preprocessor preprocessor;
  std::optional<svm::SvmModel> binary;
  std::optional<svm::MultiClassModel> multiclass;

  /// Per-row decision values: one column for the skill task, one per phase otherwise.
  std::vector<std::vector<double>> scores(const FeatureMatrix& raw) const;
  std::vector<int> predict(const FeatureMatrix& raw) const;
};

/// Deterministic, order-preserving subset of at most `cap` of `n` indices.
std::vector<std::size_t> subsample(std::size_t n, std::size_t cap, std::uint64_t seed);

PipelineBundle train_bundle(const SampleSet& samples, Task task, FeatureMode mode, const ModelConfig& config,
                            std::uint64_t seed);

struct ExperimentConfig {
  std::vector<svm::KernelKind> kernels{svm::KernelKind::Rbf, svm::KernelKind::Poly, svm::KernelKind::Sigmoid};
  svm::KernelKind phase_kernel = svm::KernelKind::Rbf;
  ModelConfig model;
  FeatureParams features;
  std::size_t folds = 5;
  double test_frac = 0.2;
  std::uint64_t seed = 42;
  bool run_skill = true;
  bool run_phase = true;
};

struct KernelReport {
  svm::KernelKind kind = svm::KernelKind::Rbf;
  eval::BinaryMetrics cross_validation;
  eval::BinaryMetrics testing;
  eval::ConfusionMatrix testing_confusion;
  std::vector<eval::BinaryMetrics> fold_metrics;
};

struct PhaseReport {
  svm::KernelKind kernel = svm::KernelKind::Rbf;
  std::vector<std::vector<double>> mean_confusion;  // element-wise mean of fold matrices
  double cross_validation_accuracy = 0.0;
  double testing_accuracy = 0.0;
  eval::ConfusionMatrix testing_confusion;
  std::vector<eval::ClassRoc> roc;  // held-out test set
};

struct EvaluationReport {
  std::vector<KernelReport> skill;
  std::optional<PhaseReport> phase;
  nlohmann::ordered_json config;
  std::uint64_t seed = 0;
  eval::HoldoutSplit split;
  eval::FoldPlan folds;
};

/// Participant holdout, grouped k-fold CV on the training side for each kernel,
/// refit on the full training side, then scoring on the held-out participants.
EvaluationReport run_experiment(const Dataset& data, const ExperimentConfig& config);

nlohmann::ordered_json experiment_config_to_json(const ExperimentConfig& config);

/// Overlays the keys present in `j` (same names as the echoed config) onto `base`.
ExperimentConfig experiment_config_from_json(const nlohmann::json& j, ExperimentConfig base = {});

/// Throws BadConfig (or BadK for the fold count) on out-of-range settings.
void validate(const ExperimentConfig& config);

}  // namespace strokelab::pipeline
