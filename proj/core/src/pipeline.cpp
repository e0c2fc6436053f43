#include "strokelab/pipeline.hpp"

#include "strokelab/error.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <set>

namespace strokelab::pipeline {

namespace {

std::uint64_t mix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

int skill_label(ingest::Skill s) { return static_cast<int>(s); }

void append_row(SampleSet& s, const std::vector<double>& row, int label, const std::string& group) {
  if (s.x.cols == 0) s.x.cols = row.size();
  s.x.values.insert(s.x.values.end(), row.begin(), row.end());
  ++s.x.rows;
  s.y.push_back(label);
  s.group.push_back(group);
}

std::vector<std::string> aggregate_names() {
  std::vector<std::string> names;
  for (const char* stat : {"mean", "std", "min", "max"})
    for (const char* ch : {"yaw", "roll", "pitch"}) names.push_back(std::string(stat) + "_" + ch);
  return names;
}

// Truth swings keyed by (participant, session).
std::map<std::pair<std::string, ingest::Session>, std::vector<const synth::SwingTruth*>> index_truth(
    const std::vector<synth::SwingTruth>& truth) {
  std::map<std::pair<std::string, ingest::Session>, std::vector<const synth::SwingTruth*>> idx;
  for (const auto& t : truth) idx[{t.participant_id, t.session}].push_back(&t);
  return idx;
}

FeatureMatrix segmentation_input(const ingest::Recording& r, const segment::SwingWindow& w,
                                 const FeatureParams& params, const preprocess::PcaModel* pca) {
  auto x = segment::euler_matrix(r.frames, w.start, w.end);
  if (params.segment_on_pca && pca) return preprocess::pca_transform(*pca, x);
  return x;
}

std::optional<preprocess::PcaModel> recording_pca(const ingest::Recording& r, const FeatureParams& params) {
  if (!params.segment_on_pca || r.frames.size() < 2) return std::nullopt;
  const auto all = segment::euler_matrix(r.frames, 0, r.frames.size());
  return preprocess::pca_fit_auto(all, 0, params.pca_variance);
}

bool use_truth(const Dataset& data, PhaseLabels labels) {
  if (labels == PhaseLabels::Truth) {
    if (!data.truth) fail(Errc::BadConfig, "phase labels from truth requested but the dataset has no truth.json");
    return true;
  }
  return labels == PhaseLabels::Auto && data.truth.has_value();
}

// Each metric is averaged over the folds where it is defined; a fold whose
// held-out participants share one skill has no precision or recall.
eval::BinaryMetrics mean_metrics(const std::vector<eval::BinaryMetrics>& folds) {
  auto mean_of = [&](auto value, auto undefined, bool& flag) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& f : folds) {
      if (f.*undefined) continue;
      sum += f.*value;
      ++n;
    }
    flag = n == 0;
    return n == 0 ? 0.0 : sum / static_cast<double>(n);
  };
  using M = eval::BinaryMetrics;
  M m;
  m.accuracy = mean_of(&M::accuracy, &M::accuracy_undefined, m.accuracy_undefined);
  m.precision = mean_of(&M::precision, &M::precision_undefined, m.precision_undefined);
  m.recall = mean_of(&M::recall, &M::recall_undefined, m.recall_undefined);
  m.f1 = mean_of(&M::f1, &M::f1_undefined, m.f1_undefined);
  return m;
}

std::vector<std::string> complement(const std::vector<std::string>& all, const std::vector<std::string>& remove) {
  std::set<std::string> r(remove.begin(), remove.end());
  std::vector<std::string> out;
  for (const auto& a : all) {
    if (!r.count(a)) out.push_back(a);
  }
  return out;
}

}  // namespace

std::string_view to_string(Task t) { return t == Task::Skill ? "skill" : "phase"; }
std::string_view to_string(FeatureMode m) { return m == FeatureMode::Frames ? "frames" : "aggregates"; }
std::string_view to_string(PhaseLabels l) {
  switch (l) {
    case PhaseLabels::Auto: return "auto";
    case PhaseLabels::Truth: return "truth";
    case PhaseLabels::Detector: return "detector";
  }
  return "auto";
}

Task parse_task(std::string_view s) {
  if (s == "skill") return Task::Skill;
  if (s == "phase") return Task::Phase;
  fail(Errc::BadConfig, "unknown task '" + std::string(s) + "'");
}

FeatureMode parse_feature_mode(std::string_view s) {
  if (s == "frames") return FeatureMode::Frames;
  if (s == "aggregates") return FeatureMode::Aggregates;
  fail(Errc::BadConfig, "unknown feature mode '" + std::string(s) + "'");
}

PhaseLabels parse_phase_labels(std::string_view s) {
  if (s == "auto") return PhaseLabels::Auto;
  if (s == "truth") return PhaseLabels::Truth;
  if (s == "detector") return PhaseLabels::Detector;
  fail(Errc::BadConfig, "unknown phase label source '" + std::string(s) + "'");
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  return mix(mix(seed ^ mix(a + 1)) ^ mix(b + 0x51ED27ULL));
}

Dataset load_dataset_dir(const std::filesystem::path& path, const ingest::LoadOptions& options) {
  std::filesystem::path manifest = path;
  if (std::filesystem::is_directory(path)) manifest = path / "manifest.json";
  if (!std::filesystem::exists(manifest)) fail(Errc::IoError, "manifest '" + manifest.string() + "' not found");

  Dataset data;
  auto loaded = ingest::load_dataset(ingest::read_manifest(manifest), options);
  data.recordings = std::move(loaded.recordings);
  data.warnings = std::move(loaded.warnings);

  const auto truth_path = manifest.parent_path() / "truth.json";
  if (std::filesystem::exists(truth_path)) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(ingest::read_text_file(truth_path));
    } catch (const nlohmann::json::parse_error& e) {
      fail(Errc::BadFormat, "truth.json: " + std::string(e.what()));
    }
    data.truth = synth::truth_from_json(j);
  }
  return data;
}

SampleSet SampleSet::subset(const std::vector<std::size_t>& rows) const {
  SampleSet s;
  s.x = x.select_rows(rows);
  s.y.reserve(rows.size());
  s.group.reserve(rows.size());
  for (auto r : rows) {
    s.y.push_back(y[r]);
    s.group.push_back(group[r]);
  }
  return s;
}

std::vector<std::size_t> SampleSet::rows_of(const std::vector<std::string>& participants) const {
  std::set<std::string> want(participants.begin(), participants.end());
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < group.size(); ++i) {
    if (want.count(group[i])) rows.push_back(i);
  }
  return rows;
}

std::vector<double> aggregate_features(const FeatureMatrix& x, std::size_t start, std::size_t end) {
  const std::size_t d = x.cols;
  std::vector<double> out(4 * d, 0.0);
  const double n = static_cast<double>(end - start);
  for (std::size_t j = 0; j < d; ++j) {
    double sum = 0.0, lo = x(start, j), hi = x(start, j);
    for (std::size_t i = start; i < end; ++i) {
      sum += x(i, j);
      lo = std::min(lo, x(i, j));
      hi = std::max(hi, x(i, j));
    }
    const double mean = sum / n;
    double ss = 0.0;
    for (std::size_t i = start; i < end; ++i) ss += (x(i, j) - mean) * (x(i, j) - mean);
    out[j] = mean;
    out[d + j] = std::sqrt(ss / n);
    out[2 * d + j] = lo;
    out[3 * d + j] = hi;
  }
  return out;
}

SampleSet build_skill_samples(const Dataset& data, const FeatureParams& params) {
  SampleSet s;
  for (const auto& r : data.recordings) {
    std::vector<segment::SwingWindow> windows;
    try {
      windows = segment::extract_swings(r, params.swing);
    } catch (const Error& e) {
      if (e.code() != Errc::NoSwingsFound) throw;
      continue;
    }
    const int label = skill_label(r.skill);
    for (const auto& w : windows) {
      const auto x = segment::euler_matrix(r.frames, w.start, w.end);
      if (params.mode == FeatureMode::Aggregates) {
        append_row(s, aggregate_features(x, 0, x.rows), label, r.participant_id);
      } else {
        for (std::size_t i = 0; i < x.rows; ++i) {
          auto row = x.row(i);
          append_row(s, {row.begin(), row.end()}, label, r.participant_id);
        }
      }
    }
  }
  s.x.col_names = params.mode == FeatureMode::Aggregates ? aggregate_names()
                                                          : std::vector<std::string>{"yaw", "roll", "pitch"};
  if (s.x.cols == 0) s.x.cols = s.x.col_names.size();
  return s;
}

SampleSet build_phase_samples(const Dataset& data, const FeatureParams& params) {
  SampleSet s;
  auto add_swing = [&](const FeatureMatrix& x, const std::array<std::size_t, 4>& bkps, const std::string& who) {
    std::array<std::size_t, 6> edges{0, bkps[0], bkps[1], bkps[2], bkps[3], x.rows};
    for (std::size_t p = 0; p < segment::kPhaseCount; ++p) {
      if (params.mode == FeatureMode::Aggregates) {
        append_row(s, aggregate_features(x, edges[p], edges[p + 1]), static_cast<int>(p), who);
      } else {
        for (std::size_t i = edges[p]; i < edges[p + 1]; ++i) {
          auto row = x.row(i);
          append_row(s, {row.begin(), row.end()}, static_cast<int>(p), who);
        }
      }
    }
  };

  if (use_truth(data, params.phase_labels)) {
    const auto idx = index_truth(*data.truth);
    for (const auto& r : data.recordings) {
      auto it = idx.find({r.participant_id, r.session});
      if (it == idx.end()) continue;
      for (const auto* t : it->second) {
        if (t->end > r.frames.size())
          fail(Errc::BadFormat, "truth swing for " + r.participant_id + " runs past the recording end");
        const auto x = segment::euler_matrix(r.frames, t->start, t->end);
        std::array<std::size_t, 4> rel{};
        for (std::size_t b = 0; b < 4; ++b) rel[b] = t->breakpoints[b] - t->start;
        add_swing(x, rel, r.participant_id);
      }
    }
  } else {
    for (const auto& seg : segment_dataset(data, params)) {
      const auto& r = *std::find_if(data.recordings.begin(), data.recordings.end(), [&](const auto& rec) {
        return rec.participant_id == seg.participant_id && rec.session == seg.session;
      });
      const auto x = segment::euler_matrix(r.frames, seg.window.start, seg.window.end);
      add_swing(x, seg.phases.breakpoints, r.participant_id);
    }
  }
  s.x.col_names = params.mode == FeatureMode::Aggregates ? aggregate_names()
                                                          : std::vector<std::string>{"yaw", "roll", "pitch"};
  if (s.x.cols == 0) s.x.cols = s.x.col_names.size();
  return s;
}

std::vector<SwingSegmentation> segment_dataset(const Dataset& data, const FeatureParams& params,
                                               std::vector<std::string>* warnings) {
  std::vector<SwingSegmentation> out;
  for (const auto& r : data.recordings) {
    const std::string who = r.participant_id + "/" + std::string(ingest::to_string(r.session));
    std::vector<segment::SwingWindow> windows;
    try {
      windows = segment::extract_swings(r, params.swing);
    } catch (const Error& e) {
      if (e.code() != Errc::NoSwingsFound) throw;
      if (warnings) warnings->push_back(who + ": no swings found");
      continue;
    }
    const auto pca = recording_pca(r, params);
    for (std::size_t i = 0; i < windows.size(); ++i) {
      const auto x = segmentation_input(r, windows[i], params, pca ? &*pca : nullptr);
      if (x.rows < segment::kPhaseCount * params.min_seg_len) {
        if (warnings) warnings->push_back(who + ": swing " + std::to_string(i) + " too short to segment");
        continue;
      }
      SwingSegmentation seg;
      seg.participant_id = r.participant_id;
      seg.session = r.session;
      seg.swing_index = i;
      seg.window = windows[i];
      seg.phases = segment::segment_phases(x, params.min_seg_len);
      out.push_back(std::move(seg));
    }
  }
  return out;
}

Preprocessor Preprocessor::fit(const FeatureMatrix& x, const ModelConfig& config) {
  Preprocessor p;
  p.standardizer = preprocess::Standardizer::fit(x);
  p.pca = preprocess::pca_fit_auto(p.standardizer.apply(x), config.pca_components, config.pca_variance);
  return p;
}

FeatureMatrix Preprocessor::transform(const FeatureMatrix& x) const {
  return preprocess::pca_transform(pca, standardizer.apply(x));
}

std::vector<std::vector<double>> PipelineBundle::scores(const FeatureMatrix& raw) const {
  const auto z = preprocessor.transform(raw);
  std::vector<std::vector<double>> out(z.rows);
  for (std::size_t i = 0; i < z.rows; ++i) {
    if (task == Task::Skill) {
      out[i] = {svm::decision_value(*binary, z.row(i))};
    } else {
      out[i] = svm::decision_values(*multiclass, z.row(i));
    }
  }
  return out;
}

std::vector<int> PipelineBundle::predict(const FeatureMatrix& raw) const {
  const auto s = scores(raw);
  std::vector<int> out(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    out[i] = task == Task::Skill ? (s[i][0] >= 0.0 ? 1 : 0) : svm::argmax_class(s[i]);
  }
  return out;
}

std::vector<std::size_t> subsample(std::size_t n, std::size_t cap, std::uint64_t seed) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  if (cap == 0 || n <= cap) return idx;
  std::mt19937_64 rng(seed);
  // Partial Fisher-Yates: the first `cap` entries become a uniform sample.
  for (std::size_t i = 0; i < cap; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, n - 1);
    std::swap(idx[i], idx[pick(rng)]);
  }
  idx.resize(cap);
  std::sort(idx.begin(), idx.end());
  return idx;
}

PipelineBundle train_bundle(const SampleSet& samples, Task task, FeatureMode mode, const ModelConfig& config,
                            std::uint64_t seed) {
  if (samples.x.rows < 2) fail(Errc::DegenerateData, "need at least two training rows");
  PipelineBundle b;
  b.task = task;
  b.features = mode;
  b.preprocessor = Preprocessor::fit(samples.x, config);

  const auto rows = subsample(samples.x.rows, config.max_train_rows, seed);
  const auto train = samples.subset(rows);
  const auto z = b.preprocessor.transform(train.x);
  if (task == Task::Skill) {
    std::vector<int> y(train.y.size());
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = train.y[i] == 1 ? 1 : -1;
    b.binary = svm::train_binary_smo(z, y, config.kernel, config.smo);
  } else {
    b.multiclass = svm::train_multiclass_ovr(z, train.y, segment::kPhaseCount, config.kernel, config.smo);
  }
  return b;
}

nlohmann::ordered_json experiment_config_to_json(const ExperimentConfig& c) {
  nlohmann::ordered_json j;
  nlohmann::ordered_json kernels = nlohmann::ordered_json::array();
  for (auto k : c.kernels) kernels.push_back(svm::to_string(k));
  j["kernels"] = kernels;
  j["phase_kernel"] = svm::to_string(c.phase_kernel);
  if (c.model.kernel.gamma) j["gamma"] = *c.model.kernel.gamma;
  else j["gamma"] = "scale";
  j["degree"] = c.model.kernel.degree;
  j["coef0"] = c.model.kernel.coef0;
  j["C"] = c.model.smo.C;
  j["tol"] = c.model.smo.tol;
  j["max_iter"] = c.model.smo.max_iter;
  j["pca_components"] = c.model.pca_components;
  j["pca_variance"] = c.model.pca_variance;
  j["max_train_rows"] = c.model.max_train_rows;
  j["folds"] = c.folds;
  j["test_frac"] = c.test_frac;
  j["features"] = to_string(c.features.mode);
  j["phase_labels"] = to_string(c.features.phase_labels);
  j["segment_on"] = c.features.segment_on_pca ? "pca" : "raw";
  j["min_seg_len"] = c.features.min_seg_len;
  j["threshold_frac"] = c.features.swing.threshold_frac;
  j["refractory"] = c.features.swing.refractory;
  j["pre_frames"] = c.features.swing.pre_frames;
  j["post_frames"] = c.features.swing.post_frames;
  j["min_swing_len"] = c.features.swing.min_swing_len;
  j["tasks"] = nlohmann::ordered_json::array();
  if (c.run_skill) j["tasks"].push_back("skill");
  if (c.run_phase) j["tasks"].push_back("phase");
  return j;
}

EvaluationReport run_experiment(const Dataset& data, const ExperimentConfig& config) {
  std::map<std::string, int> skill_of;
  for (const auto& r : data.recordings) skill_of[r.participant_id] = skill_label(r.skill);
  std::set<int> skills;
  for (const auto& [id, s] : skill_of) skills.insert(s);
  if (skills.size() < 2) fail(Errc::SingleClass, "dataset needs both beginner and intermediate participants");

  std::vector<eval::Participant> participants;
  for (const auto& [id, s] : skill_of) participants.push_back({id, s});

  EvaluationReport report;
  report.seed = config.seed;
  report.config = experiment_config_to_json(config);
  report.split = eval::split_holdout(participants, config.test_frac, config.seed);
  if (report.split.train_val.size() < config.folds)
    fail(Errc::BadK, std::to_string(config.folds) + " folds requested but only " +
                         std::to_string(report.split.train_val.size()) + " training participants");
  report.folds = eval::grouped_kfold(report.split.train_val, config.folds, derive_seed(config.seed, 1));

  const auto& tv = report.split.train_val;
  std::vector<std::vector<std::string>> fold_train;
  for (const auto& f : report.folds.folds) fold_train.push_back(complement(tv, f));

  if (config.run_skill) {
    const SampleSet samples = build_skill_samples(data, config.features);
    if (samples.x.rows == 0) fail(Errc::NoSwingsFound, "no swings found in any recording");

    for (std::size_t ki = 0; ki < config.kernels.size(); ++ki) {
      KernelReport kr;
      kr.kind = config.kernels[ki];
      ModelConfig mc = config.model;
      mc.kernel.kind = kr.kind;

      for (std::size_t f = 0; f < report.folds.folds.size(); ++f) {
        const auto train = samples.subset(samples.rows_of(fold_train[f]));
        const auto held = samples.subset(samples.rows_of(report.folds.folds[f]));
        const auto bundle =
            train_bundle(train, Task::Skill, config.features.mode, mc, derive_seed(config.seed, 100 + ki, f));
        const auto pred = bundle.predict(held.x);
        kr.fold_metrics.push_back(eval::binary_metrics(eval::confusion_matrix(held.y, pred, 2)));
      }
      kr.cross_validation = mean_metrics(kr.fold_metrics);

      const auto train = samples.subset(samples.rows_of(tv));
      const auto test = samples.subset(samples.rows_of(report.split.test));
      const auto bundle =
          train_bundle(train, Task::Skill, config.features.mode, mc, derive_seed(config.seed, 100 + ki, 999));
      kr.testing_confusion = eval::confusion_matrix(test.y, bundle.predict(test.x), 2);
      kr.testing = eval::binary_metrics(kr.testing_confusion);
      report.skill.push_back(std::move(kr));
    }
  }

  if (config.run_phase) {
    const SampleSet samples = build_phase_samples(data, config.features);
    if (samples.x.rows == 0) fail(Errc::NoSwingsFound, "no phase-labelled swings available");
    PhaseReport pr;
    pr.kernel = config.phase_kernel;
    ModelConfig mc = config.model;
    mc.kernel.kind = pr.kernel;

    const std::size_t k = segment::kPhaseCount;
    pr.mean_confusion.assign(k, std::vector<double>(k, 0.0));
    double acc_sum = 0.0;
    for (std::size_t f = 0; f < report.folds.folds.size(); ++f) {
      const auto train = samples.subset(samples.rows_of(fold_train[f]));
      const auto held = samples.subset(samples.rows_of(report.folds.folds[f]));
      const auto bundle = train_bundle(train, Task::Phase, config.features.mode, mc, derive_seed(config.seed, 200, f));
      const auto cm = eval::confusion_matrix(held.y, bundle.predict(held.x), k);
      for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = 0; b < k; ++b) pr.mean_confusion[a][b] += static_cast<double>(cm.counts[a][b]);
      acc_sum += cm.total() ? static_cast<double>(cm.trace()) / static_cast<double>(cm.total()) : 0.0;
    }
    const double nf = static_cast<double>(report.folds.folds.size());
    for (auto& row : pr.mean_confusion)
      for (double& v : row) v /= nf;
    pr.cross_validation_accuracy = acc_sum / nf;

    const auto train = samples.subset(samples.rows_of(tv));
    const auto test = samples.subset(samples.rows_of(report.split.test));
    const auto bundle = train_bundle(train, Task::Phase, config.features.mode, mc, derive_seed(config.seed, 200, 999));
    const auto scores = bundle.scores(test.x);
    std::vector<int> pred(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) pred[i] = svm::argmax_class(scores[i]);
    pr.testing_confusion = eval::confusion_matrix(test.y, pred, k);
    pr.testing_accuracy = pr.testing_confusion.total()
                              ? static_cast<double>(pr.testing_confusion.trace()) /
                                    static_cast<double>(pr.testing_confusion.total())
                              : 0.0;
    pr.roc = eval::per_class_roc_from_scores(scores, test.y, k);
    report.phase = std::move(pr);
  }
  return report;
}


ExperimentConfig experiment_config_from_json(const nlohmann::json& j, ExperimentConfig c) {
  if (!j.is_object()) fail(Errc::BadConfig, "experiment config must be a JSON object");
  static const std::set<std::string> known{
      "kernels",   "phase_kernel", "gamma",       "degree",       "coef0",          "C",
      "tol",       "max_iter",     "pca_components", "pca_variance", "max_train_rows", "folds",
      "test_frac", "features",     "phase_labels", "segment_on",   "min_seg_len",    "threshold_frac",
      "refractory", "pre_frames",  "post_frames",  "min_swing_len", "tasks",          "seed"};
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) fail(Errc::BadConfig, "unknown experiment config key '" + key + "'");
  }
  try {
    if (j.contains("kernels")) {
      c.kernels.clear();
      for (const auto& k : j.at("kernels")) c.kernels.push_back(svm::parse_kernel_kind(k.get<std::string>()));
      if (c.kernels.empty()) fail(Errc::BadConfig, "kernels must not be empty");
    }
    if (j.contains("phase_kernel")) c.phase_kernel = svm::parse_kernel_kind(j.at("phase_kernel").get<std::string>());
    if (j.contains("gamma")) {
      const auto& g = j.at("gamma");
      if (g.is_string()) {
        if (g.get<std::string>() != "scale") fail(Errc::BadConfig, "gamma must be a positive number or \"scale\"");
        c.model.kernel.gamma.reset();
      } else {
        c.model.kernel.gamma = g.get<double>();
      }
    }
    c.model.kernel.degree = j.value("degree", c.model.kernel.degree);
    c.model.kernel.coef0 = j.value("coef0", c.model.kernel.coef0);
    c.model.smo.C = j.value("C", c.model.smo.C);
    c.model.smo.tol = j.value("tol", c.model.smo.tol);
    c.model.smo.max_iter = j.value("max_iter", c.model.smo.max_iter);
    c.model.pca_components = j.value("pca_components", c.model.pca_components);
    c.model.pca_variance = j.value("pca_variance", c.model.pca_variance);
    c.model.max_train_rows = j.value("max_train_rows", c.model.max_train_rows);
    c.folds = j.value("folds", c.folds);
    c.test_frac = j.value("test_frac", c.test_frac);
    if (j.contains("features")) c.features.mode = parse_feature_mode(j.at("features").get<std::string>());
    if (j.contains("phase_labels")) c.features.phase_labels = parse_phase_labels(j.at("phase_labels").get<std::string>());
    if (j.contains("segment_on")) {
      const auto s = j.at("segment_on").get<std::string>();
      if (s != "pca" && s != "raw") fail(Errc::BadConfig, "segment_on must be pca or raw");
      c.features.segment_on_pca = s == "pca";
    }
    c.features.min_seg_len = j.value("min_seg_len", c.features.min_seg_len);
    c.features.swing.threshold_frac = j.value("threshold_frac", c.features.swing.threshold_frac);
    c.features.swing.refractory = j.value("refractory", c.features.swing.refractory);
    c.features.swing.pre_frames = j.value("pre_frames", c.features.swing.pre_frames);
    c.features.swing.post_frames = j.value("post_frames", c.features.swing.post_frames);
    c.features.swing.min_swing_len = j.value("min_swing_len", c.features.swing.min_swing_len);
    if (j.contains("tasks")) {
      c.run_skill = c.run_phase = false;
      for (const auto& t : j.at("tasks")) {
        if (parse_task(t.get<std::string>()) == Task::Skill) c.run_skill = true;
        else c.run_phase = true;
      }
    }
    c.seed = j.value("seed", c.seed);
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::BadConfig, std::string("experiment config: ") + e.what());
  }
  validate(c);
  return c;
}

void validate(const ExperimentConfig& c) {
  if (c.kernels.empty()) fail(Errc::BadConfig, "at least one kernel is required");
  if (!(c.model.smo.C > 0.0)) fail(Errc::BadConfig, "C must be positive");
  if (!(c.model.smo.tol > 0.0)) fail(Errc::BadConfig, "tol must be positive");
  if (c.model.kernel.gamma && !(*c.model.kernel.gamma > 0.0)) fail(Errc::BadConfig, "gamma must be positive");
  if (c.model.kernel.degree < 1) fail(Errc::BadConfig, "degree must be at least 1");
  if (!(c.model.pca_variance > 0.0 && c.model.pca_variance <= 1.0))
    fail(Errc::BadConfig, "pca_variance must lie in (0, 1]");
  if (c.folds < 2) fail(Errc::BadK, "folds must be at least 2");
  if (!(c.test_frac > 0.0 && c.test_frac < 1.0)) fail(Errc::BadConfig, "test_frac must lie in (0, 1)");
  if (!(c.features.swing.threshold_frac > 0.0 && c.features.swing.threshold_frac <= 1.0))
    fail(Errc::BadConfig, "threshold_frac must lie in (0, 1]");
  if (c.features.min_seg_len < 1) fail(Errc::BadConfig, "min_seg_len must be at least 1");
  if (!c.run_skill && !c.run_phase) fail(Errc::BadConfig, "no task selected");
}

}  // namespace strokelab::pipeline
