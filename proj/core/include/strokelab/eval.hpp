#pragma once

#include "strokelab/svm.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace strokelab::eval {

struct Participant {
  std::string id;
  int label = 0;  // stratification class (skill)
};

struct HoldoutSplit {
  std::vector<std::string> train_val;
  std::vector<std::string> test;
};

/// Participant-level split. The test side holds round(test_frac * n) people,
/// at least one and at most n-1, drawn round-robin across labels so that each
/// label is represented on both sides whenever its count allows it.
HoldoutSplit split_holdout(const std::vector<Participant>& participants, double test_frac, std::uint64_t seed);

struct FoldPlan {
  std::vector<std::vector<std::string>> folds;
};

/// Shuffles the ids and deals them into k folds.
FoldPlan grouped_kfold(std::vector<std::string> participants, std::size_t k, std::uint64_t seed);

struct ConfusionMatrix {
  std::size_t classes = 0;
  std::vector<std::vector<std::size_t>> counts;  // [true][predicted]

  std::size_t total() const;
  std::size_t trace() const;
};

ConfusionMatrix confusion_matrix(std::span<const int> y_true, std::span<const int> y_pred, std::size_t k);

struct BinaryMetrics {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  // Set when the corresponding ratio was 0/0 and reported as 0.
  bool accuracy_undefined = false;
  bool precision_undefined = false;
  bool recall_undefined = false;
  bool f1_undefined = false;
};

BinaryMetrics binary_metrics(const ConfusionMatrix& cm, int positive_class = 1);

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
};

struct RocResult {
  double auc = 0.0;
  std::vector<RocPoint> curve;
};

/// AUC as the Mann-Whitney concordance probability (ties count one half).
RocResult roc_auc(std::span<const double> scores, std::span<const int> labels);

struct ClassRoc {
  int cls = 0;
  std::optional<RocResult> roc;  // empty when the class is absent from y
};

std::vector<ClassRoc> per_class_roc(const svm::MultiClassModel& model, const FeatureMatrix& x,
                                    std::span<const int> y);

/// Same as per_class_roc but from precomputed decision values (rows x classes).
std::vector<ClassRoc> per_class_roc_from_scores(const std::vector<std::vector<double>>& scores,
                                                std::span<const int> y, std::size_t n_classes);

}  // namespace strokelab::eval
