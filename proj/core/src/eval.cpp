#include "strokelab/eval.hpp"

#include "strokelab/error.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <set>

namespace strokelab::eval {

HoldoutSplit split_holdout(const std::vector<Participant>& participants, double test_frac, std::uint64_t seed) {
  const std::size_t n = participants.size();
  if (n < 2) fail(Errc::TooFewParticipants, "holdout split needs at least two participants, got " + std::to_string(n));
  if (!(test_frac > 0.0 && test_frac < 1.0)) fail(Errc::BadConfig, "test fraction must lie in (0, 1)");
  {
    std::set<std::string> ids;
    for (const auto& p : participants) {
      if (!ids.insert(p.id).second) fail(Errc::BadFormat, "duplicate participant id '" + p.id + "'");
    }
  }

  const auto wanted = static_cast<std::size_t>(std::llround(test_frac * static_cast<double>(n)));
  const std::size_t n_test = std::clamp<std::size_t>(wanted, 1, n - 1);

  std::mt19937_64 rng(seed);
  std::map<int, std::vector<std::string>> by_label;
  {
    auto sorted = participants;
    std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
    for (const auto& p : sorted) by_label[p.label].push_back(p.id);
  }
  for (auto& [label, ids] : by_label) std::shuffle(ids.begin(), ids.end(), rng);

  std::vector<std::string> test;
  std::map<int, std::size_t> taken;
  // First sweep keeps one member of every label on the training side.
  for (bool keep_one : {true, false}) {
    bool progressed = true;
    while (test.size() < n_test && progressed) {
      progressed = false;
      for (auto& [label, ids] : by_label) {
        if (test.size() >= n_test) break;
        const std::size_t reserve = keep_one ? 1 : 0;
        if (taken[label] + reserve < ids.size()) {
          test.push_back(ids[taken[label]++]);
          progressed = true;
        }
      }
    }
  }

  HoldoutSplit split;
  split.test = test;
  std::set<std::string> test_set(test.begin(), test.end());
  for (const auto& p : participants) {
    if (!test_set.count(p.id)) split.train_val.push_back(p.id);
  }
  std::sort(split.train_val.begin(), split.train_val.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

FoldPlan grouped_kfold(std::vector<std::string> participants, std::size_t k, std::uint64_t seed) {
  if (k < 2 || k > participants.size())
    fail(Errc::BadK, "fold count " + std::to_string(k) + " invalid for " + std::to_string(participants.size()) +
                         " participants");
  std::sort(participants.begin(), participants.end());
  if (std::adjacent_find(participants.begin(), participants.end()) != participants.end())
    fail(Errc::BadFormat, "duplicate participant id in fold plan");
  std::mt19937_64 rng(seed);
  std::shuffle(participants.begin(), participants.end(), rng);
  FoldPlan plan;
  plan.folds.resize(k);
  for (std::size_t i = 0; i < participants.size(); ++i) plan.folds[i % k].push_back(participants[i]);
  for (auto& f : plan.folds) std::sort(f.begin(), f.end());
  return plan;
}

std::size_t ConfusionMatrix::total() const {
  std::size_t s = 0;
  for (const auto& row : counts) s += std::accumulate(row.begin(), row.end(), std::size_t{0});
  return s;
}

std::size_t ConfusionMatrix::trace() const {
  std::size_t s = 0;
  for (std::size_t i = 0; i < classes; ++i) s += counts[i][i];
  return s;
}

ConfusionMatrix confusion_matrix(std::span<const int> y_true, std::span<const int> y_pred, std::size_t k) {
  if (y_true.size() != y_pred.size())
    fail(Errc::LengthMismatch, "y_true has " + std::to_string(y_true.size()) + " entries, y_pred " +
                                   std::to_string(y_pred.size()));
  ConfusionMatrix cm;
  cm.classes = k;
  cm.counts.assign(k, std::vector<std::size_t>(k, 0));
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    const int t = y_true[i];
    const int p = y_pred[i];
    if (t < 0 || p < 0 || static_cast<std::size_t>(t) >= k || static_cast<std::size_t>(p) >= k)
      fail(Errc::LabelOutOfRange, "label outside 0.." + std::to_string(k - 1) + " at position " + std::to_string(i));
    ++cm.counts[static_cast<std::size_t>(t)][static_cast<std::size_t>(p)];
  }
  return cm;
}

BinaryMetrics binary_metrics(const ConfusionMatrix& cm, int positive_class) {
  if (cm.classes != 2) fail(Errc::DimensionMismatch, "binary metrics need a 2x2 confusion matrix");
  if (positive_class != 0 && positive_class != 1) fail(Errc::LabelOutOfRange, "positive class must be 0 or 1");
  const auto pos = static_cast<std::size_t>(positive_class);
  const auto neg = 1 - pos;
  const double tp = static_cast<double>(cm.counts[pos][pos]);
  const double fn = static_cast<double>(cm.counts[pos][neg]);
  const double fp = static_cast<double>(cm.counts[neg][pos]);
  const double tn = static_cast<double>(cm.counts[neg][neg]);

  BinaryMetrics m;
  auto ratio = [](double num, double den, bool& undefined) {
    if (den == 0.0) {
      undefined = true;
      return 0.0;
    }
    return num / den;
  };
  m.accuracy = ratio(static_cast<double>(cm.trace()), static_cast<double>(cm.total()), m.accuracy_undefined);
  m.precision = ratio(tp, tp + fp, m.precision_undefined);
  m.recall = ratio(tp, tp + fn, m.recall_undefined);
  m.f1 = ratio(2.0 * m.precision * m.recall, m.precision + m.recall, m.f1_undefined);
  (void)tn;
  return m;
}

RocResult roc_auc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) fail(Errc::LengthMismatch, "scores and labels differ in length");
  std::size_t pos = 0, neg = 0;
  for (int l : labels) {
    if (l == 1) ++pos;
    else if (l == 0) ++neg;
    else fail(Errc::LabelOutOfRange, "ROC labels must be 0 or 1");
  }
  if (pos == 0 || neg == 0) fail(Errc::SingleClassLabels, "ROC needs both positive and negative labels");

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  RocResult out;
  out.curve.push_back({0.0, 0.0});
  // Twice the concordance count, kept integral: each tie contributes 1.
  std::uint64_t twice_concordant = 0;
  std::size_t tp = 0, fp = 0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    std::size_t group_pos = 0, group_neg = 0;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) {
      if (labels[order[j]] == 1) ++group_pos;
      else ++group_neg;
      ++j;
    }
    // Positives in this group beat every negative still below the threshold.
    const std::size_t neg_below = neg - fp - group_neg;
    twice_concordant += 2ULL * group_pos * neg_below + static_cast<std::uint64_t>(group_pos) * group_neg;
    tp += group_pos;
    fp += group_neg;
    out.curve.push_back({static_cast<double>(fp) / static_cast<double>(neg),
                         static_cast<double>(tp) / static_cast<double>(pos)});
    i = j;
  }
  out.auc = static_cast<double>(twice_concordant) / (2.0 * static_cast<double>(pos) * static_cast<double>(neg));
  return out;
}

std::vector<ClassRoc> per_class_roc_from_scores(const std::vector<std::vector<double>>& scores,
                                                std::span<const int> y, std::size_t n_classes) {
  if (scores.size() != y.size()) fail(Errc::LengthMismatch, "score rows and labels differ in length");
  std::vector<ClassRoc> out;
  std::vector<double> s(y.size());
  std::vector<int> l(y.size());
  for (std::size_t c = 0; c < n_classes; ++c) {
    ClassRoc cr;
    cr.cls = static_cast<int>(c);
    bool any_pos = false, any_neg = false;
    for (std::size_t i = 0; i < y.size(); ++i) {
      s[i] = scores[i][c];
      l[i] = y[i] == static_cast<int>(c) ? 1 : 0;
      (l[i] ? any_pos : any_neg) = true;
    }
    if (any_pos && any_neg) cr.roc = roc_auc(s, l);
    out.push_back(std::move(cr));
  }
  return out;
}

std::vector<ClassRoc> per_class_roc(const svm::MultiClassModel& model, const FeatureMatrix& x,
                                    std::span<const int> y) {
  std::vector<std::vector<double>> scores(x.rows);
  for (std::size_t i = 0; i < x.rows; ++i) scores[i] = svm::decision_values(model, x.row(i));
  return per_class_roc_from_scores(scores, y, model.size());
}

}  // namespace strokelab::eval
