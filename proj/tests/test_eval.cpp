#include "oracles.hpp"

#include "strokelab/error.hpp"
#include "strokelab/eval.hpp"

#include "test_support.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

using namespace strokelab;
using test_support::code_of;
using namespace strokelab::eval;

namespace {

std::vector<Participant> people(std::size_t beginners, std::size_t intermediates) {
  std::vector<Participant> out;
  for (std::size_t i = 0; i < beginners + intermediates; ++i)
    out.push_back({"P" + std::to_string(100 + i), i < beginners ? 0 : 1});
  return out;
}

}  // namespace

TEST_CASE("holdout sizes and stratification") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto ps = people(6, 6);
    const auto s = split_holdout(ps, 0.2, seed);
    CHECK(s.test.size() == 2);
    CHECK(s.train_val.size() == 10);
    std::set<int> test_labels;
    for (const auto& id : s.test)
      for (const auto& p : ps)
        if (p.id == id) test_labels.insert(p.label);
    CHECK(test_labels.size() == 2);
    std::set<std::string> all(s.test.begin(), s.test.end());
    for (const auto& id : s.train_val) CHECK(all.insert(id).second);
    CHECK(all.size() == 12);
  }
  const auto two = split_holdout(people(1, 1), 0.2, 1);
  CHECK(two.test.size() == 1);
  CHECK(two.train_val.size() == 1);
  CHECK(code_of([] { split_holdout(people(1, 0), 0.2, 1); }) == Errc::TooFewParticipants);
  CHECK(code_of([] { split_holdout(people(3, 3), 1.0, 1); }) == Errc::BadConfig);
  CHECK(split_holdout(people(6, 6), 0.2, 7).test == split_holdout(people(6, 6), 0.2, 7).test);
}

TEST_CASE("grouped k-fold") {
  std::vector<std::string> ids;
  for (int i = 0; i < 12; ++i) ids.push_back("id" + std::to_string(i));
  const auto plan = grouped_kfold(ids, 5, 3);
  std::vector<std::size_t> sizes;
  for (const auto& f : plan.folds) sizes.push_back(f.size());
  std::sort(sizes.rbegin(), sizes.rend());
  CHECK(sizes == std::vector<std::size_t>{3, 3, 2, 2, 2});
  for (const auto& f : grouped_kfold(ids, 12, 3).folds) CHECK(f.size() == 1);
  CHECK(code_of([&] { grouped_kfold(ids, 13, 3); }) == Errc::BadK);
  CHECK(code_of([&] { grouped_kfold(ids, 1, 3); }) == Errc::BadK);
  CHECK(grouped_kfold(ids, 5, 9).folds == grouped_kfold(ids, 5, 9).folds);
}

TEST_CASE("confusion matrices") {
  CHECK(confusion_matrix(std::vector<int>{0, 1, 0}, std::vector<int>{0, 1, 0}, 2).counts ==
        std::vector<std::vector<std::size_t>>{{2, 0}, {0, 1}});
  const auto cm = confusion_matrix(std::vector<int>{1, 1, 1, 1, 1, 1, 0, 0, 0, 0},
                                   std::vector<int>{1, 1, 1, 1, 0, 0, 0, 0, 0, 1}, 2);
  CHECK(cm.counts == std::vector<std::vector<std::size_t>>{{3, 1}, {2, 4}});
  CHECK(cm.total() == 10);
  CHECK(cm.trace() == 7);
  const auto empty = confusion_matrix(std::vector<int>{}, std::vector<int>{}, 3);
  CHECK(empty.total() == 0);
  CHECK(empty.counts.size() == 3);
  CHECK(code_of([] { confusion_matrix(std::vector<int>{0, 2}, std::vector<int>{0, 1}, 2); }) ==
        Errc::LabelOutOfRange);
  CHECK(code_of([] { confusion_matrix(std::vector<int>{0}, std::vector<int>{0, 1}, 2); }) == Errc::LengthMismatch);
}

TEST_CASE("binary metrics") {
  ConfusionMatrix cm{2, {{3, 1}, {2, 4}}};
  const auto m = binary_metrics(cm);
  CHECK(m.accuracy == doctest::Approx(0.7));
  CHECK(m.precision == doctest::Approx(0.8));
  CHECK(m.recall == doctest::Approx(0.666667).epsilon(1e-6));
  CHECK(m.f1 == doctest::Approx(0.727273).epsilon(1e-6));
  const auto none = binary_metrics(ConfusionMatrix{2, {{5, 0}, {3, 0}}});
  CHECK(none.precision == 0.0);
  CHECK(none.precision_undefined);
  CHECK(none.recall == 0.0);
  CHECK_FALSE(none.recall_undefined);
  const auto empty = binary_metrics(ConfusionMatrix{2, {{0, 0}, {0, 0}}});
  CHECK(empty.accuracy_undefined);
  // negative class as positive
  const auto flipped = binary_metrics(cm, 0);
  CHECK(flipped.precision == doctest::Approx(0.6));
}

TEST_CASE("accuracy equals trace over total") {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 100; ++t) {
    ConfusionMatrix cm{2, {{rng() % 20, rng() % 20}, {rng() % 20, rng() % 20 + 1}}};
    CHECK(binary_metrics(cm).accuracy == static_cast<double>(cm.trace()) / static_cast<double>(cm.total()));
  }
}

TEST_CASE("roc examples") {
  const auto r = roc_auc(std::vector<double>{0.9, 0.8, 0.7, 0.6}, std::vector<int>{1, 0, 1, 0});
  CHECK(r.auc == 0.75);
  REQUIRE(r.curve.size() == 5);
  CHECK(r.curve.front().fpr == 0.0);
  CHECK(r.curve.front().tpr == 0.0);
  CHECK(r.curve.back().fpr == 1.0);
  CHECK(r.curve.back().tpr == 1.0);
  CHECK(r.curve[1].tpr == 0.5);
  CHECK(r.curve[1].fpr == 0.0);
  CHECK(roc_auc(std::vector<double>{3, 3, 3}, std::vector<int>{1, 0, 1}).auc == 0.5);
  CHECK(roc_auc(std::vector<double>{3, 3, 3}, std::vector<int>{1, 0, 1}).curve.size() == 2);
  CHECK(code_of([] { roc_auc(std::vector<double>{1, 2}, std::vector<int>{1, 1}); }) == Errc::SingleClassLabels);
}

TEST_CASE("roc properties") {
  std::mt19937_64 rng(77);
  std::normal_distribution<double> g(0, 1);
  for (int t = 0; t < 50; ++t) {
    const std::size_t n = 2 + rng() % 40;
    std::vector<double> s(n), neg(n), warped(n);
    std::vector<int> l(n);
    for (std::size_t i = 0; i < n; ++i) {
      l[i] = static_cast<int>(rng() % 2);
      s[i] = g(rng) + l[i];
      neg[i] = -s[i];
      warped[i] = std::exp(2.0 * s[i]) + 5.0;
    }
    l[0] = 0;
    l[1] = 1;
    const double a = roc_auc(s, l).auc;
    CHECK(std::abs(a - oracle::pairwise_auc(s, l)) <= 1e-12);
    CHECK(std::abs(a + roc_auc(neg, l).auc - 1.0) <= 1e-12);
    CHECK(std::abs(a - roc_auc(warped, l).auc) <= 1e-12);
    const auto curve = roc_auc(s, l).curve;
    for (std::size_t i = 1; i < curve.size(); ++i) {
      CHECK(curve[i].fpr >= curve[i - 1].fpr);
      CHECK(curve[i].tpr >= curve[i - 1].tpr);
    }
  }
}

TEST_CASE("per-class roc") {
  const auto x = FeatureMatrix::from_rows({{0}, {0.5}, {5}, {5.5}});
  const std::vector<int> y{0, 0, 1, 1};
  const auto m = svm::train_multiclass_ovr(x, y, 2, svm::KernelSpec{});
  const auto r = per_class_roc(m, x, y);
  REQUIRE(r.size() == 2);
  CHECK(r[0].roc->auc == 1.0);
  CHECK(r[1].roc->auc == 1.0);

  const std::vector<std::vector<double>> scores{{0.9, 0.1, 0.0}, {0.2, 0.8, 0.0}, {0.6, 0.4, 0.0}};
  const auto partial = per_class_roc_from_scores(scores, std::vector<int>{0, 1, 0}, 3);
  REQUIRE(partial.size() == 3);
  CHECK(partial[0].roc.has_value());
  CHECK_FALSE(partial[2].roc.has_value());
}
