#pragma once

#include "strokelab/matrix.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace strokelab::preprocess {

struct Standardized {
  std::vector<double> values;
  double mean = 0.0;
  double std = 0.0;  // population std; 0 when the series is (numerically) constant
};

Standardized standardize(std::span<const double> series);

struct MinMaxResult {
  std::vector<double> values;
  bool constant = false;  // all-zero output; callers should warn
};

MinMaxResult normalize_minmax(std::span<const double> series);

/// Per-column standardizer fitted on training rows and reused on held-out rows.
struct Standardizer {
  std::vector<double> mean;
  std::vector<double> std;

  static Standardizer fit(const FeatureMatrix& x);
  FeatureMatrix apply(const FeatureMatrix& x) const;
};

struct PcaModel {
  std::vector<double> mean;                         // d
  std::vector<std::vector<double>> components;      // k rows of length d
  std::vector<double> explained_variance_ratio;     // k

  std::size_t dim() const { return mean.size(); }
  std::size_t n_components() const { return components.size(); }
};

/// Top-k principal directions of the sample covariance (n-1 denominator),
/// each sign-fixed so its largest-magnitude entry is positive.
PcaModel pca_fit(const FeatureMatrix& x, std::size_t k);

/// Scores (x - mean) * components^T.
FeatureMatrix pca_transform(const PcaModel& model, const FeatureMatrix& x);

/// scores * components + mean.
FeatureMatrix pca_inverse_transform(const PcaModel& model, const FeatureMatrix& scores);

/// Smallest k whose cumulative explained variance reaches `target`.
std::size_t components_for_variance(const PcaModel& full_model, double target);

/// Fits PCA with every component, then truncates to `k`, or to the variance
/// target when k == 0.
PcaModel pca_fit_auto(const FeatureMatrix& x, std::size_t k, double variance_target);

}  // namespace strokelab::preprocess
