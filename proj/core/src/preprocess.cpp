#include "strokelab/preprocess.hpp"

#include "strokelab/error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace strokelab::preprocess {

namespace {

constexpr double kZeroStd = 1e-12;

void require_finite(const FeatureMatrix& x) {
  for (double v : x.values) {
    if (!std::isfinite(v)) fail(Errc::DegenerateData, "feature matrix contains non-finite values");
  }
}

}  // namespace

Standardized standardize(std::span<const double> series) {
  if (series.empty()) fail(Errc::EmptySeries, "standardize of an empty series");
  const double n = static_cast<double>(series.size());
  const double mean = std::accumulate(series.begin(), series.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : series) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / n);

  Standardized out;
  out.mean = mean;
  out.values.resize(series.size(), 0.0);
  if (sd < kZeroStd) {
    out.std = 0.0;
    return out;
  }
  out.std = sd;
  for (std::size_t i = 0; i < series.size(); ++i) out.values[i] = (series[i] - mean) / sd;
  return out;
}

MinMaxResult normalize_minmax(std::span<const double> series) {
  if (series.empty()) fail(Errc::EmptySeries, "normalize_minmax of an empty series");
  const auto [lo, hi] = std::minmax_element(series.begin(), series.end());
  MinMaxResult out;
  out.values.resize(series.size(), 0.0);
  const double range = *hi - *lo;
  if (!(range > 0.0)) {
    out.constant = true;
    return out;
  }
  for (std::size_t i = 0; i < series.size(); ++i) out.values[i] = (series[i] - *lo) / range;
  return out;
}

Standardizer Standardizer::fit(const FeatureMatrix& x) {
  if (x.rows == 0) fail(Errc::EmptySeries, "standardizer fit on zero rows");
  Standardizer s;
  s.mean.resize(x.cols);
  s.std.resize(x.cols);
  for (std::size_t j = 0; j < x.cols; ++j) {
    const auto col = x.column(j);
    const auto r = standardize(col);
    s.mean[j] = r.mean;
    s.std[j] = r.std;
  }
  return s;
}

FeatureMatrix Standardizer::apply(const FeatureMatrix& x) const {
  if (x.cols != mean.size()) fail(Errc::DimensionMismatch, "standardizer expects " + std::to_string(mean.size()) +
                                                               " columns, got " + std::to_string(x.cols));
  FeatureMatrix out(x.rows, x.cols);
  out.col_names = x.col_names;
  for (std::size_t i = 0; i < x.rows; ++i) {
    for (std::size_t j = 0; j < x.cols; ++j) {
      out(i, j) = std[j] > 0.0 ? (x(i, j) - mean[j]) / std[j] : 0.0;
    }
  }
  return out;
}

PcaModel pca_fit(const FeatureMatrix& x, std::size_t k) {
  const std::size_t n = x.rows;
  const std::size_t d = x.cols;
  if (d == 0 || k < 1 || k > d) fail(Errc::BadK, "component count " + std::to_string(k) + " not in [1, " +
                                                     std::to_string(d) + "]");
  if (n < 2) fail(Errc::DegenerateData, "PCA needs at least two rows");
  require_finite(x);

  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> m(
      x.values.data(), static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  const Eigen::RowVectorXd mu = m.colwise().mean();
  const Eigen::MatrixXd centered = m.rowwise() - mu;
  const Eigen::MatrixXd cov = (centered.transpose() * centered) / static_cast<double>(n - 1);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  if (solver.info() != Eigen::Success) fail(Errc::DegenerateData, "covariance eigendecomposition failed");
  const Eigen::VectorXd& evals = solver.eigenvalues();  // ascending
  const Eigen::MatrixXd& evecs = solver.eigenvectors();
  const double trace = cov.trace();

  PcaModel model;
  model.mean.assign(mu.data(), mu.data() + d);
  for (std::size_t c = 0; c < k; ++c) {
    const auto col = static_cast<Eigen::Index>(d - 1 - c);
    std::vector<double> comp(d);
    std::size_t arg = 0;
    for (std::size_t j = 0; j < d; ++j) {
      comp[j] = evecs(static_cast<Eigen::Index>(j), col);
      if (std::abs(comp[j]) > std::abs(comp[arg])) arg = j;
    }
    if (comp[arg] < 0.0) {
      for (double& v : comp) v = -v;
    }
    model.components.push_back(std::move(comp));
    const double lambda = std::max(0.0, evals(col));
    model.explained_variance_ratio.push_back(trace > 0.0 ? lambda / trace : 0.0);
  }
  return model;
}

FeatureMatrix pca_transform(const PcaModel& model, const FeatureMatrix& x) {
  const std::size_t d = model.dim();
  if (x.cols != d) fail(Errc::DimensionMismatch, "PCA model expects " + std::to_string(d) + " columns, got " +
                                                      std::to_string(x.cols));
  const std::size_t k = model.n_components();
  FeatureMatrix out(x.rows, k);
  for (std::size_t c = 0; c < k; ++c) out.col_names.push_back("pc" + std::to_string(c + 1));
  for (std::size_t i = 0; i < x.rows; ++i) {
    const auto r = x.row(i);
    for (std::size_t c = 0; c < k; ++c) {
      double s = 0.0;
      for (std::size_t j = 0; j < d; ++j) s += (r[j] - model.mean[j]) * model.components[c][j];
      out(i, c) = s;
    }
  }
  return out;
}

FeatureMatrix pca_inverse_transform(const PcaModel& model, const FeatureMatrix& scores) {
  const std::size_t k = model.n_components();
  const std::size_t d = model.dim();
  if (scores.cols != k) fail(Errc::DimensionMismatch, "expected " + std::to_string(k) + " score columns");
  FeatureMatrix out(scores.rows, d);
  for (std::size_t i = 0; i < scores.rows; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      double v = model.mean[j];
      for (std::size_t c = 0; c < k; ++c) v += scores(i, c) * model.components[c][j];
      out(i, j) = v;
    }
  }
  return out;
}

std::size_t components_for_variance(const PcaModel& full_model, double target) {
  double cum = 0.0;
  const auto& evr = full_model.explained_variance_ratio;
  for (std::size_t c = 0; c < evr.size(); ++c) {
    cum += evr[c];
    if (cum >= target - 1e-12) return c + 1;
  }
  return std::max<std::size_t>(1, evr.size());
}

PcaModel pca_fit_auto(const FeatureMatrix& x, std::size_t k, double variance_target) {
  PcaModel full = pca_fit(x, x.cols);
  const std::size_t keep = k == 0 ? components_for_variance(full, variance_target) : k;
  if (keep > x.cols) fail(Errc::BadK, "component count exceeds feature count");
  full.components.resize(keep);
  full.explained_variance_ratio.resize(keep);
  return full;
}

}  // namespace strokelab::preprocess
