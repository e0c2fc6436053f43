#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace strokelab {

/// Dense row-major matrix of doubles with optional column names.
/// Rows are samples, columns are features.
struct FeatureMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;
  std::vector<std::string> col_names;

  FeatureMatrix() = default;
  FeatureMatrix(std::size_t n, std::size_t d, double fill = 0.0)
      : rows(n), cols(d), values(n * d, fill) {}

  static FeatureMatrix from_rows(const std::vector<std::vector<double>>& rows_in);

  std::span<double> row(std::size_t i) { return {values.data() + i * cols, cols}; }
  std::span<const double> row(std::size_t i) const { return {values.data() + i * cols, cols}; }

  double& operator()(std::size_t i, std::size_t j) { return values[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return values[i * cols + j]; }

  std::vector<double> column(std::size_t j) const;
  FeatureMatrix select_rows(std::span<const std::size_t> idx) const;
  bool empty() const { return rows == 0; }
};

inline FeatureMatrix FeatureMatrix::from_rows(const std::vector<std::vector<double>>& rows_in) {
  FeatureMatrix m;
  m.rows = rows_in.size();
  m.cols = rows_in.empty() ? 0 : rows_in.front().size();
  m.values.reserve(m.rows * m.cols);
  for (const auto& r : rows_in) m.values.insert(m.values.end(), r.begin(), r.end());
  return m;
}

inline std::vector<double> FeatureMatrix::column(std::size_t j) const {
  std::vector<double> out(rows);
  for (std::size_t i = 0; i < rows; ++i) out[i] = (*this)(i, j);
  return out;
}

inline FeatureMatrix FeatureMatrix::select_rows(std::span<const std::size_t> idx) const {
  FeatureMatrix m(idx.size(), cols);
  m.col_names = col_names;
  for (std::size_t r = 0; r < idx.size(); ++r) {
    auto src = row(idx[r]);
    std::copy(src.begin(), src.end(), m.row(r).begin());
  }
  return m;
}

}  // namespace strokelab
