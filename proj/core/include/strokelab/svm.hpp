#pragma once

#include "strokelab/matrix.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace strokelab::svm {

enum class KernelKind { Rbf, Poly, Sigmoid };

std::string_view to_string(KernelKind k);
KernelKind parse_kernel_kind(std::string_view s);

/// Kernel hyperparameters. An unset gamma means "scale", resolved on the
/// training matrix as 1 / (d * var(X)).
struct KernelSpec {
  KernelKind kind = KernelKind::Rbf;
  std::optional<double> gamma;
  int degree = 3;
  double coef0 = 0.0;

  bool resolved() const { return gamma.has_value(); }
  KernelSpec resolve(const FeatureMatrix& x) const;
};

/// rbf: exp(-g|x-z|^2)   poly: (g<x,z> + c0)^deg   sigmoid: tanh(g<x,z> + c0)
double kernel_eval(const KernelSpec& spec, std::span<const double> x, std::span<const double> z);

struct SvmModel {
  FeatureMatrix support_vectors;
  std::vector<double> dual_coefs;  // alpha_i * y_i
  double bias = 0.0;
  KernelSpec kernel;
  double C = 1.0;
  bool converged = true;
  std::size_t iterations = 0;
};

struct SmoOptions {
  double C = 1.0;
  double tol = 1e-3;
  /// Budget of pair updates; 0 picks max(10 n, 100000).
  std::size_t max_iter = 0;
};

/// Dual SMO with maximal-violating-pair selection. Labels must be -1/+1.
/// A model that exhausts the budget is still returned with converged=false.
SvmModel train_binary_smo(const FeatureMatrix& x, std::span<const int> y, const KernelSpec& kernel,
                          const SmoOptions& options = {});

double decision_value(const SvmModel& model, std::span<const double> x);

/// sign of the decision value; exactly zero maps to +1.
int predict_binary(const SvmModel& model, std::span<const double> x);

/// Dual objective sum(alpha) - 1/2 sum_ij alpha_i alpha_j y_i y_j k(x_i, x_j).
double dual_objective(const FeatureMatrix& x, std::span<const int> y, std::span<const double> alpha,
                      const KernelSpec& kernel);

/// One-vs-rest bundle. A class that is absent from the training labels gets
/// no model and scores -infinity.
struct MultiClassModel {
  std::vector<int> classes;
  std::vector<std::optional<SvmModel>> models;

  std::size_t size() const { return classes.size(); }
};

MultiClassModel train_multiclass_ovr(const FeatureMatrix& x, std::span<const int> y, std::size_t n_classes,
                                     const KernelSpec& kernel, const SmoOptions& options = {});

std::vector<double> decision_values(const MultiClassModel& model, std::span<const double> x);

/// Argmax of the per-class scores; ties go to the lowest class index.
int argmax_class(std::span<const double> scores);
int predict_multiclass(const MultiClassModel& model, std::span<const double> x);

}  // namespace strokelab::svm
