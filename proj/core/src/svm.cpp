#include "strokelab/svm.hpp"

#include "strokelab/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

namespace strokelab::svm {

namespace {

constexpr double kTau = 1e-12;
constexpr double kSupportThreshold = 1e-8;

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Lazily materialized rows of Q_ij = y_i y_j k(x_i, x_j).
class QMatrix {
 public:
  QMatrix(const FeatureMatrix& x, std::span<const int> y, const KernelSpec& k)
      : x_(x), y_(y), kernel_(k), rows_(x.rows), diag_(x.rows) {
    for (std::size_t i = 0; i < x.rows; ++i) diag_[i] = kernel_eval(kernel_, x.row(i), x.row(i));
  }

  const std::vector<double>& row(std::size_t i) {
    auto& r = rows_[i];
    if (!r) {
      r = std::make_unique<std::vector<double>>(x_.rows);
      const auto xi = x_.row(i);
      for (std::size_t j = 0; j < x_.rows; ++j) (*r)[j] = y_[i] * y_[j] * kernel_eval(kernel_, xi, x_.row(j));
    }
    return *r;
  }

  double diag(std::size_t i) const { return diag_[i]; }

 private:
  const FeatureMatrix& x_;
  std::span<const int> y_;
  KernelSpec kernel_;
  std::vector<std::unique_ptr<std::vector<double>>> rows_;
  std::vector<double> diag_;
};

}  // namespace

std::string_view to_string(KernelKind k) {
  switch (k) {
    case KernelKind::Rbf: return "rbf";
    case KernelKind::Poly: return "poly";
    case KernelKind::Sigmoid: return "sigmoid";
  }
  return "rbf";
}

KernelKind parse_kernel_kind(std::string_view s) {
  if (s == "rbf") return KernelKind::Rbf;
  if (s == "poly") return KernelKind::Poly;
  if (s == "sigmoid") return KernelKind::Sigmoid;
  fail(Errc::BadConfig, "unknown kernel '" + std::string(s) + "'");
}

KernelSpec KernelSpec::resolve(const FeatureMatrix& x) const {
  KernelSpec out = *this;
  if (out.gamma) {
    if (!(*out.gamma > 0.0)) fail(Errc::BadConfig, "gamma must be positive");
    return out;
  }
  double var = 0.0;
  if (!x.values.empty()) {
    const double n = static_cast<double>(x.values.size());
    double mean = 0.0;
    for (double v : x.values) mean += v;
    mean /= n;
    for (double v : x.values) var += (v - mean) * (v - mean);
    var /= n;
  }
  const double d = static_cast<double>(std::max<std::size_t>(1, x.cols));
  out.gamma = var > 0.0 ? 1.0 / (d * var) : 1.0;
  return out;
}

double kernel_eval(const KernelSpec& spec, std::span<const double> x, std::span<const double> z) {
  if (x.size() != z.size())
    fail(Errc::DimensionMismatch, "kernel arguments have sizes " + std::to_string(x.size()) + " and " +
                                      std::to_string(z.size()));
  if (!spec.gamma) fail(Errc::BadConfig, "kernel gamma not resolved");
  const double g = *spec.gamma;
  switch (spec.kind) {
    case KernelKind::Rbf: {
      double d2 = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - z[i];
        d2 += d * d;
      }
      return std::exp(-g * d2);
    }
    case KernelKind::Poly: return std::pow(g * dot(x, z) + spec.coef0, spec.degree);
    case KernelKind::Sigmoid: return std::tanh(g * dot(x, z) + spec.coef0);
  }
  return 0.0;
}

SvmModel train_binary_smo(const FeatureMatrix& x, std::span<const int> y, const KernelSpec& kernel,
                          const SmoOptions& options) {
  const std::size_t n = x.rows;
  if (y.size() != n) fail(Errc::LengthMismatch, "label count does not match row count");
  if (!(options.C > 0.0)) fail(Errc::BadConfig, "C must be positive");
  bool has_pos = false, has_neg = false;
  for (int v : y) {
    if (v == 1) has_pos = true;
    else if (v == -1) has_neg = true;
    else fail(Errc::LabelOutOfRange, "binary labels must be -1 or +1");
  }
  if (!has_pos || !has_neg) fail(Errc::SingleClass, "training labels contain a single class");

  const KernelSpec spec = kernel.resolve(x);
  const double C = options.C;
  const std::size_t budget = options.max_iter > 0 ? options.max_iter : std::max<std::size_t>(10 * n, 100000);

  QMatrix q(x, y, spec);
  std::vector<double> alpha(n, 0.0);
  std::vector<double> grad(n, -1.0);  // gradient of 1/2 a'Qa - e'a

  auto in_up = [&](std::size_t t) { return (y[t] == 1 && alpha[t] < C) || (y[t] == -1 && alpha[t] > 0.0); };
  auto in_low = [&](std::size_t t) { return (y[t] == 1 && alpha[t] > 0.0) || (y[t] == -1 && alpha[t] < C); };

  SvmModel model;
  model.kernel = spec;
  model.C = C;
  model.converged = false;

  double gmax = 0.0, gmin = 0.0;
  std::size_t iter = 0;
  for (; iter < budget; ++iter) {
    gmax = -std::numeric_limits<double>::infinity();
    gmin = std::numeric_limits<double>::infinity();
    std::size_t i = n, j = n;
    for (std::size_t t = 0; t < n; ++t) {
      const double v = -y[t] * grad[t];
      if (in_up(t) && v > gmax) {
        gmax = v;
        i = t;
      }
      if (in_low(t) && v < gmin) {
        gmin = v;
        j = t;
      }
    }
    if (i == n || j == n || gmax - gmin < options.tol) {
      model.converged = true;
      break;
    }

    const auto& qi = q.row(i);
    const auto& qj = q.row(j);
    const double old_i = alpha[i];
    const double old_j = alpha[j];
    if (y[i] != y[j]) {
      double quad = q.diag(i) + q.diag(j) + 2.0 * qi[j];
      if (quad <= 0.0) quad = kTau;
      const double delta = (-grad[i] - grad[j]) / quad;
      const double diff = alpha[i] - alpha[j];
      alpha[i] += delta;
      alpha[j] += delta;
      if (diff > 0.0) {
        if (alpha[j] < 0.0) {
          alpha[j] = 0.0;
          alpha[i] = diff;
        }
      } else if (alpha[i] < 0.0) {
        alpha[i] = 0.0;
        alpha[j] = -diff;
      }
      if (diff > 0.0) {
        if (alpha[i] > C) {
          alpha[i] = C;
          alpha[j] = C - diff;
        }
      } else if (alpha[j] > C) {
        alpha[j] = C;
        alpha[i] = C + diff;
      }
    } else {
      double quad = q.diag(i) + q.diag(j) - 2.0 * qi[j];
      if (quad <= 0.0) quad = kTau;
      const double delta = (grad[i] - grad[j]) / quad;
      const double sum = alpha[i] + alpha[j];
      alpha[i] -= delta;
      alpha[j] += delta;
      if (sum > C) {
        if (alpha[i] > C) {
          alpha[i] = C;
          alpha[j] = sum - C;
        }
      } else if (alpha[j] < 0.0) {
        alpha[j] = 0.0;
        alpha[i] = sum;
      }
      if (sum > C) {
        if (alpha[j] > C) {
          alpha[j] = C;
          alpha[i] = sum - C;
        }
      } else if (alpha[i] < 0.0) {
        alpha[i] = 0.0;
        alpha[j] = sum;
      }
    }

    const double di = alpha[i] - old_i;
    const double dj = alpha[j] - old_j;
    for (std::size_t t = 0; t < n; ++t) grad[t] += qi[t] * di + qj[t] * dj;
  }
  model.iterations = iter;

  // Bias: mean over free vectors, otherwise the midpoint of the feasible interval.
  double free_sum = 0.0;
  std::size_t free_count = 0;
  double ub = std::numeric_limits<double>::infinity();
  double lb = -std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < n; ++t) {
    const double v = -y[t] * grad[t];
    if (alpha[t] > 0.0 && alpha[t] < C) {
      free_sum += v;
      ++free_count;
    } else {
      if (in_up(t)) lb = std::max(lb, v);
      if (in_low(t)) ub = std::min(ub, v);
    }
  }
  if (free_count > 0) {
    model.bias = free_sum / static_cast<double>(free_count);
  } else if (std::isfinite(lb) && std::isfinite(ub)) {
    model.bias = 0.5 * (lb + ub);
  } else {
    model.bias = std::isfinite(lb) ? lb : (std::isfinite(ub) ? ub : 0.0);
  }

  std::vector<std::size_t> keep;
  for (std::size_t t = 0; t < n; ++t) {
    if (alpha[t] > kSupportThreshold) keep.push_back(t);
  }
  model.support_vectors = x.select_rows(keep);
  model.dual_coefs.reserve(keep.size());
  for (std::size_t t : keep) model.dual_coefs.push_back(alpha[t] * y[t]);
  return model;
}

double decision_value(const SvmModel& model, std::span<const double> x) {
  if (x.size() != model.support_vectors.cols && model.support_vectors.rows > 0)
    fail(Errc::DimensionMismatch, "model expects " + std::to_string(model.support_vectors.cols) + " features, got " +
                                      std::to_string(x.size()));
  double f = model.bias;
  for (std::size_t i = 0; i < model.dual_coefs.size(); ++i)
    f += model.dual_coefs[i] * kernel_eval(model.kernel, model.support_vectors.row(i), x);
  return f;
}

int predict_binary(const SvmModel& model, std::span<const double> x) {
  return decision_value(model, x) >= 0.0 ? 1 : -1;
}

double dual_objective(const FeatureMatrix& x, std::span<const int> y, std::span<const double> alpha,
                      const KernelSpec& kernel) {
  const KernelSpec spec = kernel.resolve(x);
  double lin = 0.0, quad = 0.0;
  for (std::size_t i = 0; i < x.rows; ++i) {
    lin += alpha[i];
    if (alpha[i] == 0.0) continue;
    for (std::size_t j = 0; j < x.rows; ++j) {
      if (alpha[j] == 0.0) continue;
      quad += alpha[i] * alpha[j] * y[i] * y[j] * kernel_eval(spec, x.row(i), x.row(j));
    }
  }
  return lin - 0.5 * quad;
}

MultiClassModel train_multiclass_ovr(const FeatureMatrix& x, std::span<const int> y, std::size_t n_classes,
                                     const KernelSpec& kernel, const SmoOptions& options) {
  if (y.size() != x.rows) fail(Errc::LengthMismatch, "label count does not match row count");
  std::vector<std::size_t> counts(n_classes, 0);
  for (int v : y) {
    if (v < 0 || static_cast<std::size_t>(v) >= n_classes)
      fail(Errc::LabelOutOfRange, "label " + std::to_string(v) + " outside 0.." + std::to_string(n_classes - 1));
    ++counts[static_cast<std::size_t>(v)];
  }
  const auto present = std::count_if(counts.begin(), counts.end(), [](std::size_t c) { return c > 0; });
  if (present < 2) fail(Errc::SingleClass, "multi-class training needs at least two distinct labels");

  // Resolve gamma once so every one-vs-rest model shares the same kernel.
  const KernelSpec spec = kernel.resolve(x);
  MultiClassModel model;
  std::vector<int> binary(y.size());
  for (std::size_t c = 0; c < n_classes; ++c) {
    model.classes.push_back(static_cast<int>(c));
    if (counts[c] == 0) {
      model.models.emplace_back(std::nullopt);
      continue;
    }
    for (std::size_t i = 0; i < y.size(); ++i) binary[i] = y[i] == static_cast<int>(c) ? 1 : -1;
    model.models.emplace_back(train_binary_smo(x, binary, spec, options));
  }
  return model;
}

std::vector<double> decision_values(const MultiClassModel& model, std::span<const double> x) {
  std::vector<double> out(model.size(), -std::numeric_limits<double>::infinity());
  for (std::size_t c = 0; c < model.size(); ++c) {
    if (model.models[c]) out[c] = decision_value(*model.models[c], x);
  }
  return out;
}

int argmax_class(std::span<const double> scores) {
  std::size_t best = 0;
  for (std::size_t c = 1; c < scores.size(); ++c) {
    if (scores[c] > scores[best]) best = c;
  }
  return static_cast<int>(best);
}

int predict_multiclass(const MultiClassModel& model, std::span<const double> x) {
  const auto scores = decision_values(model, x);
  return model.classes[static_cast<std::size_t>(argmax_class(scores))];
}

}  // namespace strokelab::svm
