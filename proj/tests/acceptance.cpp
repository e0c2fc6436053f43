// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.

#include "oracles.hpp"

#include "strokelab/eval.hpp"
#include "strokelab/pipeline.hpp"
#include "strokelab/preprocess.hpp"
#include "strokelab/segment.hpp"
#include "strokelab/serialize.hpp"
#include "strokelab/svm.hpp"
#include "strokelab/synth.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace strokelab;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void check(bool ok, const std::string& what) {
    if (!ok && pass) detail = what;  // keep the first failure
    pass = pass && ok;
  }
};

int failures = 0;

void run(const char* id, const char* name, double limit_s, const std::function<std::string(Outcome&)>& body) {
  Outcome o;
  std::string summary;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    summary = body(o);
  } catch (const std::exception& e) {
    o.check(false, std::string("exception: ") + e.what());
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (limit_s > 0 && secs >= limit_s) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "runtime %.2f s exceeds %.0f s", secs, limit_s);
    o.check(false, buf);
  }
  std::printf("[%s] %s %s: %s (%.2f s)\n", o.pass ? "PASS" : "FAIL", id, name,
              o.pass ? summary.c_str() : o.detail.c_str(), secs);
  std::fflush(stdout);
  if (!o.pass) ++failures;
}

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

// ---- C1 -------------------------------------------------------------------

double ref_kernel(const svm::KernelSpec& k, std::span<const double> a, std::span<const double> b) {
  double dot = 0.0, dist = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    dist += (a[i] - b[i]) * (a[i] - b[i]);
  }
  switch (k.kind) {
    case svm::KernelKind::Rbf: return std::exp(-*k.gamma * dist);
    case svm::KernelKind::Poly: return std::pow(*k.gamma * dot + k.coef0, k.degree);
    case svm::KernelKind::Sigmoid: return std::tanh(*k.gamma * dot + k.coef0);
  }
  return 0.0;
}

// Recovers alpha for every training row: support vectors keep training order.
std::vector<double> full_alpha(const FeatureMatrix& x, const std::vector<int>& y, const svm::SvmModel& m) {
  std::vector<double> alpha(x.rows, 0.0);
  std::size_t s = 0;
  for (std::size_t i = 0; i < x.rows && s < m.support_vectors.rows; ++i) {
    const auto a = x.row(i);
    const auto b = m.support_vectors.row(s);
    if (std::equal(a.begin(), a.end(), b.begin()) && (m.dual_coefs[s] > 0) == (y[i] > 0)) {
      alpha[i] = std::abs(m.dual_coefs[s]);
      ++s;
    }
  }
  if (s != m.support_vectors.rows) throw std::runtime_error("support vectors do not map onto training rows");
  return alpha;
}

std::string criterion_smo(Outcome& o) {
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  const svm::KernelKind kinds[] = {svm::KernelKind::Rbf, svm::KernelKind::Poly, svm::KernelKind::Sigmoid};
  const double cs[] = {0.5, 1.0, 10.0};
  const double tol = 1e-3;
  std::size_t problems = 0;
  double worst_kkt = 0.0, worst_margin = 1e300;

  for (auto kind : kinds) {
    for (int p = 0; p < 25; ++p) {
      const std::size_t n = 4 + rng() % 9;   // 4..12
      const std::size_t d = 1 + rng() % 3;   // 1..3
      const bool separable = p % 2 == 0;
      FeatureMatrix x(n, d);
      std::vector<int> y(n);
      std::vector<double> w(d);
      for (auto& v : w) v = u(rng);
      for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
          x(i, j) = u(rng);
          s += w[j] * x(i, j);
        }
        y[i] = separable ? (s >= 0 ? 1 : -1) : (rng() % 2 ? 1 : -1);
      }
      y[0] = 1;
      y[1] = -1;
      svm::KernelSpec spec;
      spec.kind = kind;
      spec = spec.resolve(x);
      svm::SmoOptions opt;
      opt.C = cs[p % 3];
      opt.tol = tol;
      const auto model = svm::train_binary_smo(x, y, spec, opt);
      const auto alpha = full_alpha(x, y, model);
      ++problems;
      const std::string tag = std::string(svm::to_string(kind)) + " problem " + std::to_string(p);
      o.check(model.converged, tag + ": did not converge");

      double balance = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        balance += alpha[i] * y[i];
        o.check(alpha[i] >= 0.0 && alpha[i] <= opt.C + 1e-12, tag + ": alpha outside [0, C]");
        const double yf = y[i] * svm::decision_value(model, x.row(i));
        double violation = 0.0;
        if (alpha[i] <= 1e-8) violation = std::max(0.0, (1.0 - tol) - yf);
        else if (alpha[i] >= opt.C - 1e-8) violation = std::max(0.0, yf - (1.0 + tol));
        else violation = std::max(0.0, std::abs(yf - 1.0) - tol);
        worst_kkt = std::max(worst_kkt, violation);
        o.check(violation <= 0.0, tag + ": KKT violated at row " + std::to_string(i) + fmt(" (y f = %.6f)", yf));
      }
      o.check(std::abs(balance) <= 1e-6, tag + ": sum alpha y != 0");

      auto k = [&](std::size_t i, std::size_t j) { return ref_kernel(spec, x.row(i), x.row(j)); };
      const double trained = oracle::dual_objective(x, y, alpha, k);
      for (int r = 0; r < 200; ++r) {
        const auto a = oracle::random_feasible_alpha(y, opt.C, rng);
        const double other = oracle::dual_objective(x, y, a, k);
        worst_margin = std::min(worst_margin, trained - other);
        o.check(trained >= other, tag + fmt(": random feasible point beats trained objective (%.9g > %.9g)", other,
                                            trained));
      }
    }
  }

  // 1-D two-point problem with a linear kernel: f(x) = x - 1.
  FeatureMatrix x2 = FeatureMatrix::from_rows({{0.0}, {2.0}});
  const std::vector<int> y2{-1, 1};
  svm::KernelSpec lin{svm::KernelKind::Poly, 1.0, 1, 0.0};
  svm::SmoOptions o2;
  o2.C = 10.0;
  const auto m2 = svm::train_binary_smo(x2, y2, lin, o2);
  // boundary: f is affine here, so its root is -b / w with w = f(1) - f(0)
  const double f0 = svm::decision_value(m2, std::vector<double>{0.0});
  const double f1 = svm::decision_value(m2, std::vector<double>{1.0});
  const double boundary = -f0 / (f1 - f0);
  o.check(std::abs(boundary - 1.0) <= 1e-6, fmt("two-point boundary at %.9f", boundary));

  return std::to_string(problems) + fmt(" problems, worst KKT excess %.2g, min objective lead %.3g, boundary x=%.9f",
                                        worst_kkt, worst_margin, boundary);
}

// ---- C2 -------------------------------------------------------------------

FeatureMatrix random_signal(std::mt19937_64& rng, std::size_t n, std::size_t d, bool discrete) {
  FeatureMatrix s(n, d);
  std::normal_distribution<double> noise(0.0, 0.3);
  std::uniform_real_distribution<double> level(-3.0, 3.0);
  std::vector<double> cur(d);
  for (auto& c : cur) c = level(rng);
  for (std::size_t i = 0; i < n; ++i) {
    if (rng() % 12 == 0)
      for (auto& c : cur) c = level(rng);
    for (std::size_t j = 0; j < d; ++j) {
      s(i, j) = discrete ? static_cast<double>(rng() % 3) : cur[j] + noise(rng);
    }
  }
  return s;
}

std::string criterion_changepoints(Outcome& o) {
  std::mt19937_64 rng(777);
  std::size_t dynp_cases = 0, pelt_cases = 0, enumerated = 0;
  for (int c = 0; c < 50; ++c) {
    const std::size_t k = rng() % 5;
    const std::size_t m = 1 + rng() % 4;
    const std::size_t lo = (k + 1) * m;
    const std::size_t n = lo + rng() % (200 - lo + 1);
    const std::size_t d = 1 + rng() % 3;
    const auto s = random_signal(rng, n, d, c % 5 == 0);
    const auto got = segment::detect_changepoints_dynp(s, k, m);
    const auto want = oracle::brute_force_dynp(s, k, m);
    ++dynp_cases;
    std::ostringstream tag;
    tag << "dynp case " << c << " (n=" << n << ", k=" << k << ", m=" << m << ")";
    o.check(got == want.bkps, tag.str() + ": breakpoints differ from enumeration");
  }
  for (int c = 0; c < 50; ++c) {
    const std::size_t n = 2 + rng() % 59;  // 2..60
    const std::size_t m = 1 + rng() % 3;
    if (n < m) continue;
    const std::size_t d = 1 + rng() % 2;
    const auto s = random_signal(rng, n, d, c % 5 == 0);
    const double penalty = std::uniform_real_distribution<double>(0.0, 15.0)(rng);
    const auto got = segment::detect_changepoints_pelt(s, penalty, m);
    const auto want = oracle::optimal_partitioning(s, penalty, m);
    ++pelt_cases;
    std::ostringstream tag;
    tag << "pelt case " << c << " (n=" << n << ", m=" << m << ", pen=" << penalty << ")";
    o.check(got == want.bkps, tag.str() + ": breakpoints differ from the unpruned optimum");
    double cost = penalty * static_cast<double>(got.size());
    std::size_t prev = 0;
    for (std::size_t i = 0; i <= got.size(); ++i) {
      const std::size_t end = i < got.size() ? got[i] : n;
      cost += oracle::l2_cost(s, prev, end);
      prev = end;
    }
    if (n <= 16) {
      const auto brute = oracle::brute_force_penalized(s, penalty, m);
      ++enumerated;
      o.check(std::abs(cost - brute.cost) <= 1e-9 * (1.0 + std::abs(brute.cost)),
              tag.str() + ": penalised cost differs from subset enumeration");
    }
  }
  return std::to_string(dynp_cases) + " dynp signals match enumeration; " + std::to_string(pelt_cases) +
         " PELT signals match the exhaustive optimum (" + std::to_string(enumerated) + " by subset enumeration)";
}

// ---- C3 -------------------------------------------------------------------

std::string criterion_pca(Outcome& o) {
  std::mt19937_64 rng(31337);
  std::normal_distribution<double> g(0.0, 1.0);
  double worst = 0.0, worst_orth = 0.0;
  for (int c = 0; c < 50; ++c) {
    const std::size_t n = 5 + rng() % 16;  // 5..20
    FeatureMatrix x(n, 3);
    const double sx = 0.2 + 3.0 * std::abs(g(rng)), sy = 0.2 + 2.0 * std::abs(g(rng));
    for (std::size_t i = 0; i < n; ++i) {
      const double a = g(rng) * sx, b = g(rng) * sy, e = g(rng);
      x(i, 0) = a + 0.3 * b + 1.5;
      x(i, 1) = 0.5 * a - b - 2.0;
      x(i, 2) = 0.1 * a + e;
    }
    const auto model = preprocess::pca_fit(x, 3);
    const auto ref = oracle::jacobi_eigen(oracle::covariance(x));
    double trace = 0.0;
    for (double v : ref.values) trace += v;
    for (std::size_t k = 0; k < 3; ++k) {
      for (std::size_t j = 0; j < 3; ++j) {
        const double diff = std::abs(model.components[k][j] - ref.vectors[k][j]);
        worst = std::max(worst, diff);
        o.check(diff <= 1e-8, "matrix " + std::to_string(c) + ": component mismatch");
      }
      const double ediff = std::abs(model.explained_variance_ratio[k] - ref.values[k] / trace);
      worst = std::max(worst, ediff);
      o.check(ediff <= 1e-8, "matrix " + std::to_string(c) + ": explained variance mismatch");
      for (std::size_t l = 0; l < 3; ++l) {
        double dot = 0.0;
        for (std::size_t j = 0; j < 3; ++j) dot += model.components[k][j] * model.components[l][j];
        const double err = std::abs(dot - (k == l ? 1.0 : 0.0));
        worst_orth = std::max(worst_orth, err);
        o.check(err <= 1e-9, "matrix " + std::to_string(c) + ": components not orthonormal");
      }
    }
  }
  return fmt("50 matrices, max deviation from Jacobi %.2g, max orthonormality error %.2g", worst, worst_orth);
}

// ---- C4 -------------------------------------------------------------------

std::string criterion_metrics(Outcome& o) {
  {
    const std::vector<int> t{0, 1, 0}, p{0, 1, 0};
    const auto cm = eval::confusion_matrix(t, p, 2);
    o.check(cm.counts == std::vector<std::vector<std::size_t>>{{2, 0}, {0, 1}}, "diagonal confusion matrix");
  }
  const std::vector<int> t{1, 1, 1, 1, 1, 1, 0, 0, 0, 0}, p{1, 1, 1, 1, 0, 0, 0, 0, 0, 1};
  const auto cm = eval::confusion_matrix(t, p, 2);
  o.check(cm.counts == std::vector<std::vector<std::size_t>>{{3, 1}, {2, 4}}, "worked confusion matrix");
  const auto m = eval::binary_metrics(cm);
  o.check(std::abs(m.accuracy - 7.0 / 10.0) <= 1e-15, "accuracy != 0.7");
  o.check(std::abs(m.precision - 4.0 / 5.0) <= 1e-15, "precision != 0.8");
  o.check(std::abs(m.recall - 2.0 / 3.0) <= 1e-15, "recall != 2/3");
  o.check(std::abs(m.f1 - 8.0 / 11.0) <= 1e-15, "f1 != 8/11");
  const auto perfect = eval::binary_metrics(eval::confusion_matrix(t, t, 2));
  o.check(perfect.accuracy == 1.0 && perfect.precision == 1.0 && perfect.recall == 1.0 && perfect.f1 == 1.0,
          "perfect prediction metrics");
  const std::vector<int> none(t.size(), 0);
  const auto nopos = eval::binary_metrics(eval::confusion_matrix(t, none, 2));
  o.check(nopos.precision == 0.0 && nopos.precision_undefined && nopos.recall == 0.0,
          "no predicted positives: precision 0 flagged, recall 0");

  o.check(eval::roc_auc(std::vector<double>{0.9, 0.8, 0.7, 0.6}, std::vector<int>{1, 0, 1, 0}).auc == 0.75,
          "worked AUC != 0.75");
  o.check(eval::roc_auc(std::vector<double>{0.9, 0.8, 0.2, 0.1}, std::vector<int>{1, 1, 0, 0}).auc == 1.0,
          "perfect ranking AUC != 1");
  o.check(eval::roc_auc(std::vector<double>{0.4, 0.4, 0.4, 0.4}, std::vector<int>{1, 0, 1, 0}).auc == 0.5,
          "all-tie AUC != 0.5");

  std::mt19937_64 rng(99);
  double worst = 0.0;
  for (int c = 0; c < 50; ++c) {
    const std::size_t n = 2 + rng() % 19;
    std::vector<double> s(n);
    std::vector<int> l(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = c % 3 == 0 ? static_cast<double>(rng() % 4) : std::uniform_real_distribution<double>(-1, 1)(rng);
      l[i] = static_cast<int>(rng() % 2);
    }
    l[0] = 1;
    l[1] = 0;
    const double got = eval::roc_auc(s, l).auc;
    const double want = oracle::pairwise_auc(s, l);
    worst = std::max(worst, std::abs(got - want));
    o.check(std::abs(got - want) <= 1e-12, "random set " + std::to_string(c) + ": AUC differs from pairwise count");
  }
  return fmt("worked examples exact; 50 random AUCs within %.2g of pairwise concordance", worst);
}

// ---- C5 -------------------------------------------------------------------

std::string criterion_leakage(Outcome& o) {
  std::vector<std::string> ids;
  for (int i = 1; i <= 12; ++i) ids.push_back((i < 10 ? "P0" : "P") + std::to_string(i));
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto plan = eval::grouped_kfold(ids, 5, seed);
    std::vector<std::size_t> sizes;
    std::multiset<std::string> seen;
    for (std::size_t f = 0; f < plan.folds.size(); ++f) {
      sizes.push_back(plan.folds[f].size());
      const std::set<std::string> held(plan.folds[f].begin(), plan.folds[f].end());
      for (const auto& id : ids) {
        if (held.count(id)) continue;
        bool in_other = false;
        for (std::size_t g = 0; g < plan.folds.size(); ++g)
          if (g != f && std::count(plan.folds[g].begin(), plan.folds[g].end(), id)) in_other = true;
        o.check(in_other, "seed " + std::to_string(seed) + ": " + id + " missing from training side");
      }
      seen.insert(plan.folds[f].begin(), plan.folds[f].end());
    }
    for (const auto& id : ids)
      o.check(seen.count(id) == 1, "seed " + std::to_string(seed) + ": " + id + " not held out exactly once");
    std::sort(sizes.rbegin(), sizes.rend());
    o.check(sizes == std::vector<std::size_t>{3, 3, 2, 2, 2}, "seed " + std::to_string(seed) + ": fold sizes");
  }
  return "100 plans, every participant held out exactly once, sizes [3,3,2,2,2]";
}

// ---- C6 -------------------------------------------------------------------

fs::path scratch_dir(const char* name) {
  const auto dir = fs::temp_directory_path() / (std::string("strokelab_acceptance_") + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string criterion_end_to_end(Outcome& o) {
  const auto dir = scratch_dir("e2e");
  auto cfg = synth::default_config();
  cfg.seed = 42;
  synth::write_dataset(synth::generate_dataset(cfg), cfg, dir / "data");
  const auto data = pipeline::load_dataset_dir(dir / "data");
  pipeline::ExperimentConfig ec;
  ec.seed = 42;
  const auto report = pipeline::run_experiment(data, ec);
  const auto j = io::to_json(report);

  double rbf_cv = -1.0;
  for (const auto& k : report.skill)
    if (k.kind == svm::KernelKind::Rbf) rbf_cv = k.cross_validation.accuracy;
  o.check(rbf_cv >= 0.75, fmt("skill RBF CV accuracy %.4f < 0.75", rbf_cv));

  std::string aucs;
  double best = 0.0;
  o.check(report.phase.has_value() && report.phase->roc.size() == 5, "phase report lacks five ROC classes");
  if (report.phase) {
    for (const auto& c : report.phase->roc) {
      const double auc = c.roc ? c.roc->auc : -1.0;
      best = std::max(best, auc);
      aucs += fmt("%.3f ", auc);
      o.check(auc >= 0.75, fmt("phase class %.0f AUC %.4f < 0.75", c.cls, auc));
    }
  }
  o.check(best >= 0.85, fmt("no phase class reaches AUC 0.85 (best %.4f)", best));

  const auto& skill = j.at("skill");
  std::size_t cells = 0;
  o.check(skill.size() == 3, "skill block does not hold three kernels");
  for (const char* kernel : {"rbf", "poly", "sigmoid"}) {
    o.check(skill.contains(kernel), std::string("skill block lacks ") + kernel);
    if (!skill.contains(kernel)) continue;
    for (const char* phase : {"cross_validation", "testing"}) {
      for (const char* metric : {"accuracy", "precision", "recall", "f1"}) {
        const auto& v = skill.at(kernel).at(phase).at(metric);
        o.check(v.is_number() && v.get<double>() >= 0.0 && v.get<double>() <= 1.0,
                std::string(kernel) + "/" + phase + "/" + metric + " missing or outside [0,1]");
        ++cells;
      }
    }
  }
  o.check(cells == 24, "report does not contain 3 x 2 x 4 skill metrics");
  fs::remove_all(dir);
  return fmt("skill RBF CV accuracy %.4f; phase AUCs ", rbf_cv) + aucs + "; " + std::to_string(cells) +
         " skill metric cells";
}

// ---- C7 -------------------------------------------------------------------

std::string criterion_noiseless(Outcome& o) {
  auto cfg = synth::default_config();
  std::size_t exact = 0, total = 0;
  for (const auto* profile : {&cfg.intermediate, &cfg.beginner}) {
    auto p = *profile;
    p.noise = 0.0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      std::mt19937_64 rng(seed);
      const auto swing = synth::generate_swing(p, rng);
      const auto x = segment::euler_matrix(swing.frames, 0, swing.frames.size());
      const auto got = segment::segment_phases(x, p.min_seg_len);
      ++total;
      if (got.breakpoints == swing.truth.breakpoints) ++exact;
      else
        o.check(false, std::string(profile == &cfg.intermediate ? "intermediate" : "beginner") + " seed " +
                           std::to_string(seed) + ": breakpoints differ from truth");
    }
  }
  return std::to_string(exact) + "/" + std::to_string(total) +
         " noiseless swings (100 per skill profile) recovered exactly";
}

// ---- C8 -------------------------------------------------------------------

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string criterion_determinism(Outcome& o) {
  const auto dir = scratch_dir("determinism");
#ifdef STROKELAB_CLI_PATH
  const std::string cli = STROKELAB_CLI_PATH;
  auto sh = [&](const std::string& args) {
    const std::string cmd = "\"" + cli + "\" " + args + " > /dev/null";
    return std::system(cmd.c_str());
  };
  o.check(sh("synth --seed 42 --out \"" + (dir / "data").string() + "\"") == 0, "synth failed");
  for (const char* run : {"a", "b"}) {
    o.check(sh("evaluate --data \"" + (dir / "data").string() + "\" --folds 5 --seed 42 --out \"" +
               (dir / run / "report.json").string() + "\"") == 0,
            std::string("evaluate run ") + run + " failed");
  }
  const std::string mode = "two CLI evaluate runs";
#else
  auto cfg = synth::default_config();
  synth::write_dataset(synth::generate_dataset(cfg), cfg, dir / "data");
  for (const char* run : {"a", "b"}) {
    pipeline::ExperimentConfig ec;
    const auto report = pipeline::run_experiment(pipeline::load_dataset_dir(dir / "data"), ec);
    fs::create_directories(dir / run);
    std::ofstream(dir / run / "report.json", std::ios::binary) << io::to_json(report).dump(2) << "\n";
  }
  const std::string mode = "two library evaluations";
#endif
  const auto a = slurp(dir / "a" / "report.json");
  const auto b = slurp(dir / "b" / "report.json");
  o.check(!a.empty(), "report JSON is empty");
  o.check(a == b, "report JSON differs between runs");
  fs::remove_all(dir);
  return mode + " produced byte-identical report JSON (" + std::to_string(a.size()) + " bytes)";
}

}  // namespace

int main() {
  run("C1", "smo_correctness", 5.0, criterion_smo);
  run("C2", "changepoint_optimality", 30.0, criterion_changepoints);
  run("C3", "pca_oracle", 0.0, criterion_pca);
  run("C4", "metrics_oracle", 0.0, criterion_metrics);
  run("C5", "leakage_guard", 0.0, criterion_leakage);
  run("C6", "synthetic_end_to_end", 120.0, criterion_end_to_end);
  run("C7", "noiseless_phase_recovery", 0.0, criterion_noiseless);
  run("C8", "evaluate_determinism", 0.0, criterion_determinism);
  std::printf("%d of 8 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
