#include "strokelab/serialize.hpp"

#include "strokelab/error.hpp"

#include <cstdio>
#include <sstream>

namespace strokelab::io {

namespace {

template <typename F>
auto guarded(const char* what, F&& f) {
  try {
    return f();
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::BadFormat, std::string(what) + ": " + e.what());
  }
}

ordered_json metrics_json(const eval::BinaryMetrics& m) {
  ordered_json j;
  j["accuracy"] = m.accuracy;
  j["precision"] = m.precision;
  j["recall"] = m.recall;
  j["f1"] = m.f1;
  ordered_json undefined = ordered_json::array();
  if (m.accuracy_undefined) undefined.push_back("accuracy");
  if (m.precision_undefined) undefined.push_back("precision");
  if (m.recall_undefined) undefined.push_back("recall");
  if (m.f1_undefined) undefined.push_back("f1");
  if (!undefined.empty()) j["undefined"] = undefined;
  return j;
}

ordered_json cm_json(const eval::ConfusionMatrix& cm) { return cm.counts; }

std::string fmt(double v, const char* spec = "%.3f") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

}  // namespace

ordered_json to_json(const preprocess::PcaModel& m) {
  ordered_json j;
  j["mean"] = m.mean;
  j["components"] = m.components;
  j["explained_variance_ratio"] = m.explained_variance_ratio;
  return j;
}

preprocess::PcaModel pca_from_json(const nlohmann::json& j) {
  return guarded("PCA model", [&] {
    preprocess::PcaModel m;
    m.mean = j.at("mean").get<std::vector<double>>();
    m.components = j.at("components").get<std::vector<std::vector<double>>>();
    m.explained_variance_ratio = j.at("explained_variance_ratio").get<std::vector<double>>();
    for (const auto& c : m.components) {
      if (c.size() != m.mean.size()) fail(Errc::BadFormat, "PCA component length differs from mean length");
    }
    if (m.explained_variance_ratio.size() != m.components.size())
      fail(Errc::BadFormat, "explained_variance_ratio length differs from component count");
    return m;
  });
}

ordered_json to_json(const preprocess::Standardizer& s) {
  ordered_json j;
  j["mean"] = s.mean;
  j["std"] = s.std;
  return j;
}

preprocess::Standardizer standardizer_from_json(const nlohmann::json& j) {
  return guarded("standardizer", [&] {
    preprocess::Standardizer s;
    s.mean = j.at("mean").get<std::vector<double>>();
    s.std = j.at("std").get<std::vector<double>>();
    if (s.mean.size() != s.std.size()) fail(Errc::BadFormat, "standardizer mean/std lengths differ");
    return s;
  });
}

ordered_json to_json(const svm::KernelSpec& k) {
  ordered_json j;
  j["kind"] = svm::to_string(k.kind);
  if (k.gamma) j["gamma"] = *k.gamma;
  else j["gamma"] = "scale";
  j["degree"] = k.degree;
  j["coef0"] = k.coef0;
  return j;
}

svm::KernelSpec kernel_from_json(const nlohmann::json& j) {
  return guarded("kernel", [&] {
    svm::KernelSpec k;
    k.kind = svm::parse_kernel_kind(j.at("kind").get<std::string>());
    const auto& g = j.at("gamma");
    if (g.is_string()) {
      if (g.get<std::string>() != "scale") fail(Errc::BadFormat, "gamma must be a number or \"scale\"");
    } else {
      k.gamma = g.get<double>();
    }
    k.degree = j.value("degree", 3);
    k.coef0 = j.value("coef0", 0.0);
    return k;
  });
}

ordered_json to_json(const svm::SvmModel& m) {
  ordered_json j;
  j["kernel"] = to_json(m.kernel);
  j["C"] = m.C;
  std::vector<std::vector<double>> sv(m.support_vectors.rows);
  for (std::size_t i = 0; i < sv.size(); ++i) {
    auto r = m.support_vectors.row(i);
    sv[i].assign(r.begin(), r.end());
  }
  j["support_vectors"] = sv;
  j["dual_coefs"] = m.dual_coefs;
  j["bias"] = m.bias;
  j["converged"] = m.converged;
  return j;
}

svm::SvmModel svm_from_json(const nlohmann::json& j) {
  return guarded("SVM model", [&] {
    svm::SvmModel m;
    m.kernel = kernel_from_json(j.at("kernel"));
    m.C = j.at("C").get<double>();
    m.support_vectors = FeatureMatrix::from_rows(j.at("support_vectors").get<std::vector<std::vector<double>>>());
    m.dual_coefs = j.at("dual_coefs").get<std::vector<double>>();
    m.bias = j.at("bias").get<double>();
    m.converged = j.value("converged", true);
    if (m.dual_coefs.size() != m.support_vectors.rows)
      fail(Errc::BadFormat, "dual_coefs length differs from support vector count");
    return m;
  });
}

ordered_json to_json(const svm::MultiClassModel& m) {
  ordered_json arr = ordered_json::array();
  for (std::size_t c = 0; c < m.size(); ++c) {
    ordered_json o;
    o["class"] = m.classes[c];
    if (m.models[c]) {
      o["usable"] = true;
      o["model"] = to_json(*m.models[c]);
    } else {
      o["usable"] = false;
    }
    arr.push_back(std::move(o));
  }
  ordered_json j;
  j["scheme"] = "one_vs_rest";
  j["models"] = arr;
  return j;
}

svm::MultiClassModel multiclass_from_json(const nlohmann::json& j) {
  return guarded("multi-class model", [&] {
    svm::MultiClassModel m;
    for (const auto& o : j.at("models")) {
      m.classes.push_back(o.at("class").get<int>());
      if (o.at("usable").get<bool>()) m.models.emplace_back(svm_from_json(o.at("model")));
      else m.models.emplace_back(std::nullopt);
    }
    return m;
  });
}

ordered_json to_json(const pipeline::PipelineBundle& b) {
  ordered_json j;
  j["task"] = pipeline::to_string(b.task);
  j["features"] = pipeline::to_string(b.features);
  j["standardizer"] = to_json(b.preprocessor.standardizer);
  j["pca"] = to_json(b.preprocessor.pca);
  if (b.binary) j["model"] = to_json(*b.binary);
  if (b.multiclass) j["model"] = to_json(*b.multiclass);
  return j;
}

pipeline::PipelineBundle bundle_from_json(const nlohmann::json& j) {
  return guarded("pipeline bundle", [&] {
    pipeline::PipelineBundle b;
    b.task = pipeline::parse_task(j.at("task").get<std::string>());
    b.features = pipeline::parse_feature_mode(j.at("features").get<std::string>());
    b.preprocessor.standardizer = standardizer_from_json(j.at("standardizer"));
    b.preprocessor.pca = pca_from_json(j.at("pca"));
    if (b.task == pipeline::Task::Skill) b.binary = svm_from_json(j.at("model"));
    else b.multiclass = multiclass_from_json(j.at("model"));
    return b;
  });
}

ordered_json to_json(const pipeline::EvaluationReport& r) {
  ordered_json j;
  ordered_json skill = ordered_json::object();
  for (const auto& k : r.skill) {
    ordered_json o;
    o["cross_validation"] = metrics_json(k.cross_validation);
    o["testing"] = metrics_json(k.testing);
    o["testing_confusion_matrix"] = cm_json(k.testing_confusion);
    ordered_json folds = ordered_json::array();
    for (const auto& f : k.fold_metrics) folds.push_back(metrics_json(f));
    o["fold_metrics"] = folds;
    skill[std::string(svm::to_string(k.kind))] = o;
  }
  j["skill"] = skill;

  if (r.phase) {
    const auto& p = *r.phase;
    ordered_json ph;
    ph["confusion_matrix"] = p.mean_confusion;
    ordered_json roc = ordered_json::array();
    for (const auto& c : p.roc) {
      ordered_json o;
      o["class"] = c.cls;
      if (c.roc) {
        o["auc"] = c.roc->auc;
        ordered_json curve = ordered_json::array();
        for (const auto& pt : c.roc->curve) curve.push_back({pt.fpr, pt.tpr});
        o["curve"] = curve;
      } else {
        o["auc"] = nullptr;
        o["curve"] = ordered_json::array();
      }
      roc.push_back(std::move(o));
    }
    ph["roc"] = roc;
    ph["kernel"] = svm::to_string(p.kernel);
    ph["cross_validation_accuracy"] = p.cross_validation_accuracy;
    ph["testing_accuracy"] = p.testing_accuracy;
    ph["testing_confusion_matrix"] = cm_json(p.testing_confusion);
    j["phase"] = ph;
  } else {
    j["phase"] = nullptr;
  }
  j["config"] = r.config;
  j["seed"] = r.seed;
  ordered_json split;
  split["train_val"] = r.split.train_val;
  split["test"] = r.split.test;
  split["folds"] = r.folds.folds;
  j["participants"] = split;
  return j;
}

ordered_json to_json(const std::vector<pipeline::SwingSegmentation>& segs) {
  ordered_json arr = ordered_json::array();
  for (const auto& s : segs) {
    ordered_json o;
    o["participant_id"] = s.participant_id;
    o["swing_index"] = s.swing_index;
    o["breakpoints"] = s.phases.breakpoints;
    o["phases"] = s.phases.frame_phases();
    o["session"] = ingest::to_string(s.session);
    o["start"] = s.window.start;
    o["end"] = s.window.end;
    arr.push_back(std::move(o));
  }
  return arr;
}

ordered_json dataset_to_json(const pipeline::Dataset& d) {
  ordered_json recs = ordered_json::array();
  for (const auto& r : d.recordings) {
    ordered_json o;
    o["participant_id"] = r.participant_id;
    o["skill"] = ingest::to_string(r.skill);
    o["handedness"] = ingest::to_string(r.handedness);
    o["session"] = ingest::to_string(r.session);
    ordered_json frames = ordered_json::array();
    for (const auto& f : r.frames) frames.push_back({f.t, f.yaw, f.roll, f.pitch});
    o["frames"] = frames;
    recs.push_back(std::move(o));
  }
  ordered_json j;
  j["recordings"] = recs;
  j["warnings"] = d.warnings;
  return j;
}

std::string metrics_csv(const ordered_json& report) {
  std::ostringstream out;
  out << "evaluation,kernel,accuracy,precision,recall,f1\n";
  const auto& skill = report.at("skill");
  for (const char* phase : {"cross_validation", "testing"}) {
    for (const auto& [kernel, block] : skill.items()) {
      const auto& m = block.at(phase);
      out << phase << ',' << kernel << ',' << fmt(m.at("accuracy").get<double>(), "%.6f") << ','
          << fmt(m.at("precision").get<double>(), "%.6f") << ',' << fmt(m.at("recall").get<double>(), "%.6f") << ','
          << fmt(m.at("f1").get<double>(), "%.6f") << '\n';
    }
  }
  return out.str();
}

std::string roc_csv(const ordered_json& class_roc) {
  std::ostringstream out;
  out << "fpr,tpr\n";
  for (const auto& pt : class_roc.at("curve")) {
    out << fmt(pt.at(0).get<double>(), "%.9g") << ',' << fmt(pt.at(1).get<double>(), "%.9g") << '\n';
  }
  return out.str();
}

std::string matrix_csv(const ordered_json& matrix, std::string_view label_prefix) {
  std::ostringstream out;
  out << "true\\predicted";
  const std::size_t k = matrix.size();
  for (std::size_t c = 0; c < k; ++c) out << ',' << label_prefix << c;
  out << '\n';
  for (std::size_t r = 0; r < k; ++r) {
    out << label_prefix << r;
    for (const auto& v : matrix.at(r)) out << ',' << fmt(v.get<double>(), "%.6g");
    out << '\n';
  }
  return out.str();
}

std::string swing_plot_csv(const ingest::Recording& r, const pipeline::SwingSegmentation& seg) {
  std::ostringstream out;
  out << "frame,t,yaw,roll,pitch,phase\n";
  const auto phases = seg.phases.frame_phases();
  for (std::size_t i = seg.window.start; i < seg.window.end && i < r.frames.size(); ++i) {
    const auto& f = r.frames[i];
    out << i << ',' << fmt(f.t, "%.6f") << ',' << fmt(f.yaw, "%.9g") << ',' << fmt(f.roll, "%.9g") << ','
        << fmt(f.pitch, "%.9g") << ',' << phases[i - seg.window.start] << '\n';
  }
  return out.str();
}

std::string render_report_text(const ordered_json& report) {
  return guarded("report", [&] {
    std::ostringstream out;
    out << "Skill classification (beginner vs intermediate)\n";
    out << "  evaluation        kernel    accuracy  precision  recall  f1\n";
    const auto& skill = report.at("skill");
    for (const char* phase : {"cross_validation", "testing"}) {
      for (const auto& [kernel, block] : skill.items()) {
        const auto& m = block.at(phase);
        char line[160];
        std::snprintf(line, sizeof line, "  %-17s %-9s %-9.3f %-10.3f %-7.3f %.3f\n", phase, kernel.c_str(),
                      m.at("accuracy").get<double>(), m.at("precision").get<double>(), m.at("recall").get<double>(),
                      m.at("f1").get<double>());
        out << line;
      }
    }
    for (const auto& [kernel, block] : skill.items()) {
      if (!block.contains("testing_confusion_matrix")) continue;
      const auto& cm = block.at("testing_confusion_matrix");
      out << "  testing confusion (" << kernel << "), rows true 0/1, cols predicted 0/1: ";
      out << cm.dump() << '\n';
    }

    const auto& phase = report.at("phase");
    if (!phase.is_null()) {
      out << "\nPhase classification (" << phase.value("kernel", std::string("rbf")) << ", one-vs-rest)\n";
      if (phase.contains("cross_validation_accuracy"))
        out << "  cross-validation accuracy " << fmt(phase.at("cross_validation_accuracy").get<double>()) << '\n';
      if (phase.contains("testing_accuracy"))
        out << "  testing accuracy          " << fmt(phase.at("testing_accuracy").get<double>()) << '\n';
      out << "  mean fold confusion matrix (rows true, cols predicted):\n";
      for (const auto& row : phase.at("confusion_matrix")) {
        out << "   ";
        for (const auto& v : row) out << ' ' << fmt(v.get<double>(), "%8.1f");
        out << '\n';
      }
      out << "  per-class ROC AUC (testing):";
      for (const auto& c : phase.at("roc")) {
        out << "  class " << c.at("class").get<int>() << ": ";
        out << (c.at("auc").is_null() ? std::string("n/a") : fmt(c.at("auc").get<double>()));
      }
      out << '\n';
    }
    if (report.contains("seed")) out << "\nseed " << report.at("seed").dump() << '\n';
    return out.str();
  });
}

}  // namespace strokelab::io
