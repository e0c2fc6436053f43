// strokelab: synthetic data, ingestion, segmentation, training and evaluation
// of forehand swing recordings from the command line.

#include "strokelab/error.hpp"
#include "strokelab/pipeline.hpp"
#include "strokelab/serialize.hpp"
#include "strokelab/synth.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>

namespace fs = std::filesystem;
using namespace strokelab;

namespace {

enum Exit { kOk = 0, kUsage = 2, kData = 3, kRuntime = 4 };

int exit_code_for(Errc code) {
  switch (code) {
    case Errc::BadConfig:
    case Errc::BadProfile:
    case Errc::BadK:
      return kUsage;
    case Errc::IoError:
      return kRuntime;
    default:
      return kData;
  }
}

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(Errc::IoError, "cannot open " + path.string() + " for writing");
  out << text;
  if (!out) fail(Errc::IoError, "write failed for " + path.string());
}

void write_json(const fs::path& path, const nlohmann::ordered_json& j) { write_file(path, j.dump(2) + "\n"); }

void require_exists(const fs::path& p, const char* flag) {
  if (!fs::exists(p)) throw UsageError(std::string(flag) + ": path does not exist: " + p.string());
}

nlohmann::ordered_json read_json(const fs::path& p) {
  const auto text = ingest::read_text_file(p);
  try {
    return nlohmann::ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::BadFormat, p.string() + ": " + e.what());
  }
}

// Flags shared by segment, train and evaluate. Values only take effect when
// given, so --config supplies the base and explicit flags override it.
struct ExperimentFlags {
  std::string config_path;
  std::uint64_t seed = 0;
  std::string task, kernel, gamma, features, phase_labels, segment_on;
  double c = 1.0, test_frac = 0.2, threshold_frac = 0.4;
  std::size_t folds = 5, max_train_rows = 0, min_seg_len = 3, refractory = 30, pre = 40, post = 60, min_swing = 15;
  bool all_sessions = false;
  std::map<std::string, CLI::Option*> opts;

  bool given(const std::string& name) const {
    auto it = opts.find(name);
    return it != opts.end() && it->second->count() > 0;
  }
};

void add_segment_flags(CLI::App* app, ExperimentFlags& f) {
  f.opts["threshold-frac"] = app->add_option("--threshold-frac", f.threshold_frac,
                                             "Swing peak threshold as a fraction of the recording's maximum speed");
  f.opts["refractory"] = app->add_option("--refractory", f.refractory, "Minimum frames between swing peaks");
  f.opts["pre-frames"] = app->add_option("--pre-frames", f.pre, "Frames kept before a swing peak");
  f.opts["post-frames"] = app->add_option("--post-frames", f.post, "Frames kept after a swing peak");
  f.opts["min-swing-len"] = app->add_option("--min-swing-len", f.min_swing, "Shortest swing window kept");
  f.opts["min-seg-len"] = app->add_option("--min-seg-len", f.min_seg_len, "Shortest phase segment in frames");
  f.opts["segment-on"] = app->add_option("--segment-on", f.segment_on, "Signal for phase segmentation")
                             ->check(CLI::IsMember({"pca", "raw"}));
  app->add_flag("--all-sessions", f.all_sessions, "Include backhand sessions");
}

void add_model_flags(CLI::App* app, ExperimentFlags& f, bool allow_all) {
  f.opts["task"] = app->add_option("--task", f.task, "skill, phase" + std::string(allow_all ? " or both" : ""))
                       ->check(allow_all ? CLI::IsMember({"skill", "phase", "both"}) : CLI::IsMember({"skill", "phase"}));
  f.opts["kernel"] =
      app->add_option("--kernel", f.kernel, allow_all ? "rbf, poly, sigmoid or all" : "rbf, poly or sigmoid")
          ->check(allow_all ? CLI::IsMember({"rbf", "poly", "sigmoid", "all"}) : CLI::IsMember({"rbf", "poly", "sigmoid"}));
  f.opts["c"] = app->add_option("--c", f.c, "SVM regularisation constant");
  f.opts["gamma"] = app->add_option("--gamma", f.gamma, "Kernel gamma: a positive number or 'scale'");
  f.opts["features"] = app->add_option("--features", f.features, "frames or aggregates")
                           ->check(CLI::IsMember({"frames", "aggregates"}));
  f.opts["phase-labels"] = app->add_option("--phase-labels", f.phase_labels,
                                           "Phase label source: auto (truth when present), truth or detector")
                               ->check(CLI::IsMember({"auto", "truth", "detector"}));
  f.opts["max-train-rows"] =
      app->add_option("--max-train-rows", f.max_train_rows, "Cap on SVM training rows per model (0 = no cap)");
}

pipeline::ExperimentConfig build_config(const ExperimentFlags& f) {
  pipeline::ExperimentConfig c;
  if (!f.config_path.empty()) c = pipeline::experiment_config_from_json(read_json(f.config_path), c);
  if (f.given("seed")) c.seed = f.seed;
  if (f.given("task")) {
    c.run_skill = f.task != "phase";
    c.run_phase = f.task != "skill";
  }
  if (f.given("kernel")) {
    if (f.kernel == "all") {
      c.kernels = {svm::KernelKind::Rbf, svm::KernelKind::Poly, svm::KernelKind::Sigmoid};
    } else {
      c.kernels = {svm::parse_kernel_kind(f.kernel)};
      c.phase_kernel = c.kernels.front();
    }
  }
  if (f.given("c")) c.model.smo.C = f.c;
  if (f.given("gamma")) {
    if (f.gamma == "scale") {
      c.model.kernel.gamma.reset();
    } else {
      try {
        std::size_t used = 0;
        const double g = std::stod(f.gamma, &used);
        if (used != f.gamma.size()) throw std::invalid_argument(f.gamma);
        c.model.kernel.gamma = g;
      } catch (const std::logic_error&) {
        throw UsageError("--gamma: expected a positive number or 'scale', got '" + f.gamma + "'");
      }
    }
  }
  if (f.given("folds")) c.folds = f.folds;
  if (f.given("test-frac")) c.test_frac = f.test_frac;
  if (f.given("features")) c.features.mode = pipeline::parse_feature_mode(f.features);
  if (f.given("phase-labels")) c.features.phase_labels = pipeline::parse_phase_labels(f.phase_labels);
  if (f.given("max-train-rows")) c.model.max_train_rows = f.max_train_rows;
  if (f.given("threshold-frac")) c.features.swing.threshold_frac = f.threshold_frac;
  if (f.given("refractory")) c.features.swing.refractory = f.refractory;
  if (f.given("pre-frames")) c.features.swing.pre_frames = f.pre;
  if (f.given("post-frames")) c.features.swing.post_frames = f.post;
  if (f.given("min-swing-len")) c.features.swing.min_swing_len = f.min_swing;
  if (f.given("min-seg-len")) c.features.min_seg_len = f.min_seg_len;
  if (f.given("segment-on")) c.features.segment_on_pca = f.segment_on == "pca";
  pipeline::validate(c);
  return c;
}

ingest::LoadOptions load_options(const ExperimentFlags& f) {
  ingest::LoadOptions o;
  o.forehand_only = !f.all_sessions;
  return o;
}

void warn_all(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
}

int cmd_synth(const std::string& config_path, std::uint64_t seed, const fs::path& out) {
  synth::SynthConfig cfg = synth::default_config();
  if (!config_path.empty()) cfg = synth::config_from_json(read_json(config_path), cfg);
  cfg.seed = seed;
  cfg.validate();
  const auto data = synth::generate_dataset(cfg);
  synth::write_dataset(data, cfg, out);
  std::cout << "wrote " << data.recordings.size() << " recordings to " << out.string() << '\n';
  return kOk;
}

int cmd_ingest(const fs::path& data_path, const fs::path& out, bool all_sessions, std::size_t max_gap,
               std::size_t window, bool no_smoothing) {
  ingest::LoadOptions opts;
  opts.forehand_only = !all_sessions;
  opts.cleaning.max_gap = max_gap;
  opts.cleaning.smoothing_window = window;
  opts.cleaning.smoothing = !no_smoothing;
  const auto data = pipeline::load_dataset_dir(data_path, opts);
  warn_all(data.warnings);
  write_json(out, io::dataset_to_json(data));
  std::cout << "wrote " << data.recordings.size() << " recordings to " << out.string() << '\n';
  return kOk;
}

int cmd_segment(const fs::path& data_path, const fs::path& out, const ExperimentFlags& f) {
  const auto cfg = build_config(f);
  const auto data = pipeline::load_dataset_dir(data_path, load_options(f));
  warn_all(data.warnings);
  std::vector<std::string> warnings;
  const auto segs = pipeline::segment_dataset(data, cfg.features, &warnings);
  warn_all(warnings);

  write_json(out / "segments.json", io::to_json(segs));
  std::map<std::pair<std::string, ingest::Session>, const ingest::Recording*> by_key;
  for (const auto& r : data.recordings) by_key[{r.participant_id, r.session}] = &r;
  for (const auto& s : segs) {
    const auto* rec = by_key.at({s.participant_id, s.session});
    char name[128];
    std::snprintf(name, sizeof name, "%s_%s_%03zu.csv", s.participant_id.c_str(),
                  std::string(ingest::to_string(s.session)).c_str(), s.swing_index);
    write_file(out / "plots" / name, io::swing_plot_csv(*rec, s));
  }
  std::cout << "segmented " << segs.size() << " swings into " << out.string() << '\n';
  return kOk;
}

int cmd_train(const fs::path& data_path, const fs::path& out, const ExperimentFlags& f) {
  if (!f.given("task")) throw UsageError("train: --task skill|phase is required");
  auto cfg = build_config(f);
  const auto task = pipeline::parse_task(f.task);
  const auto data = pipeline::load_dataset_dir(data_path, load_options(f));
  warn_all(data.warnings);

  const auto samples = task == pipeline::Task::Skill ? pipeline::build_skill_samples(data, cfg.features)
                                                     : pipeline::build_phase_samples(data, cfg.features);
  if (samples.x.rows == 0) fail(Errc::NoSwingsFound, "no training rows could be built from the dataset");
  auto mc = cfg.model;
  mc.kernel.kind = task == pipeline::Task::Skill ? cfg.kernels.front() : cfg.phase_kernel;
  const auto bundle = pipeline::train_bundle(samples, task, cfg.features.mode, mc, cfg.seed);

  auto j = io::to_json(bundle);
  j["config"] = pipeline::experiment_config_to_json(cfg);
  j["seed"] = cfg.seed;
  write_json(out, j);
  std::cout << "trained " << pipeline::to_string(task) << " model on " << samples.x.rows << " rows, wrote "
            << out.string() << '\n';
  return kOk;
}

int cmd_evaluate(const fs::path& data_path, const fs::path& out, const ExperimentFlags& f) {
  const auto cfg = build_config(f);
  const auto data = pipeline::load_dataset_dir(data_path, load_options(f));
  warn_all(data.warnings);
  const auto report = pipeline::run_experiment(data, cfg);
  const auto j = io::to_json(report);
  write_json(out, j);

  const fs::path dir = out.has_parent_path() ? out.parent_path() : fs::path(".");
  const std::string stem = out.stem().string();
  if (!report.skill.empty()) write_file(dir / (stem + "_metrics.csv"), io::metrics_csv(j));
  for (const auto& [kernel, block] : j.at("skill").items()) {
    write_file(dir / (stem + "_skill_confusion_" + kernel + ".csv"),
               io::matrix_csv(block.at("testing_confusion_matrix"), "skill"));
  }
  if (report.phase) {
    const auto& ph = j.at("phase");
    write_file(dir / (stem + "_phase_confusion.csv"), io::matrix_csv(ph.at("confusion_matrix"), "phase"));
    for (const auto& c : ph.at("roc")) {
      write_file(dir / (stem + "_roc_class" + std::to_string(c.at("class").get<int>()) + ".csv"), io::roc_csv(c));
    }
  }
  std::cout << io::render_report_text(j);
  return kOk;
}

int cmd_report(const fs::path& in, const std::string& out) {
  const auto text = io::render_report_text(read_json(in));
  if (out.empty()) std::cout << text;
  else write_file(out, text);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"strokelab: tennis forehand IMU swing analysis"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "strokelab 0.1.0");

  std::string data_path, out_path, config_path, report_in;
  std::uint64_t seed = 0;
  std::size_t max_gap = 3, window = 5;
  bool no_smoothing = false;
  ExperimentFlags seg_flags, train_flags, eval_flags;
  bool all_sessions = false;

  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic labelled dataset");
  synth_cmd->add_option("--seed", seed, "Random seed")->required();
  synth_cmd->add_option("--out", out_path, "Output directory")->required();
  synth_cmd->add_option("--config", config_path, "Generator config JSON (overrides bundled defaults)");

  auto* ingest_cmd = app.add_subcommand("ingest", "Load, validate and clean a dataset into one JSON document");
  ingest_cmd->add_option("--data", data_path, "Dataset directory or manifest.json")->required();
  ingest_cmd->add_option("--out", out_path, "Output JSON path")->required();
  ingest_cmd->add_option("--seed", seed, "Accepted for uniformity; ingestion is deterministic");
  ingest_cmd->add_option("--max-gap", max_gap, "Longest run of missing frames to interpolate");
  ingest_cmd->add_option("--smooth-window", window, "Odd moving-average window");
  ingest_cmd->add_flag("--no-smoothing", no_smoothing, "Skip moving-average smoothing");
  ingest_cmd->add_flag("--all-sessions", all_sessions, "Include backhand sessions");

  auto* segment_cmd = app.add_subcommand("segment", "Detect swings and their five phases");
  segment_cmd->add_option("--data", data_path, "Dataset directory or manifest.json")->required();
  segment_cmd->add_option("--out", out_path, "Output directory")->required();
  segment_cmd->add_option("--config", seg_flags.config_path, "Experiment config JSON");
  seg_flags.opts["seed"] = segment_cmd->add_option("--seed", seg_flags.seed, "Accepted for uniformity; segmentation is deterministic");
  add_segment_flags(segment_cmd, seg_flags);

  auto* train_cmd = app.add_subcommand("train", "Fit a skill or phase model on a whole dataset");
  train_cmd->add_option("--data", data_path, "Dataset directory or manifest.json")->required();
  train_cmd->add_option("--out", out_path, "Output bundle JSON")->required();
  train_cmd->add_option("--config", train_flags.config_path, "Experiment config JSON");
  auto* train_seed = train_cmd->add_option("--seed", train_flags.seed, "Random seed")->required();
  add_model_flags(train_cmd, train_flags, false);
  add_segment_flags(train_cmd, train_flags);

  auto* eval_cmd = app.add_subcommand("evaluate", "Holdout plus grouped k-fold evaluation");
  eval_cmd->add_option("--data", data_path, "Dataset directory or manifest.json")->required();
  eval_cmd->add_option("--out", out_path, "Output report JSON (CSV companions are written beside it)")->required();
  eval_cmd->add_option("--config", eval_flags.config_path, "Experiment config JSON");
  auto* eval_seed = eval_cmd->add_option("--seed", eval_flags.seed, "Random seed")->required();
  eval_flags.opts["folds"] = eval_cmd->add_option("--folds", eval_flags.folds, "Cross-validation folds");
  eval_flags.opts["test-frac"] = eval_cmd->add_option("--test-frac", eval_flags.test_frac, "Held-out participant fraction");
  add_model_flags(eval_cmd, eval_flags, true);
  add_segment_flags(eval_cmd, eval_flags);

  auto* report_cmd = app.add_subcommand("report", "Render a report JSON as text");
  report_cmd->add_option("--in,report", report_in, "Report JSON")->required();
  report_cmd->add_option("--out", out_path, "Text output path (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
  train_flags.opts["seed"] = train_seed;
  eval_flags.opts["seed"] = eval_seed;

  try {
    if (synth_cmd->parsed()) {
      if (!config_path.empty()) require_exists(config_path, "--config");
      return cmd_synth(config_path, seed, out_path);
    }
    if (ingest_cmd->parsed()) {
      require_exists(data_path, "--data");
      return cmd_ingest(data_path, out_path, all_sessions, max_gap, window, no_smoothing);
    }
    if (segment_cmd->parsed()) {
      require_exists(data_path, "--data");
      if (!seg_flags.config_path.empty()) require_exists(seg_flags.config_path, "--config");
      return cmd_segment(data_path, out_path, seg_flags);
    }
    if (train_cmd->parsed()) {
      require_exists(data_path, "--data");
      if (!train_flags.config_path.empty()) require_exists(train_flags.config_path, "--config");
      return cmd_train(data_path, out_path, train_flags);
    }
    if (eval_cmd->parsed()) {
      require_exists(data_path, "--data");
      if (!eval_flags.config_path.empty()) require_exists(eval_flags.config_path, "--config");
      return cmd_evaluate(data_path, out_path, eval_flags);
    }
    if (report_cmd->parsed()) {
      require_exists(report_in, "--in");
      return cmd_report(report_in, out_path);
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntime;
  }
  return kUsage;
}
