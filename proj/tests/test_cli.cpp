#include <doctest.h>

#include <nlohmann/json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

const fs::path kRoot = fs::temp_directory_path() / "strokelab_test_cli";

int run(const std::string& args) {
  const std::string cmd = std::string("\"") + STROKELAB_CLI_PATH + "\" " + args + " > \"" +
                          (kRoot / "stdout.txt").string() + "\" 2> \"" + (kRoot / "stderr.txt").string() + "\"";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string q(const fs::path& p) { return "\"" + p.string() + "\""; }

// Small dataset shared by the tests below.
const fs::path& dataset() {
  static const fs::path dir = [] {
    fs::remove_all(kRoot);
    fs::create_directories(kRoot);
    std::ofstream(kRoot / "synth.json") << R"({"n_participants": 6, "session_swings": [3, 3, 4]})";
    const auto d = kRoot / "data";
    REQUIRE(run("synth --seed 5 --out " + q(d) + " --config " + q(kRoot / "synth.json")) == 0);
    return d;
  }();
  return dir;
}

}  // namespace

TEST_CASE("usage errors exit with code 2") {
  fs::create_directories(kRoot);
  CHECK(run("") == 2);
  CHECK(run("evaluate --data d --out r.json --seed 1 --bogus") == 2);
  CHECK(slurp(kRoot / "stderr.txt").find("--bogus") != std::string::npos);
  CHECK(run("frobnicate") == 2);
  CHECK(run("synth --out x") == 2);  // seed is mandatory
  CHECK(run("evaluate --data " + q(kRoot / "missing") + " --seed 1 --out r.json") == 2);
  CHECK(run("evaluate --data " + q(dataset()) + " --seed 1 --out r.json --gamma fast") == 2);
  CHECK(run("evaluate --data " + q(dataset()) + " --seed 1 --out r.json --kernel linear") == 2);
  CHECK(run("evaluate --data " + q(dataset()) + " --seed 1 --out r.json --folds 1") == 2);
  CHECK(run("train --data " + q(dataset()) + " --seed 1 --out b.json") == 2);  // --task required
}

TEST_CASE("ingest and segment write their outputs") {
  const auto out = kRoot / "ingest.json";
  REQUIRE(run("ingest --data " + q(dataset()) + " --out " + q(out)) == 0);
  const auto j = nlohmann::json::parse(slurp(out));
  CHECK(j.at("recordings").size() == 18);

  const auto seg = kRoot / "seg";
  REQUIRE(run("segment --data " + q(dataset()) + " --out " + q(seg)) == 0);
  const auto segs = nlohmann::json::parse(slurp(seg / "segments.json"));
  CHECK(segs.size() == 60);
  CHECK(segs.at(0).at("breakpoints").size() == 4);
  std::size_t plots = 0;
  for (const auto& e : fs::directory_iterator(seg / "plots")) plots += e.path().extension() == ".csv";
  CHECK(plots == 60);
  const auto first = slurp(seg / "plots" / "P01_forehand10a_000.csv");
  CHECK(first.rfind("frame,t,yaw,roll,pitch,phase\n", 0) == 0);
}

TEST_CASE("evaluate writes the report family and report renders it") {
  const auto out = kRoot / "eval" / "report.json";
  REQUIRE(run("evaluate --data " + q(dataset()) + " --folds 2 --test-frac 0.34 --seed 3 --max-train-rows 300 --out " +
              q(out)) == 0);
  const auto j = nlohmann::json::parse(slurp(out));
  CHECK(j.at("skill").size() == 3);
  CHECK(j.at("config").at("folds") == 2);
  CHECK(j.at("seed") == 3);
  const auto dir = out.parent_path();
  CHECK(fs::exists(dir / "report_metrics.csv"));
  CHECK(fs::exists(dir / "report_phase_confusion.csv"));
  CHECK(fs::exists(dir / "report_skill_confusion_rbf.csv"));
  for (int c = 0; c < 5; ++c) CHECK(fs::exists(dir / ("report_roc_class" + std::to_string(c) + ".csv")));

  REQUIRE(run("report --in " + q(out)) == 0);
  const auto printed = slurp(kRoot / "stdout.txt");
  CHECK(printed.find("Phase classification") != std::string::npos);
  REQUIRE(run("report " + q(out) + " --out " + q(kRoot / "report.txt")) == 0);
  CHECK(slurp(kRoot / "report.txt") == printed);
}

TEST_CASE("flags override the config file") {
  std::ofstream(kRoot / "exp.json") << R"({"folds": 3, "C": 2.0, "kernels": ["poly"], "tasks": ["skill"]})";
  const auto out = kRoot / "cfg" / "report.json";
  REQUIRE(run("evaluate --data " + q(dataset()) + " --config " + q(kRoot / "exp.json") +
              " --folds 2 --test-frac 0.34 --seed 3 --max-train-rows 200 --out " + q(out)) == 0);
  const auto j = nlohmann::json::parse(slurp(out));
  CHECK(j.at("config").at("folds") == 2);
  CHECK(j.at("config").at("C") == 2.0);
  CHECK(j.at("skill").size() == 1);
  CHECK(j.at("phase").is_null());
}

TEST_CASE("train writes a bundle") {
  const auto out = kRoot / "bundle.json";
  REQUIRE(run("train --data " + q(dataset()) + " --task phase --kernel rbf --c 2 --gamma 0.5 --seed 4 "
              "--max-train-rows 200 --out " + q(out)) == 0);
  const auto j = nlohmann::json::parse(slurp(out));
  CHECK(j.at("task") == "phase");
  CHECK(j.at("model").at("models").size() == 5);
  CHECK(j.at("model").at("models").at(0).at("model").at("C") == 2.0);
  CHECK(run("train --data " + q(dataset()) + " --task skill --kernel all --seed 4 --out " + q(out)) == 2);
}

TEST_CASE("data problems exit with code 3") {
  std::ofstream(kRoot / "one_skill.json") << R"({"n_participants": 3, "intermediate_share": 0.0, "session_swings": [2, 2, 2]})";
  const auto d = kRoot / "one_skill";
  REQUIRE(run("synth --seed 1 --out " + q(d) + " --config " + q(kRoot / "one_skill.json")) == 0);
  CHECK(run("evaluate --data " + q(d) + " --folds 2 --seed 1 --out " + q(kRoot / "x.json")) == 3);
  const auto err = slurp(kRoot / "stderr.txt");
  CHECK(err.find("SingleClass") != std::string::npos);
  CHECK(std::count(err.begin(), err.end(), '\n') == 1);

  const auto broken = kRoot / "broken";
  fs::create_directories(broken);
  std::ofstream(broken / "a.csv") << "loggingTime,motionYaw(rad)\n0,1\n";
  std::ofstream(broken / "manifest.json")
      << R"([{"participant_id":"A","skill":"beginner","handedness":"right","session":"forehand10a","csv_path":"a.csv"}])";
  CHECK(run("ingest --data " + q(broken) + " --out " + q(kRoot / "y.json")) == 3);
  CHECK(slurp(kRoot / "stderr.txt").find("MissingColumn") != std::string::npos);
}
