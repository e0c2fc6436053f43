#include "strokelab/synth.hpp"

#include "strokelab/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <numbers>
#include <string>
#include <string_view>

namespace strokelab::synth {

namespace {

constexpr const char* kDefaultJson =
#include "default_synth_config.inc"
    ;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

double ease(double u) { return 0.5 * (1.0 - std::cos(std::numbers::pi * u)); }

Pose clamp_pose(Pose p) {
  p[0] = std::clamp(p[0], -std::numbers::pi, std::numbers::pi);
  p[2] = std::clamp(p[2], -std::numbers::pi / 2, std::numbers::pi / 2);
  return p;
}

ingest::ImuFrame make_frame(std::size_t index, double rate_hz, const Pose& p) {
  const Pose c = clamp_pose(p);
  return {static_cast<double>(index) / rate_hz, c[0], c[1], c[2]};
}

Pose add_noise(Pose p, double sd, std::mt19937_64& rng) {
  if (sd > 0.0) {
    std::normal_distribution<double> noise(0.0, sd);
    for (double& v : p) v += noise(rng);
  }
  return p;
}

struct CleanSwing {
  std::vector<Pose> poses;
  segment::PhaseSegmentation truth;
};

CleanSwing sample_clean_swing(const SwingProfile& profile, std::mt19937_64& rng) {
  std::normal_distribution<double> unit(0.0, 1.0);
  const double tempo = std::max(0.5, profile.tempo_mean + profile.tempo_jitter * unit(rng));
  const double scale = std::max(0.3, 1.0 + profile.amplitude_jitter * unit(rng));
  const auto min_len = static_cast<double>(2 * profile.min_seg_len);

  std::array<std::size_t, 5> dur{};
  for (std::size_t p = 0; p < 5; ++p) {
    const double mean = profile.phase_durations[p];
    const double raw = tempo * mean + profile.duration_jitter * unit(rng);
    dur[p] = static_cast<std::size_t>(std::lround(std::clamp(raw, min_len, std::max(min_len, 2.0 * mean))));
  }

  std::array<Pose, 5> wp{};
  const Pose& ready = profile.waypoints[0];
  wp[0] = ready;
  for (std::size_t p = 1; p < 5; ++p) {
    for (std::size_t c = 0; c < 3; ++c) {
      wp[p][c] = ready[c] + scale * (profile.waypoints[p][c] - ready[c]) + profile.waypoint_jitter * unit(rng);
    }
  }

  CleanSwing out;
  std::size_t offset = 0;
  for (std::size_t p = 0; p < 5; ++p) {
    const Pose& from = wp[p];
    const Pose& toward = p + 1 < 5 ? wp[p + 1] : wp[0];
    for (std::size_t k = 0; k < dur[p]; ++k) {
      const double u = dur[p] > 1 ? static_cast<double>(k) / static_cast<double>(dur[p] - 1) : 0.0;
      const double e = profile.drift_fraction * ease(u);
      Pose pose{};
      for (std::size_t c = 0; c < 3; ++c) pose[c] = from[c] + e * (toward[c] - from[c]);
      out.poses.push_back(pose);
    }
    offset += dur[p];
    if (p < 4) out.truth.breakpoints[p] = offset;
  }
  out.truth.length = offset;
  return out;
}

SwingProfile perturb_profile(SwingProfile profile, double sd, std::mt19937_64& rng) {
  if (sd <= 0.0) return profile;
  std::normal_distribution<double> noise(0.0, sd);
  for (auto& w : profile.waypoints)
    for (double& v : w) v += noise(rng);
  return profile;
}

void reject_unknown_keys(const nlohmann::json& j, std::initializer_list<std::string_view> known,
                         std::string_view what) {
  for (const auto& item : j.items()) {
    if (item.key() == "_comment") continue;
    if (std::find(known.begin(), known.end(), item.key()) == known.end())
      fail(Errc::BadConfig, std::string(what) + ": unknown key '" + item.key() + "'");
  }
}

SwingProfile profile_from_json(const nlohmann::json& j, SwingProfile p) {
  if (!j.is_object()) fail(Errc::BadConfig, "swing profile must be an object");
  reject_unknown_keys(j,
                      {"phase_durations", "duration_jitter", "tempo_mean", "tempo_jitter", "waypoints",
                       "drift_fraction", "amplitude_jitter", "waypoint_jitter", "noise", "min_seg_len"},
                      "swing profile");
  if (j.contains("phase_durations")) p.phase_durations = j.at("phase_durations").get<std::array<double, 5>>();
  if (j.contains("duration_jitter")) p.duration_jitter = j.at("duration_jitter").get<double>();
  if (j.contains("tempo_mean")) p.tempo_mean = j.at("tempo_mean").get<double>();
  if (j.contains("tempo_jitter")) p.tempo_jitter = j.at("tempo_jitter").get<double>();
  if (j.contains("waypoints")) p.waypoints = j.at("waypoints").get<std::array<Pose, 5>>();
  if (j.contains("drift_fraction")) p.drift_fraction = j.at("drift_fraction").get<double>();
  if (j.contains("amplitude_jitter")) p.amplitude_jitter = j.at("amplitude_jitter").get<double>();
  if (j.contains("waypoint_jitter")) p.waypoint_jitter = j.at("waypoint_jitter").get<double>();
  if (j.contains("noise")) p.noise = j.at("noise").get<double>();
  if (j.contains("min_seg_len")) p.min_seg_len = j.at("min_seg_len").get<std::size_t>();
  return p;
}

nlohmann::ordered_json profile_to_json(const SwingProfile& p) {
  nlohmann::ordered_json j;
  j["phase_durations"] = p.phase_durations;
  j["duration_jitter"] = p.duration_jitter;
  j["tempo_mean"] = p.tempo_mean;
  j["tempo_jitter"] = p.tempo_jitter;
  j["waypoints"] = p.waypoints;
  j["drift_fraction"] = p.drift_fraction;
  j["amplitude_jitter"] = p.amplitude_jitter;
  j["waypoint_jitter"] = p.waypoint_jitter;
  j["noise"] = p.noise;
  j["min_seg_len"] = p.min_seg_len;
  return j;
}

}  // namespace

void SwingProfile::validate() const {
  for (double d : phase_durations) {
    if (!(d >= 2.0 * static_cast<double>(min_seg_len)))
      fail(Errc::BadProfile, "every mean phase duration must be at least 2 * min_seg_len");
  }
  for (double s : {duration_jitter, tempo_jitter, amplitude_jitter, waypoint_jitter, noise}) {
    if (!(s >= 0.0) || !std::isfinite(s)) fail(Errc::BadProfile, "jitter and noise levels must be finite and >= 0");
  }
  if (!(tempo_mean > 0.0)) fail(Errc::BadProfile, "tempo_mean must be positive");
  if (!(drift_fraction >= 0.0 && drift_fraction < 1.0)) fail(Errc::BadProfile, "drift_fraction must be in [0, 1)");
  if (min_seg_len < 1) fail(Errc::BadProfile, "min_seg_len must be >= 1");
}

void SynthConfig::validate() const {
  if (n_participants < 1) fail(Errc::BadConfig, "n_participants must be >= 1");
  if (session_swings.empty() || session_swings.size() > 3)
    fail(Errc::BadConfig, "session_swings needs one to three forehand sessions");
  for (auto s : session_swings) {
    if (s < 1) fail(Errc::BadConfig, "each session needs at least one swing");
  }
  if (!(intermediate_share >= 0.0 && intermediate_share <= 1.0))
    fail(Errc::BadConfig, "intermediate_share must be in [0, 1]");
  if (!(rate_hz > 0.0)) fail(Errc::BadConfig, "rate_hz must be positive");
  if (idle_min > idle_max) fail(Errc::BadConfig, "idle_min exceeds idle_max");
  if (!(participant_jitter >= 0.0)) fail(Errc::BadConfig, "participant_jitter must be >= 0");
  beginner.validate();
  intermediate.validate();
}

SwingSample generate_swing(const SwingProfile& profile, std::mt19937_64& rng, double rate_hz,
                           const Pose& pose_offset) {
  profile.validate();
  if (!(rate_hz > 0.0)) fail(Errc::BadProfile, "rate must be positive");
  auto clean = sample_clean_swing(profile, rng);
  SwingSample out;
  out.truth = clean.truth;
  out.frames.reserve(clean.poses.size());
  for (std::size_t i = 0; i < clean.poses.size(); ++i) {
    Pose p = clean.poses[i];
    for (std::size_t c = 0; c < 3; ++c) p[c] += pose_offset[c];
    out.frames.push_back(make_frame(i, rate_hz, add_noise(p, profile.noise, rng)));
  }
  return out;
}

SessionSample generate_session(const SwingProfile& profile, const SynthConfig& config, std::size_t swings,
                               std::mt19937_64& rng, const Pose& pose_offset) {
  profile.validate();
  std::uniform_int_distribution<std::size_t> idle(config.idle_min, config.idle_max);
  SessionSample out;
  Pose ready = profile.waypoints[0];
  for (std::size_t c = 0; c < 3; ++c) ready[c] += pose_offset[c];

  auto emit = [&](const Pose& p) {
    out.frames.push_back(make_frame(out.frames.size(), config.rate_hz, add_noise(p, profile.noise, rng)));
  };

  for (std::size_t k = idle(rng); k > 0; --k) emit(ready);
  for (std::size_t s = 0; s < swings; ++s) {
    auto clean = sample_clean_swing(profile, rng);
    SwingTruth t;
    t.swing_index = s;
    t.start = out.frames.size();
    t.end = t.start + clean.truth.length;
    for (std::size_t b = 0; b < 4; ++b) t.breakpoints[b] = t.start + clean.truth.breakpoints[b];
    t.impact_frame = t.breakpoints[2];
    for (auto p : clean.poses) {
      for (std::size_t c = 0; c < 3; ++c) p[c] += pose_offset[c];
      emit(p);
    }
    // Ease back to the ready pose, then rest.
    Pose last = clean.poses.back();
    for (std::size_t c = 0; c < 3; ++c) last[c] += pose_offset[c];
    for (std::size_t k = 1; k <= config.return_frames; ++k) {
      const double e = ease(static_cast<double>(k) / static_cast<double>(config.return_frames + 1));
      Pose p{};
      for (std::size_t c = 0; c < 3; ++c) p[c] = last[c] + e * (ready[c] - last[c]);
      emit(p);
    }
    for (std::size_t k = idle(rng); k > 0; --k) emit(ready);
    out.truth.push_back(t);
  }
  return out;
}

SynthDataset generate_dataset(const SynthConfig& config) {
  config.validate();
  const std::size_t n = config.n_participants;
  const auto n_int = static_cast<std::size_t>(std::llround(config.intermediate_share * static_cast<double>(n)));

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::mt19937_64 assign_rng(splitmix64(config.seed));
  std::shuffle(order.begin(), order.end(), assign_rng);
  std::vector<bool> intermediate(n, false);
  for (std::size_t i = 0; i < n_int; ++i) intermediate[order[i]] = true;

  static constexpr ingest::Session kSessions[] = {ingest::Session::Forehand10A, ingest::Session::Forehand10B,
                                                  ingest::Session::Forehand20};
  SynthDataset data;
  for (std::size_t p = 0; p < n; ++p) {
    char id[24];
    std::snprintf(id, sizeof id, "P%02zu", p + 1);
    // Each participant draws from its own stream so output does not depend on
    // generation order.
    std::mt19937_64 rng(splitmix64(config.seed ^ splitmix64(p + 1)));
    const SwingProfile& base = intermediate[p] ? config.intermediate : config.beginner;
    const SwingProfile personal = perturb_profile(base, config.participant_jitter, rng);
    const auto skill = intermediate[p] ? ingest::Skill::Intermediate : ingest::Skill::Beginner;

    for (std::size_t s = 0; s < config.session_swings.size(); ++s) {
      auto session = generate_session(personal, config, config.session_swings[s], rng);
      ingest::ManifestEntry e;
      e.participant_id = id;
      e.skill = skill;
      e.handedness = ingest::Handedness::Right;
      e.session = kSessions[s];
      e.csv_path = "csv/" + e.participant_id + "_" + std::string(ingest::to_string(e.session)) + ".csv";
      data.manifest.entries.push_back(e);

      ingest::Recording r;
      r.participant_id = id;
      r.skill = skill;
      r.handedness = e.handedness;
      r.session = e.session;
      r.frames = std::move(session.frames);
      data.recordings.push_back(std::move(r));

      for (auto& t : session.truth) {
        t.participant_id = id;
        t.session = e.session;
        data.truth.push_back(t);
      }
    }
  }
  return data;
}

SynthConfig default_config() { return config_from_json(nlohmann::json::parse(kDefaultJson), SynthConfig{}); }

SynthConfig config_from_json(const nlohmann::json& j, SynthConfig c) {
  if (!j.is_object()) fail(Errc::BadConfig, "synth config must be a JSON object");
  reject_unknown_keys(j,
                      {"n_participants", "intermediate_share", "session_swings", "seed", "rate_hz", "idle_min",
                       "idle_max", "return_frames", "participant_jitter", "beginner", "intermediate"},
                      "synth config");
  try {
    if (j.contains("n_participants")) c.n_participants = j.at("n_participants").get<std::size_t>();
    if (j.contains("intermediate_share")) c.intermediate_share = j.at("intermediate_share").get<double>();
    if (j.contains("session_swings")) c.session_swings = j.at("session_swings").get<std::vector<std::size_t>>();
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("rate_hz")) c.rate_hz = j.at("rate_hz").get<double>();
    if (j.contains("idle_min")) c.idle_min = j.at("idle_min").get<std::size_t>();
    if (j.contains("idle_max")) c.idle_max = j.at("idle_max").get<std::size_t>();
    if (j.contains("return_frames")) c.return_frames = j.at("return_frames").get<std::size_t>();
    if (j.contains("participant_jitter")) c.participant_jitter = j.at("participant_jitter").get<double>();
    if (j.contains("beginner")) c.beginner = profile_from_json(j.at("beginner"), c.beginner);
    if (j.contains("intermediate")) c.intermediate = profile_from_json(j.at("intermediate"), c.intermediate);
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::BadConfig, std::string("synth config: ") + e.what());
  }
  c.validate();
  return c;
}

nlohmann::ordered_json config_to_json(const SynthConfig& c) {
  nlohmann::ordered_json j;
  j["n_participants"] = c.n_participants;
  j["intermediate_share"] = c.intermediate_share;
  j["session_swings"] = c.session_swings;
  j["seed"] = c.seed;
  j["rate_hz"] = c.rate_hz;
  j["idle_min"] = c.idle_min;
  j["idle_max"] = c.idle_max;
  j["return_frames"] = c.return_frames;
  j["participant_jitter"] = c.participant_jitter;
  j["beginner"] = profile_to_json(c.beginner);
  j["intermediate"] = profile_to_json(c.intermediate);
  return j;
}

nlohmann::ordered_json truth_to_json(const std::vector<SwingTruth>& truth) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& t : truth) {
    nlohmann::ordered_json o;
    o["participant_id"] = t.participant_id;
    o["session"] = ingest::to_string(t.session);
    o["swing_index"] = t.swing_index;
    o["impact_frame"] = t.impact_frame;
    o["breakpoints"] = t.breakpoints;
    o["start"] = t.start;
    o["end"] = t.end;
    arr.push_back(std::move(o));
  }
  return arr;
}

std::vector<SwingTruth> truth_from_json(const nlohmann::json& j) {
  if (!j.is_array()) fail(Errc::BadFormat, "truth file must be a JSON array");
  std::vector<SwingTruth> out;
  try {
    for (const auto& o : j) {
      SwingTruth t;
      t.participant_id = o.at("participant_id").get<std::string>();
      t.session = ingest::parse_session(o.at("session").get<std::string>());
      t.swing_index = o.at("swing_index").get<std::size_t>();
      t.impact_frame = o.at("impact_frame").get<std::size_t>();
      t.breakpoints = o.at("breakpoints").get<std::array<std::size_t, 4>>();
      t.start = o.at("start").get<std::size_t>();
      t.end = o.at("end").get<std::size_t>();
      if (!(t.start < t.breakpoints[0] && std::is_sorted(t.breakpoints.begin(), t.breakpoints.end()) &&
            t.breakpoints[3] < t.end))
        fail(Errc::BadFormat, "truth breakpoints must lie strictly inside [start, end)");
      out.push_back(std::move(t));
    }
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::BadFormat, std::string("truth file: ") + e.what());
  }
  return out;
}

void write_dataset(const SynthDataset& data, const SynthConfig& config, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir / "csv", ec);
  if (ec) fail(Errc::IoError, "cannot create '" + (dir / "csv").string() + "': " + ec.message());

  auto write = [](const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << text;
    if (!out) fail(Errc::IoError, "cannot write '" + path.string() + "'");
  };
  for (std::size_t i = 0; i < data.recordings.size(); ++i)
    write(dir / data.manifest.entries[i].csv_path, ingest::write_sensor_csv(data.recordings[i].frames));
  write(dir / "manifest.json", ingest::write_manifest(data.manifest));
  write(dir / "truth.json", truth_to_json(data.truth).dump(2) + "\n");
  write(dir / "config.json", config_to_json(config).dump(2) + "\n");
}

}  // namespace strokelab::synth
