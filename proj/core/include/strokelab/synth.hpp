#pragma once

#include "strokelab/ingest.hpp"
#include "strokelab/segment.hpp"

#include <nlohmann/json.hpp>

#include <array>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

namespace strokelab::synth {

using Pose = std::array<double, 3>;  // yaw, roll, pitch (rad)

/// Shape and variability of one skill level's forehand.
///
/// waypoints[0] is the ready pose; waypoints[p] is the pose at which phase p
/// starts. Within phase p the pose eases (cosine) from waypoints[p] a fraction
/// `drift_fraction` of the way to the next waypoint (recovery heads back to the
/// ready pose), so consecutive phases meet at a fast transition.
struct SwingProfile {
  std::array<double, 5> phase_durations{};  // mean frames per phase
  double duration_jitter = 0.0;             // frames, per phase
  double tempo_mean = 1.0;
  double tempo_jitter = 0.0;                // sd of the per-swing duration multiplier
  std::array<Pose, 5> waypoints{};
  double drift_fraction = 0.15;
  double amplitude_jitter = 0.0;            // sd of the per-swing scale on waypoint offsets
  double waypoint_jitter = 0.0;             // rad, independent per waypoint and channel
  double noise = 0.0;                       // rad, additive per frame and channel
  std::size_t min_seg_len = 3;

  void validate() const;
};

struct SwingSample {
  std::vector<ingest::ImuFrame> frames;
  segment::PhaseSegmentation truth;
};

/// One swing sampled at `rate_hz`, times starting at 0.
SwingSample generate_swing(const SwingProfile& profile, std::mt19937_64& rng, double rate_hz = 50.0,
                           const Pose& pose_offset = {0.0, 0.0, 0.0});

struct SynthConfig {
  std::size_t n_participants = 12;
  double intermediate_share = 0.5;
  std::vector<std::size_t> session_swings{10, 10, 20};  // forehand10a, forehand10b, forehand20
  std::uint64_t seed = 42;
  double rate_hz = 50.0;
  std::size_t idle_min = 40;
  std::size_t idle_max = 80;
  std::size_t return_frames = 25;
  double participant_jitter = 0.05;  // rad, per participant waypoint offset
  SwingProfile beginner;
  SwingProfile intermediate;

  void validate() const;
};

/// Defaults come from the bundled JSON profile file.
SynthConfig default_config();
SynthConfig config_from_json(const nlohmann::json& j, SynthConfig base = default_config());
nlohmann::ordered_json config_to_json(const SynthConfig& c);

struct SwingTruth {
  std::string participant_id;
  ingest::Session session = ingest::Session::Forehand10A;
  std::size_t swing_index = 0;
  std::size_t start = 0;  // session frame index, inclusive
  std::size_t end = 0;    // exclusive
  std::size_t impact_frame = 0;
  std::array<std::size_t, 4> breakpoints{};  // session frame indices
};

struct SynthDataset {
  ingest::DatasetManifest manifest;  // csv paths relative to the dataset dir
  std::vector<ingest::Recording> recordings;
  std::vector<SwingTruth> truth;
};

SynthDataset generate_dataset(const SynthConfig& config);

/// Session stream with `swings` swings separated by idle gaps.
struct SessionSample {
  std::vector<ingest::ImuFrame> frames;
  std::vector<SwingTruth> truth;
};
SessionSample generate_session(const SwingProfile& profile, const SynthConfig& config, std::size_t swings,
                               std::mt19937_64& rng, const Pose& pose_offset = {0.0, 0.0, 0.0});

/// Writes manifest.json, truth.json, config.json and csv/<participant>_<session>.csv.
void write_dataset(const SynthDataset& data, const SynthConfig& config, const std::filesystem::path& dir);

nlohmann::ordered_json truth_to_json(const std::vector<SwingTruth>& truth);
std::vector<SwingTruth> truth_from_json(const nlohmann::json& j);

}  // namespace strokelab::synth
