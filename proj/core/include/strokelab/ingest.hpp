#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace strokelab::ingest {

/// One orientation sample. A NaN in any field marks a missing value that
/// `clean` has to fill or drop.
struct ImuFrame {
  double t = 0.0;  // seconds relative to the first frame
  double yaw = 0.0;
  double roll = 0.0;
  double pitch = 0.0;

  bool complete() const;
  friend bool operator==(const ImuFrame&, const ImuFrame&) = default;
};

enum class Skill : std::uint8_t { Beginner = 0, Intermediate = 1 };
enum class Handedness : std::uint8_t { Left, Right };
enum class Session : std::uint8_t { Forehand10A, Forehand10B, Forehand20, Backhand10A, Backhand10B };

std::string_view to_string(Skill s);
std::string_view to_string(Handedness h);
std::string_view to_string(Session s);
Skill parse_skill(std::string_view s);
Handedness parse_handedness(std::string_view s);
Session parse_session(std::string_view s);
bool is_forehand(Session s);

struct Recording {
  std::string participant_id;
  Skill skill = Skill::Beginner;
  Handedness handedness = Handedness::Right;
  Session session = Session::Forehand10A;
  std::vector<ImuFrame> frames;
};

struct ManifestEntry {
  std::string participant_id;
  Skill skill = Skill::Beginner;
  Handedness handedness = Handedness::Right;
  Session session = Session::Forehand10A;
  std::string csv_path;
};

struct DatasetManifest {
  std::vector<ManifestEntry> entries;
};

/// Header names of the four required columns.
struct ColumnMap {
  std::string time = "loggingTime";
  std::string yaw = "motionYaw(rad)";
  std::string roll = "motionRoll(rad)";
  std::string pitch = "motionPitch(rad)";
};

struct ParseResult {
  std::vector<ImuFrame> frames;
  std::vector<std::string> warnings;
};

/// Parses a sensor-log CSV document. The time column may hold numeric seconds
/// or ISO-8601 timestamps; it is rebased so the first valid sample is t=0.
/// Unparseable cells become NaN and are left for `clean`.
ParseResult parse_sensor_csv(std::string_view text, const ColumnMap& columns = {});

/// Writes frames with the given column names. Values use round-trip precision.
std::string write_sensor_csv(const std::vector<ImuFrame>& frames, const ColumnMap& columns = {});

struct CleaningPolicy {
  std::size_t max_gap = 3;
  bool smoothing = true;
  std::size_t smoothing_window = 5;  // odd
};

/// Fills short runs of missing values by linear interpolation, drops frames
/// that stay incomplete, then optionally applies a centered moving average to
/// the three angle channels (truncated window at the edges).
std::vector<ImuFrame> clean(const std::vector<ImuFrame>& frames, const CleaningPolicy& policy = {});

/// Reads the JSON manifest. Relative csv paths are resolved against the
/// manifest's directory.
DatasetManifest read_manifest(const std::filesystem::path& path);
DatasetManifest parse_manifest(std::string_view json_text, const std::filesystem::path& base_dir = {});
std::string write_manifest(const DatasetManifest& manifest);

struct LoadOptions {
  bool forehand_only = true;
  ColumnMap columns;
  CleaningPolicy cleaning;
};

struct LoadedDataset {
  std::vector<Recording> recordings;
  std::vector<std::string> warnings;
};

LoadedDataset load_dataset(const DatasetManifest& manifest, const LoadOptions& options = {});

std::string read_text_file(const std::filesystem::path& path);

/// Seconds since the Unix epoch for an ISO-8601 date-time such as
/// "2023-06-01T10:15:30.250-04:00" or "2023-06-01 10:15:30 +0000".
std::optional<double> parse_iso8601(std::string_view text);

}  // namespace strokelab::ingest
