#include "strokelab/ingest.hpp"

#include "strokelab/error.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>
#include <unordered_map>

namespace strokelab::ingest {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r' || s.front() == '\n'))
    s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r' || s.back() == '\n'))
    s.remove_suffix(1);
  return s;
}

// Splits one CSV record. Double quotes protect commas; "" is an escaped quote.
std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> cells;
  std::string cur;
  bool in_quotes = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (c == '"') {
      if (in_quotes && i + 1 < line.size() && line[i + 1] == '"') {
        cur.push_back('"');
        ++i;
      } else {
        in_quotes = !in_quotes;
      }
    } else if (c == ',' && !in_quotes) {
      cells.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  cells.push_back(std::move(cur));
  return cells;
}

std::optional<double> parse_number(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

// Whole seconds kept as an integer so epoch timestamps rebase without rounding.
struct TimeParts {
  std::int64_t whole = 0;
  double frac = 0.0;
};

std::optional<TimeParts> parse_iso8601_parts(std::string_view s);

std::optional<TimeParts> parse_time_cell(std::string_view s) {
  if (auto v = parse_number(s)) return TimeParts{0, *v};
  return parse_iso8601_parts(trim(s));
}

// Days since 1970-01-01 for a proleptic Gregorian date.
std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const auto yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

bool read_digits(std::string_view s, std::size_t& pos, std::size_t count, int& out) {
  if (pos + count > s.size()) return false;
  int v = 0;
  for (std::size_t i = 0; i < count; ++i) {
    const char c = s[pos + i];
    if (c < '0' || c > '9') return false;
    v = v * 10 + (c - '0');
  }
  out = v;
  pos += count;
  return true;
}

bool expect(std::string_view s, std::size_t& pos, char c) {
  if (pos < s.size() && s[pos] == c) {
    ++pos;
    return true;
  }
  return false;
}

struct ChannelStats {
  std::size_t yaw_out = 0;
  std::size_t pitch_out = 0;
};

}  // namespace

bool ImuFrame::complete() const {
  return std::isfinite(t) && std::isfinite(yaw) && std::isfinite(roll) && std::isfinite(pitch);
}

std::string_view to_string(Skill s) { return s == Skill::Beginner ? "beginner" : "intermediate"; }
std::string_view to_string(Handedness h) { return h == Handedness::Left ? "left" : "right"; }
std::string_view to_string(Session s) {
  switch (s) {
    case Session::Forehand10A: return "forehand10a";
    case Session::Forehand10B: return "forehand10b";
    case Session::Forehand20: return "forehand20";
    case Session::Backhand10A: return "backhand10a";
    case Session::Backhand10B: return "backhand10b";
  }
  return "forehand10a";
}

Skill parse_skill(std::string_view s) {
  if (s == "beginner") return Skill::Beginner;
  if (s == "intermediate") return Skill::Intermediate;
  fail(Errc::BadFormat, "unknown skill '" + std::string(s) + "'");
}

Handedness parse_handedness(std::string_view s) {
  if (s == "left") return Handedness::Left;
  if (s == "right") return Handedness::Right;
  fail(Errc::BadFormat, "unknown handedness '" + std::string(s) + "'");
}

Session parse_session(std::string_view s) {
  for (auto v : {Session::Forehand10A, Session::Forehand10B, Session::Forehand20, Session::Backhand10A,
                 Session::Backhand10B}) {
    if (to_string(v) == s) return v;
  }
  fail(Errc::BadFormat, "unknown session '" + std::string(s) + "'");
}

bool is_forehand(Session s) {
  return s == Session::Forehand10A || s == Session::Forehand10B || s == Session::Forehand20;
}

namespace {

std::optional<TimeParts> parse_iso8601_parts(std::string_view s) {
  s = trim(s);
  std::size_t pos = 0;
  int year = 0, month = 0, day = 0, hour = 0, minute = 0, second = 0;
  if (!read_digits(s, pos, 4, year) || !expect(s, pos, '-') || !read_digits(s, pos, 2, month) ||
      !expect(s, pos, '-') || !read_digits(s, pos, 2, day))
    return std::nullopt;
  if (!(expect(s, pos, 'T') || expect(s, pos, ' '))) return std::nullopt;
  if (!read_digits(s, pos, 2, hour) || !expect(s, pos, ':') || !read_digits(s, pos, 2, minute) ||
      !expect(s, pos, ':') || !read_digits(s, pos, 2, second))
    return std::nullopt;
  if (month < 1 || month > 12 || day < 1 || day > 31 || hour > 23 || minute > 59 || second > 60)
    return std::nullopt;

  double frac = 0.0;
  if (expect(s, pos, '.') || expect(s, pos, ',')) {
    double scale = 0.1;
    std::size_t start = pos;
    while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') {
      frac += (s[pos] - '0') * scale;
      scale *= 0.1;
      ++pos;
    }
    if (pos == start) return std::nullopt;
  }

  while (pos < s.size() && s[pos] == ' ') ++pos;
  int offset_sec = 0;
  if (pos < s.size()) {
    if (s[pos] == 'Z') {
      ++pos;
    } else if (s[pos] == '+' || s[pos] == '-') {
      const int sign = s[pos] == '-' ? -1 : 1;
      ++pos;
      int oh = 0, om = 0;
      if (!read_digits(s, pos, 2, oh)) return std::nullopt;
      expect(s, pos, ':');
      if (!read_digits(s, pos, 2, om)) return std::nullopt;
      offset_sec = sign * (oh * 3600 + om * 60);
    } else {
      return std::nullopt;
    }
  }
  if (pos != s.size()) return std::nullopt;

  const auto days = days_from_civil(year, static_cast<unsigned>(month), static_cast<unsigned>(day));
  return TimeParts{days * 86400 + hour * 3600 + minute * 60 + second - offset_sec, frac};
}

}  // namespace

std::optional<double> parse_iso8601(std::string_view s) {
  const auto parts = parse_iso8601_parts(s);
  if (!parts) return std::nullopt;
  return static_cast<double>(parts->whole) + parts->frac;
}

ParseResult parse_sensor_csv(std::string_view text, const ColumnMap& columns) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto nl = text.find('\n', start);
    if (nl == std::string_view::npos) nl = text.size();
    auto line = text.substr(start, nl - start);
    if (!trim(line).empty()) lines.push_back(line);
    start = nl + 1;
  }
  if (lines.empty()) fail(Errc::EmptyFile, "no header row");

  auto header_line = lines.front();
  if (header_line.size() >= 3 && header_line.substr(0, 3) == "\xEF\xBB\xBF") header_line.remove_prefix(3);
  const auto header = split_csv_line(header_line);
  auto find_col = [&](const std::string& name) {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (trim(header[i]) == name) return i;
    }
    fail(Errc::MissingColumn, "column '" + name + "' not in header");
  };
  const std::size_t ct = find_col(columns.time);
  const std::size_t cy = find_col(columns.yaw);
  const std::size_t cr = find_col(columns.roll);
  const std::size_t cp = find_col(columns.pitch);

  if (lines.size() == 1) fail(Errc::EmptyFile, "header without data rows");

  ParseResult result;
  result.frames.reserve(lines.size() - 1);
  auto cell = [](const std::vector<std::string>& row, std::size_t i) -> std::string_view {
    return i < row.size() ? std::string_view(row[i]) : std::string_view{};
  };
  std::vector<std::optional<TimeParts>> times;
  times.reserve(lines.size() - 1);
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const auto row = split_csv_line(lines[li]);
    times.push_back(parse_time_cell(cell(row, ct)));
    ImuFrame f;
    f.yaw = parse_number(cell(row, cy)).value_or(kNaN);
    f.roll = parse_number(cell(row, cr)).value_or(kNaN);
    f.pitch = parse_number(cell(row, cp)).value_or(kNaN);
    result.frames.push_back(f);
  }

  std::optional<TimeParts> t0;
  for (const auto& t : times) {
    if (t) {
      t0 = t;
      break;
    }
  }
  for (std::size_t i = 0; i < times.size(); ++i) {
    const auto& t = times[i];
    result.frames[i].t = t ? static_cast<double>(t->whole - t0->whole) + (t->frac - t0->frac) : kNaN;
  }
  double prev = -std::numeric_limits<double>::infinity();
  std::size_t idx = 0;
  for (auto& f : result.frames) {
    ++idx;
    if (!std::isfinite(f.t)) continue;
    if (!(f.t > prev)) {
      fail(Errc::NonMonotoneTime, "time not strictly increasing at data row " + std::to_string(idx));
    }
    prev = f.t;
  }

  ChannelStats stats;
  for (const auto& f : result.frames) {
    if (std::isfinite(f.yaw) && std::abs(f.yaw) > std::numbers::pi) ++stats.yaw_out;
    if (std::isfinite(f.pitch) && std::abs(f.pitch) > std::numbers::pi / 2) ++stats.pitch_out;
  }
  if (stats.yaw_out > 0)
    result.warnings.push_back(std::to_string(stats.yaw_out) + " frame(s) with |yaw| > pi");
  if (stats.pitch_out > 0)
    result.warnings.push_back(std::to_string(stats.pitch_out) + " frame(s) with |pitch| > pi/2");
  return result;
}

std::string write_sensor_csv(const std::vector<ImuFrame>& frames, const ColumnMap& columns) {
  std::string out = columns.time + "," + columns.yaw + "," + columns.roll + "," + columns.pitch + "\n";
  char buf[128];
  for (const auto& f : frames) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", f.t, f.yaw, f.roll, f.pitch);
    out += buf;
  }
  return out;
}

std::vector<ImuFrame> clean(const std::vector<ImuFrame>& frames, const CleaningPolicy& policy) {
  const std::size_t n = frames.size();
  std::array<std::vector<double>, 4> ch;
  for (auto& c : ch) c.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    ch[0][i] = frames[i].t;
    ch[1][i] = frames[i].yaw;
    ch[2][i] = frames[i].roll;
    ch[3][i] = frames[i].pitch;
  }

  static constexpr const char* kNames[] = {"time", "yaw", "roll", "pitch"};
  for (std::size_t c = 0; c < ch.size(); ++c) {
    auto& v = ch[c];
    if (std::none_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); }))
      fail(Errc::AllMissing, std::string("no valid samples in channel '") + kNames[c] + "'");

    std::size_t i = 0;
    while (i < n) {
      if (std::isfinite(v[i])) {
        ++i;
        continue;
      }
      std::size_t j = i;
      while (j < n && !std::isfinite(v[j])) ++j;
      // [i, j) is a run of missing values; interior short runs are filled.
      if (i > 0 && j < n && j - i <= policy.max_gap) {
        const double a = v[i - 1];
        const double b = v[j];
        const double span = static_cast<double>(j - i + 1);
        for (std::size_t k = i; k < j; ++k) v[k] = a + (b - a) * static_cast<double>(k - i + 1) / span;
      }
      i = j;
    }
  }

  std::vector<ImuFrame> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    ImuFrame f{ch[0][i], ch[1][i], ch[2][i], ch[3][i]};
    if (f.complete()) out.push_back(f);
  }
  if (out.empty()) fail(Errc::AllMissing, "no complete frames after gap filling");

  if (policy.smoothing && policy.smoothing_window > 1) {
    if (policy.smoothing_window % 2 == 0) fail(Errc::BadConfig, "smoothing window must be odd");
    const std::size_t half = policy.smoothing_window / 2;
    const std::size_t m = out.size();
    auto smooth = [&](auto member) {
      std::vector<double> prefix(m + 1, 0.0);
      for (std::size_t k = 0; k < m; ++k) prefix[k + 1] = prefix[k] + out[k].*member;
      std::vector<double> sm(m);
      for (std::size_t k = 0; k < m; ++k) {
        const std::size_t lo = k >= half ? k - half : 0;
        const std::size_t hi = std::min(m, k + half + 1);
        sm[k] = (prefix[hi] - prefix[lo]) / static_cast<double>(hi - lo);
      }
      for (std::size_t k = 0; k < m; ++k) out[k].*member = sm[k];
    };
    smooth(&ImuFrame::yaw);
    smooth(&ImuFrame::roll);
    smooth(&ImuFrame::pitch);
  }
  return out;
}

DatasetManifest parse_manifest(std::string_view json_text, const std::filesystem::path& base_dir) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    fail(Errc::BadFormat, std::string("manifest is not valid JSON: ") + e.what());
  }
  if (!doc.is_array()) fail(Errc::BadFormat, "manifest must be a JSON array");

  static const std::set<std::string> kKeys = {"participant_id", "skill", "handedness", "session", "csv_path"};
  DatasetManifest m;
  std::unordered_map<std::string, std::pair<Skill, Handedness>> seen;
  std::set<std::string> paths;
  for (const auto& obj : doc) {
    if (!obj.is_object() || obj.size() != kKeys.size())
      fail(Errc::BadFormat, "manifest entries must have exactly the keys participant_id, skill, handedness, "
                            "session, csv_path");
    for (const auto& [k, v] : obj.items()) {
      if (!kKeys.count(k)) fail(Errc::BadFormat, "unexpected manifest key '" + k + "'");
      if (!v.is_string()) fail(Errc::BadFormat, "manifest key '" + k + "' must be a string");
    }
    ManifestEntry e;
    e.participant_id = obj["participant_id"].get<std::string>();
    e.skill = parse_skill(obj["skill"].get<std::string>());
    e.handedness = parse_handedness(obj["handedness"].get<std::string>());
    e.session = parse_session(obj["session"].get<std::string>());
    std::filesystem::path p = obj["csv_path"].get<std::string>();
    if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
    e.csv_path = p.lexically_normal().string();

    auto [it, inserted] = seen.emplace(e.participant_id, std::make_pair(e.skill, e.handedness));
    if (!inserted && (it->second.first != e.skill || it->second.second != e.handedness))
      fail(Errc::BadFormat, "participant '" + e.participant_id + "' has inconsistent skill/handedness");
    if (!paths.insert(e.csv_path).second) fail(Errc::BadFormat, "duplicate csv_path '" + e.csv_path + "'");
    m.entries.push_back(std::move(e));
  }
  return m;
}

DatasetManifest read_manifest(const std::filesystem::path& path) {
  return parse_manifest(read_text_file(path), path.parent_path());
}

std::string write_manifest(const DatasetManifest& manifest) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& e : manifest.entries) {
    nlohmann::ordered_json o;
    o["participant_id"] = e.participant_id;
    o["skill"] = to_string(e.skill);
    o["handedness"] = to_string(e.handedness);
    o["session"] = to_string(e.session);
    o["csv_path"] = e.csv_path;
    arr.push_back(std::move(o));
  }
  return arr.dump(2) + "\n";
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::IoError, "cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) fail(Errc::IoError, "read failed for '" + path.string() + "'");
  return ss.str();
}

LoadedDataset load_dataset(const DatasetManifest& manifest, const LoadOptions& options) {
  LoadedDataset out;
  for (const auto& e : manifest.entries) {
    if (options.forehand_only && !is_forehand(e.session)) continue;
    const std::string who = e.participant_id + "/" + std::string(to_string(e.session));
    std::string text = read_text_file(e.csv_path);
    try {
      auto parsed = parse_sensor_csv(text, options.columns);
      for (auto& w : parsed.warnings) out.warnings.push_back(who + ": " + w);
      Recording r;
      r.participant_id = e.participant_id;
      r.skill = e.skill;
      r.handedness = e.handedness;
      r.session = e.session;
      r.frames = clean(parsed.frames, options.cleaning);
      out.recordings.push_back(std::move(r));
    } catch (const Error& err) {
      throw Error(err.code(), who + " (" + e.csv_path + "): " + err.detail());
    }
  }
  return out;
}

}  // namespace strokelab::ingest
