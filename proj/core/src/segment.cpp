#include "strokelab/segment.hpp"

#include "strokelab/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace strokelab::segment {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Cost comparisons treat values this close as equal so that exact ties
// (piecewise-constant inputs) resolve by index rather than by rounding noise.
bool nearly_less(double a, double b, double scale) { return a < b - 1e-9 * (1.0 + std::abs(scale)); }

}  // namespace

Phase PhaseSegmentation::phase_of(std::size_t frame) const {
  int p = 0;
  for (auto b : breakpoints) p += b <= frame ? 1 : 0;
  return static_cast<Phase>(p);
}

std::vector<int> PhaseSegmentation::frame_phases() const {
  std::vector<int> out(length);
  for (std::size_t i = 0; i < length; ++i) out[i] = static_cast<int>(phase_of(i));
  return out;
}

L2Cost::L2Cost(const FeatureMatrix& signal) : n_(signal.rows), d_(signal.cols) {
  // Centre each channel first; it keeps the prefix-sum cancellation small.
  std::vector<double> centre(d_, 0.0);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < d_; ++j) centre[j] += signal(i, j);
  for (double& c : centre) c /= std::max<std::size_t>(1, n_);

  sum_.assign((n_ + 1) * d_, 0.0);
  sumsq_.assign(n_ + 1, 0.0);
  for (std::size_t i = 0; i < n_; ++i) {
    double sq = 0.0;
    for (std::size_t j = 0; j < d_; ++j) {
      const double v = signal(i, j) - centre[j];
      sum_[(i + 1) * d_ + j] = sum_[i * d_ + j] + v;
      sq += v * v;
    }
    sumsq_[i + 1] = sumsq_[i] + sq;
  }
}

double L2Cost::operator()(std::size_t a, std::size_t b) const {
  if (a >= b || b > n_) fail(Errc::BadRange, "segment [" + std::to_string(a) + ", " + std::to_string(b) +
                                                 ") outside [0, " + std::to_string(n_) + "]");
  const double len = static_cast<double>(b - a);
  double c = sumsq_[b] - sumsq_[a];
  for (std::size_t j = 0; j < d_; ++j) {
    const double s = sum_[b * d_ + j] - sum_[a * d_ + j];
    c -= s * s / len;
  }
  return std::max(0.0, c);
}

double segment_cost_l2(const FeatureMatrix& signal, std::size_t a, std::size_t b) {
  if (a >= b || b > signal.rows) fail(Errc::BadRange, "segment [" + std::to_string(a) + ", " + std::to_string(b) +
                                                          ") outside [0, " + std::to_string(signal.rows) + "]");
  // Two-pass form: exact zero for constant segments.
  double total = 0.0;
  const double len = static_cast<double>(b - a);
  for (std::size_t j = 0; j < signal.cols; ++j) {
    double mean = 0.0;
    for (std::size_t i = a; i < b; ++i) mean += signal(i, j);
    mean /= len;
    for (std::size_t i = a; i < b; ++i) total += (signal(i, j) - mean) * (signal(i, j) - mean);
  }
  return total;
}

std::vector<std::size_t> detect_changepoints_dynp(const FeatureMatrix& signal, std::size_t n_bkps,
                                                  std::size_t min_seg_len) {
  const std::size_t n = signal.rows;
  const std::size_t m = std::max<std::size_t>(1, min_seg_len);
  if (n < (n_bkps + 1) * m)
    fail(Errc::TooShort, "signal of length " + std::to_string(n) + " cannot hold " + std::to_string(n_bkps + 1) +
                             " segments of length " + std::to_string(m));
  if (n_bkps == 0) return {};

  const L2Cost cost(signal);
  const std::size_t segs = n_bkps + 1;
  // tail[s][k]: best cost of splitting [s, n) into k segments.
  std::vector<std::vector<double>> tail(n + 1, std::vector<double>(segs + 1, kInf));
  for (std::size_t s = 0; s + m <= n; ++s) tail[s][1] = cost(s, n);
  for (std::size_t k = 2; k <= segs; ++k) {
    for (std::size_t s = 0; s + k * m <= n; ++s) {
      double best = kInf;
      for (std::size_t t = s + m; t + (k - 1) * m <= n; ++t) {
        const double v = cost(s, t) + tail[t][k - 1];
        if (v < best) best = v;
      }
      tail[s][k] = best;
    }
  }

  // Forward reconstruction picks the smallest admissible next breakpoint that
  // still reaches the optimum, which yields the lexicographically smallest tuple.
  std::vector<std::size_t> bkps;
  std::size_t s = 0;
  for (std::size_t k = segs; k >= 2; --k) {
    const double target = tail[s][k];
    std::size_t chosen = 0;
    bool found = false;
    for (std::size_t t = s + m; t + (k - 1) * m <= n; ++t) {
      const double v = cost(s, t) + tail[t][k - 1];
      if (!nearly_less(target, v, target)) {
        chosen = t;
        found = true;
        break;
      }
    }
    if (!found) fail(Errc::TooShort, "no admissible breakpoint during reconstruction");
    bkps.push_back(chosen);
    s = chosen;
  }
  return bkps;
}

std::vector<std::size_t> detect_changepoints_pelt(const FeatureMatrix& signal, double penalty,
                                                  std::size_t min_seg_len) {
  const std::size_t n = signal.rows;
  const std::size_t m = std::max<std::size_t>(1, min_seg_len);
  if (penalty < 0.0 || !std::isfinite(penalty)) fail(Errc::BadConfig, "penalty must be finite and >= 0");
  if (n < m) fail(Errc::TooShort, "signal shorter than the minimum segment length");

  const L2Cost cost(signal);
  std::vector<double> best(n + 1, kInf);
  std::vector<std::size_t> last(n + 1, 0);
  best[0] = -penalty;

  struct Candidate {
    std::size_t pos;
    std::size_t retire_at;  // candidate is ignored for end points >= retire_at
  };
  std::vector<Candidate> candidates{{0, std::numeric_limits<std::size_t>::max()}};

  for (std::size_t t = m; t <= n; ++t) {
    // Positions t-m become admissible segment starts once best[t-m] is known.
    if (t - m > 0 && std::isfinite(best[t - m])) candidates.push_back({t - m, std::numeric_limits<std::size_t>::max()});

    double f = kInf;
    std::size_t arg = 0;
    for (const auto& c : candidates) {
      if (c.retire_at <= t || t - c.pos < m) continue;
      const double v = best[c.pos] + cost(c.pos, t) + penalty;
      if (nearly_less(v, f, v)) {
        f = v;
        arg = c.pos;
      }
    }
    best[t] = f;
    last[t] = arg;
    if (!std::isfinite(f)) continue;

    // s with best[s] + cost(s,t) > best[t] can never be the last change for an
    // end point T >= t + m, because cost(s,T) >= cost(s,t) + cost(t,T) and t is
    // then admissible. End points in (t, t+m) may still need it.
    for (auto& c : candidates) {
      if (c.retire_at != std::numeric_limits<std::size_t>::max() || t - c.pos < m) continue;
      const double v = best[c.pos] + cost(c.pos, t);
      if (v > f + 1e-9 * (1.0 + std::abs(f))) c.retire_at = t + m;
    }
    std::erase_if(candidates, [t](const Candidate& c) { return c.retire_at <= t + 1; });
  }

  std::vector<std::size_t> bkps;
  std::size_t cur = n;
  while (cur > 0) {
    const std::size_t prev = last[cur];
    if (prev == 0) break;
    bkps.push_back(prev);
    cur = prev;
  }
  std::reverse(bkps.begin(), bkps.end());
  return bkps;
}

std::vector<double> angular_speed(const std::vector<ingest::ImuFrame>& frames) {
  std::vector<double> speed(frames.size(), 0.0);
  for (std::size_t i = 1; i < frames.size(); ++i) {
    const double dt = frames[i].t - frames[i - 1].t;
    if (!(dt > 0.0)) continue;
    const double dy = frames[i].yaw - frames[i - 1].yaw;
    const double dr = frames[i].roll - frames[i - 1].roll;
    const double dp = frames[i].pitch - frames[i - 1].pitch;
    speed[i] = std::sqrt(dy * dy + dr * dr + dp * dp) / dt;
  }
  return speed;
}

std::vector<SwingWindow> extract_swings(const ingest::Recording& recording, const SwingParams& params) {
  const auto& frames = recording.frames;
  const std::size_t n = frames.size();
  const auto speed = angular_speed(frames);
  const double global_max = speed.empty() ? 0.0 : *std::max_element(speed.begin(), speed.end());
  if (!(global_max > 0.0)) fail(Errc::NoSwingsFound, "signal has no motion");
  const double threshold = params.threshold_frac * global_max;

  std::vector<std::size_t> maxima;
  for (std::size_t i = 1; i < n; ++i) {
    const bool rises = speed[i] > speed[i - 1];
    const bool holds = i + 1 >= n || speed[i] >= speed[i + 1];
    if (rises && holds && speed[i] >= threshold) maxima.push_back(i);
  }
  std::stable_sort(maxima.begin(), maxima.end(), [&](std::size_t a, std::size_t b) { return speed[a] > speed[b]; });

  std::vector<std::size_t> peaks;
  for (std::size_t cand : maxima) {
    const bool clear = std::all_of(peaks.begin(), peaks.end(), [&](std::size_t p) {
      return (cand > p ? cand - p : p - cand) >= params.refractory;
    });
    if (clear) peaks.push_back(cand);
  }
  std::sort(peaks.begin(), peaks.end());

  std::vector<SwingWindow> windows;
  for (std::size_t p : peaks) {
    SwingWindow w;
    w.peak = p;
    w.start = p >= params.pre_frames ? p - params.pre_frames : 0;
    w.end = std::min(n, p + params.post_frames + 1);
    windows.push_back(w);
  }
  // Overlapping neighbours are split halfway between their peaks.
  for (std::size_t i = 1; i < windows.size(); ++i) {
    if (windows[i].start < windows[i - 1].end) {
      const std::size_t mid = (windows[i - 1].peak + windows[i].peak + 1) / 2;
      windows[i - 1].end = mid;
      windows[i].start = mid;
    }
  }
  std::erase_if(windows, [&](const SwingWindow& w) { return w.size() < params.min_swing_len; });
  if (windows.empty()) fail(Errc::NoSwingsFound, "no speed peak above threshold");
  return windows;
}

PhaseSegmentation segment_phases(const FeatureMatrix& swing, std::size_t min_seg_len) {
  const std::size_t m = std::max<std::size_t>(1, min_seg_len);
  if (swing.rows < kPhaseCount * m)
    fail(Errc::TooShort, "swing of " + std::to_string(swing.rows) + " frames is shorter than " +
                             std::to_string(kPhaseCount * m));
  const auto bkps = detect_changepoints_dynp(swing, kPhaseCount - 1, m);
  PhaseSegmentation seg;
  seg.length = swing.rows;
  std::copy(bkps.begin(), bkps.end(), seg.breakpoints.begin());
  return seg;
}

FeatureMatrix euler_matrix(const std::vector<ingest::ImuFrame>& frames, std::size_t start, std::size_t end) {
  end = std::min(end, frames.size());
  start = std::min(start, end);
  FeatureMatrix x(end - start, 3);
  x.col_names = {"yaw", "roll", "pitch"};
  for (std::size_t i = start; i < end; ++i) {
    x(i - start, 0) = frames[i].yaw;
    x(i - start, 1) = frames[i].roll;
    x(i - start, 2) = frames[i].pitch;
  }
  return x;
}

}  // namespace strokelab::segment
