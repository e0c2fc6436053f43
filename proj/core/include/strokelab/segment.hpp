#pragma once

#include "strokelab/ingest.hpp"
#include "strokelab/matrix.hpp"

#include <array>
#include <cstddef>
#include <vector>

namespace strokelab::segment {

enum class Phase : int { Backswing = 0, Backloop = 1, ForwardSwing = 2, FollowThrough = 3, Recovery = 4 };
inline constexpr std::size_t kPhaseCount = 5;

/// Half-open frame range [start, end) of one detected swing.
struct SwingWindow {
  std::size_t start = 0;
  std::size_t end = 0;
  std::size_t peak = 0;

  std::size_t size() const { return end - start; }
  friend bool operator==(const SwingWindow&, const SwingWindow&) = default;
};

/// Four breakpoints relative to the swing start. Frame i belongs to phase
/// (number of breakpoints <= i).
struct PhaseSegmentation {
  std::array<std::size_t, 4> breakpoints{};
  std::size_t length = 0;

  Phase phase_of(std::size_t frame) const;
  std::vector<int> frame_phases() const;
};

/// Prefix-sum cache for the multivariate piecewise-constant L2 cost.
class L2Cost {
 public:
  explicit L2Cost(const FeatureMatrix& signal);

  /// Sum over [a, b) of squared distances to the segment mean, all channels.
  double operator()(std::size_t a, std::size_t b) const;
  std::size_t size() const { return n_; }

 private:
  std::size_t n_ = 0;
  std::size_t d_ = 0;
  std::vector<double> sum_;     // (n+1) x d
  std::vector<double> sumsq_;   // n+1, summed over channels
};

double segment_cost_l2(const FeatureMatrix& signal, std::size_t a, std::size_t b);

/// Exact minimizer of total L2 cost with `n_bkps` breakpoints, every segment at
/// least `min_seg_len` long. Ties go to the lexicographically smallest tuple.
/// Returned indices are segment starts (exclusive ends of the previous segment).
std::vector<std::size_t> detect_changepoints_dynp(const FeatureMatrix& signal, std::size_t n_bkps,
                                                  std::size_t min_seg_len);

/// Minimizer of total L2 cost + penalty * (number of breakpoints). Candidate
/// pruning is exact for the L2 cost.
std::vector<std::size_t> detect_changepoints_pelt(const FeatureMatrix& signal, double penalty,
                                                  std::size_t min_seg_len);

struct SwingParams {
  double threshold_frac = 0.4;
  std::size_t refractory = 30;
  std::size_t pre_frames = 40;
  std::size_t post_frames = 60;
  std::size_t min_swing_len = 15;
};

/// Per-frame norm of the angle rate; frame 0 is 0.
std::vector<double> angular_speed(const std::vector<ingest::ImuFrame>& frames);

std::vector<SwingWindow> extract_swings(const ingest::Recording& recording, const SwingParams& params = {});

PhaseSegmentation segment_phases(const FeatureMatrix& swing, std::size_t min_seg_len = 3);

/// Yaw/roll/pitch columns of frames [start, end).
FeatureMatrix euler_matrix(const std::vector<ingest::ImuFrame>& frames, std::size_t start, std::size_t end);

}  // namespace strokelab::segment
