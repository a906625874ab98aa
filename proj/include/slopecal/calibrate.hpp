#ifndef SLOPECAL_CALIBRATE_HPP
#define SLOPECAL_CALIBRATE_HPP

#include <limits>
#include <optional>
#include <vector>

#include "slopecal/path.hpp"
#include "slopecal/types.hpp"

namespace slopecal {

/// Largest "reasonably small" dimension: models above it are treated as
/// overfitting when locating the minimal constant.
struct ThresholdConfig {
  int d_thresh = 1;
};

/// Default threshold floor(n / (2 ln n)).
int default_d_thresh(std::size_t n);

/// Result of the threshold rule. `degenerate` is set when already the first
/// path segment satisfies the threshold, which signals a mis-specified
/// threshold rather than a located jump (the value is then 0).
struct ThresholdKmin {
  double value = 0.0;
  bool degenerate = false;
};

/// Smallest breakpoint whose segment model has dimension <= d_thresh.
/// Throws when no segment satisfies the threshold.
ThresholdKmin kmin_thresh(const SelectionPath& path, const ThresholdConfig& cfg);

/// Breakpoint between the consecutive path models with the largest
/// dimension drop; ties resolved toward the smallest breakpoint. Throws
/// when the path has a single segment (no jump to locate).
double kmin_maxjump(const SelectionPath& path);

/// Dimension window over which the risk-vs-shape regression estimates the
/// minimal constant.
struct SlopeWindow {
  int min_dim = 1;
  int max_dim = std::numeric_limits<int>::max();
};

/// Default window: dimensions >= max(floor(sqrt(n)), 3).
SlopeWindow default_slope_window(std::size_t n);

/// Minus the least-squares slope of f against g over models whose dimension
/// lies in the window: for large models the empirical risk decreases at rate
/// K_min * g. Throws with fewer than two window models or a degenerate
/// regression.
double kmin_slope(const std::vector<ModelScore>& scores, const SlopeWindow& window);

struct CalibrationConfig {
  ThresholdConfig threshold;
  std::optional<SlopeWindow> slope_window;
};

/// Full calibration: computes the path once, locates the minimal constant by
/// the threshold and max-jump rules, selects the model at twice each
/// constant, and reports whether the two selections agree (with a warning
/// advising inspection of the K -> dimension curve when they do not).
CalibrationReport calibrate(const std::vector<ModelScore>& scores,
                            const CalibrationConfig& cfg);

}  // namespace slopecal

#endif  // SLOPECAL_CALIBRATE_HPP
