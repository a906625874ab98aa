#ifndef SLOPECAL_TYPES_HPP
#define SLOPECAL_TYPES_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace slopecal {

/// Relative tolerance used by the numeric invariant checks throughout the
/// library (double-precision accumulation over samples up to ~1e6 points).
inline constexpr double kInvariantRelTol = 1e-9;

/// Relative tolerance under which two floating-point risk/shape values are
/// treated as equal when ordering models and walking the selection path.
inline constexpr double kPathRelTol = 1e-12;

inline bool nearly_equal(double a, double b, double rel_tol) {
  const double scale = std::max({1.0, std::abs(a), std::abs(b)});
  return std::abs(a - b) <= rel_tol * scale;
}

/// Observed (x, y) pairs on a closed feature interval, [0, 1] by default.
class Sample {
 public:
  Sample(std::vector<double> xs, std::vector<double> ys, double lo = 0.0,
         double hi = 1.0);

  const std::vector<double>& xs() const { return xs_; }
  const std::vector<double>& ys() const { return ys_; }
  std::size_t n() const { return xs_.size(); }
  double lo() const { return lo_; }
  double hi() const { return hi_; }

 private:
  std::vector<double> xs_;
  std::vector<double> ys_;
  double lo_;
  double hi_;
};

/// One model: a partition of the feature interval into D_m consecutive
/// half-open cells [e_i, e_{i+1}) (the last cell also contains the right
/// endpoint). Stored as the D_m+1 strictly increasing cell edges, which
/// guarantees the cells are disjoint and cover the interval.
class PartitionModel {
 public:
  PartitionModel(std::string id, std::vector<double> edges);

  /// Regular partition of [lo, hi] into `dim` equal cells, id "regular:dim".
  static PartitionModel regular(int dim, double lo = 0.0, double hi = 1.0);

  const std::string& id() const { return id_; }
  const std::vector<double>& edges() const { return edges_; }
  int dim() const { return static_cast<int>(edges_.size()) - 1; }
  double lo() const { return edges_.front(); }
  double hi() const { return edges_.back(); }

  /// Index of the cell containing x; throws std::invalid_argument when x
  /// lies outside the partition.
  int cell_index(double x) const;

 private:
  std::string id_;
  std::vector<double> edges_;
};

/// Regular partitions for every dimension in `dims`.
std::vector<PartitionModel> make_regular_collection(const std::vector<int>& dims,
                                                    double lo = 0.0,
                                                    double hi = 1.0);

/// A fitted regressogram: per-cell empirical frequencies and means. Cells
/// without observations leave the mean unset and make the fit inadmissible
/// (such a model cannot be scored or selected). Owns a copy of its model so
/// a fit outlives the collection it was built from.
struct FittedRegressogram {
  explicit FittedRegressogram(PartitionModel m) : model(std::move(m)) {}

  PartitionModel model;
  std::vector<double> beta_hat;   // per-cell mean of y; NaN on empty cells
  std::vector<double> p_hat;      // per-cell empirical frequency, sums to 1
  std::vector<int> counts;        // per-cell observation count
  std::vector<int> cell_of;       // cell index of each observation
  bool admissible = false;

  /// Fitted value at x; only valid on cells with observations.
  double value_at(double x) const;
};

/// Per-model pair feeding the path algorithm: f = empirical risk of the
/// fitted model, g = penalty shape value, dim = complexity used for jump
/// detection.
struct ModelScore {
  std::string model_id;
  double f = 0.0;  // empirical risk, P_n of the squared residuals
  double g = 0.0;  // penalty shape value, >= 0
  int dim = 0;

  bool operator==(const ModelScore&) const = default;
};

/// Strict total order on model scores with g non-decreasing; ties in g are
/// broken by ascending dim, then ascending model_id, making every downstream
/// selection deterministic under permutation of the input.
struct ScoreOrder {
  bool operator()(const ModelScore& a, const ModelScore& b) const {
    if (a.g != b.g) return a.g < b.g;
    if (a.dim != b.dim) return a.dim < b.dim;
    return a.model_id < b.model_id;
  }
};

/// Indices of `scores` sorted by ScoreOrder.
std::vector<std::size_t> total_order(const std::vector<ModelScore>& scores);

/// The piecewise-constant trajectory K -> selected model, summarized by its
/// breakpoints 0 = K_0 < K_1 < ... < K_{i_max} < +inf and the model chosen
/// on each segment [K_i, K_{i+1}).
struct PathSegment {
  double k_from = 0.0;  // left breakpoint of the segment
  std::size_t score_index = 0;
  std::string model_id;
  double f = 0.0;
  double g = 0.0;
  int dim = 0;
};

class SelectionPath {
 public:
  explicit SelectionPath(std::vector<PathSegment> segments);

  const std::vector<PathSegment>& segments() const { return segments_; }
  std::size_t i_max() const { return segments_.size() - 1; }

  /// Breakpoints including the leading 0 and the trailing +inf
  /// (i_max + 2 entries).
  std::vector<double> breakpoints() const;

  /// Segment whose interval [K_i, K_{i+1}) contains k (k >= 0).
  const PathSegment& segment_at(double k) const;

 private:
  std::vector<PathSegment> segments_;
};

/// Outcome of the penalty calibration: the minimal constant located by each
/// method, the model selected at twice that constant, and whether the two
/// definitions agree. `warning` is present exactly when they disagree.
struct CalibrationReport {
  double k_min_thresh = 0.0;
  double k_min_maxjump = 0.0;
  std::optional<double> k_min_slope;
  std::string selected_thresh;
  std::string selected_maxjump;
  bool agreement = false;
  std::optional<std::string> warning;
};

}  // namespace slopecal

#endif  // SLOPECAL_TYPES_HPP
