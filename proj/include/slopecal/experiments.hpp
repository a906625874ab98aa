#ifndef SLOPECAL_EXPERIMENTS_HPP
#define SLOPECAL_EXPERIMENTS_HPP

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "slopecal/calibrate.hpp"
#include "slopecal/penalty.hpp"
#include "slopecal/regressogram.hpp"
#include "slopecal/types.hpp"

namespace slopecal {

struct BenchmarkConfig {
  std::size_t n = 200;
  std::size_t replicates = 1000;
  TrueModelSpec truth;
  std::vector<int> dims;
  int d_thresh = 1;
  std::uint64_t seed = 0;
};

/// The built-in sine benchmark: n = 200, uniform design on [0, 1],
/// s(x) = sin(pi x), unit noise level, regular partitions with dimensions
/// 1..floor(n / ln n), dimension threshold 19. The CLI exposes it as
/// --truth fig1.
BenchmarkConfig fig1_config(std::size_t replicates = 1000, std::uint64_t seed = 0);

/// Dimensions 1..floor(n / ln n).
std::vector<int> default_dims(std::size_t n);

enum class ReplicateFailure { kNone, kAllInadmissible, kNoJump };

struct ReplicateRecord {
  std::uint64_t replicate = 0;
  ReplicateFailure failure = ReplicateFailure::kNone;
  double k_min_thresh = 0.0;
  double k_min_maxjump = 0.0;
  int jump_case = 0;  // 1: same breakpoint, 2: same selection, 3: disagreement
  int dim_thresh = 0;
  int dim_maxjump = 0;
  int dim_mallows = 0;
  int dim_oracle = 0;
  double loss_thresh = 0.0;
  double loss_maxjump = 0.0;
  double loss_mallows = 0.0;
  double loss_oracle = 0.0;
};

struct BenchmarkResult {
  double c_or_thresh = 0.0;
  double c_or_maxjump = 0.0;
  double c_or_mallows = 0.0;
  double se_thresh = 0.0;
  double se_maxjump = 0.0;
  double se_mallows = 0.0;
  std::array<double, 3> case_freqs{0.0, 0.0, 0.0};
  std::size_t replicates = 0;
  std::size_t failed_replicates = 0;
  /// True when the mean oracle loss vanishes, leaving the risk ratios
  /// undefined (they are NaN in that case).
  bool oracle_degenerate = false;
  std::vector<ReplicateRecord> records;
};

/// Monte-Carlo benchmark: per replicate, draw a sample, fit every model,
/// drop inadmissible ones, calibrate with the dimension shape, select at
/// twice each minimal constant, run the unbiased-risk baseline
/// (argmin f + 2 sigma_hat^2 D / n with sigma_hat^2 the residual mean square
/// of the finest admissible model), and accumulate true excess losses into
/// risk ratios against the per-replicate oracle. Ratios are ratios of means.
/// Replicates are independent; the parallel driver partitions them across
/// OpenMP threads and reduces in replicate order, so its output is
/// bit-identical to the serial reference.
BenchmarkResult run_benchmark(const BenchmarkConfig& cfg);

/// Serial reference driver (same kernel, no OpenMP).
BenchmarkResult run_benchmark_serial(const BenchmarkConfig& cfg);

struct DimensionJumpReport {
  std::vector<double> multipliers;
  std::vector<std::vector<int>> dims_at;  // [multiplier][replicate]
  std::vector<double> median_dim;         // per multiplier
  double frac_low_huge = 0.0;   // D at K=0.5 >= n / (ln n)^2
  double frac_high_small = 0.0; // D at K=2 <= n^0.9
  std::size_t replicates = 0;
};

/// Records the selected dimension at penalty multipliers {0.5, 0.75, 1.25, 2}
/// of the *minimal* penalty. `ideal_shape` is the known-noise shape, which
/// estimates the ideal penalty = twice the minimal one, so the applied
/// penalty is K * ideal_shape / 2 and the selected dimension collapses as K
/// crosses 1.
DimensionJumpReport verify_dimension_jump(const BenchmarkConfig& cfg,
                                          const PenaltyShape& ideal_shape);

struct P1P2Report {
  double mean_p1 = 0.0;
  double mean_p2 = 0.0;
  double se_p1 = 0.0;
  double se_p2 = 0.0;
  double ratio = 0.0;       // mean_p1 / mean_p2; NaN when degenerate
  double bracket_lo = 0.0;  // (1 - e^-B)^2
  double bracket_hi = 0.0;  // min(2, 1 + 5.1 B^-1/4) + max(B,1) e^-max(B,1)
  double min_np = 0.0;      // B = min over cells of n * P(X in cell)
  bool degenerate = false;  // both means vanish (noiseless realizable truth)
  std::size_t replicates = 0;
};

/// Monte-Carlo check that the estimation error and its empirical mirror
/// agree in expectation, against the closed-form bracket evaluated at
/// B = min n p_cell.
P1P2Report verify_p1_p2(const BenchmarkConfig& cfg, const PartitionModel& model);

/// One row per replicate, plot-ready.
void write_benchmark_csv(const BenchmarkResult& result, std::ostream& out);

/// Machine-readable summary (JSON object as a string).
std::string benchmark_summary_json(const BenchmarkResult& result, const BenchmarkConfig& cfg);

}  // namespace slopecal

#endif  // SLOPECAL_EXPERIMENTS_HPP
