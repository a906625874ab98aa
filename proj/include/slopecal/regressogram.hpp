#ifndef SLOPECAL_REGRESSOGRAM_HPP
#define SLOPECAL_REGRESSOGRAM_HPP

#include <cstdint>
#include <functional>
#include <vector>

#include "slopecal/types.hpp"

namespace slopecal {

/// Data-generating truth for simulation: y = s(x) + sigma(x) * eps with
/// x drawn from x_law and eps from noise_law. v1 supports the uniform design
/// on the feature interval and standard normal noise.
struct TrueModelSpec {
  std::function<double(double)> s;
  std::function<double(double)> sigma;  // must be >= 0 on the interval
  double lo = 0.0;
  double hi = 1.0;
  enum class XLaw { kUniform } x_law = XLaw::kUniform;
  enum class NoiseLaw { kGaussian } noise_law = NoiseLaw::kGaussian;
};

/// Population moments of a truth restricted to one partition: everything
/// oracle computations need that does not depend on the drawn sample.
struct TruthMoments {
  std::vector<double> cell_p;        // P(X in cell)
  std::vector<double> cell_beta;     // E[Y | X in cell]
  std::vector<double> cell_sigma2;   // E[sigma^2(X) | X in cell]
  std::vector<double> cell_resid2;   // E[(Y - cell_beta)^2 | X in cell]
  double excess_loss_best = 0.0;     // integral of (s - cell_beta)^2 dmu
};

/// Exact risk decomposition of one fitted model under a known truth. p1 is
/// the estimation error P(gamma(fit) - gamma(best)), p2 its empirical
/// mirror, delta the centered empirical-process fluctuation of the bias
/// term, and penid = p1 + p2 - delta (the ideal penalty up to a
/// model-independent shift).
struct OracleQuantities {
  double p1 = 0.0;
  double p2 = 0.0;
  double delta = 0.0;
  double excess_loss_estimator = 0.0;  // excess_loss_best + p1
  double excess_loss_best = 0.0;
  double penid = 0.0;
};

/// Least-squares fit of the piecewise-constant model: per-cell means and
/// frequencies. Cells without observations get an unset mean and make the
/// fit inadmissible.
FittedRegressogram fit(const Sample& sample, const PartitionModel& model);

/// Mean squared residual of an admissible fit on the sample it was fitted
/// on. Throws std::invalid_argument on inadmissible fits: such a model
/// cannot be scored.
double empirical_risk(const FittedRegressogram& fit, const Sample& sample);

/// Cell moments of `truth` under `model`, via adaptive quadrature
/// (absolute tolerance 1e-10 per cell; failures carry the cell id).
TruthMoments compute_moments(const TrueModelSpec& truth, const PartitionModel& model);

/// Oracle decomposition using precomputed moments (the moments only depend
/// on truth and model, so simulation harnesses compute them once).
OracleQuantities oracle_quantities(const FittedRegressogram& fit, const Sample& sample,
                                   const TrueModelSpec& truth,
                                   const TruthMoments& moments);

/// Convenience overload computing the moments on the fly.
OracleQuantities oracle_quantities(const FittedRegressogram& fit, const Sample& sample,
                                   const TrueModelSpec& truth);

/// i.i.d. sample of size n from the truth; deterministic given the seed.
Sample generate(const TrueModelSpec& truth, std::size_t n, std::uint64_t seed);

}  // namespace slopecal

#endif  // SLOPECAL_REGRESSOGRAM_HPP
