#ifndef SLOPECAL_PENALTY_HPP
#define SLOPECAL_PENALTY_HPP

#include <vector>

#include "slopecal/regressogram.hpp"
#include "slopecal/types.hpp"

namespace slopecal {

enum class PenaltyKind { kDimension, kHeteroscedasticPlugin, kHeteroscedasticKnown };

/// One penalty-shape value g(m) >= 0 per model, in collection order.
struct PenaltyShape {
  PenaltyKind kind = PenaltyKind::kDimension;
  std::vector<double> values;
};

/// g(m) = D_m, the classical dimension shape for homoscedastic data.
PenaltyShape shape_dimension(const std::vector<PartitionModel>& models);

/// Heteroscedastic plug-in shape: g(m) = (2/n) * sum over cells of the
/// within-cell empirical variance of y (divisor count-1). Cells with fewer
/// than two observations fall back to the residual variance of the finest
/// admissible model in the collection.
PenaltyShape shape_plugin(const Sample& sample, const std::vector<PartitionModel>& models);

/// Known-noise shape: g(m) = (2/n) * sum over cells of E[sigma^2(X) | cell],
/// computed by quadrature against the design distribution.
PenaltyShape shape_known(const TrueModelSpec& truth,
                         const std::vector<PartitionModel>& models, std::size_t n);

}  // namespace slopecal

#endif  // SLOPECAL_PENALTY_HPP
