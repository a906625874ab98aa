#ifndef SLOPECAL_PATH_HPP
#define SLOPECAL_PATH_HPP

#include <cstddef>
#include <string>
#include <vector>

#include "slopecal/types.hpp"

namespace slopecal {

/// Instrumentation of one path computation, used by the complexity tests:
/// the total number of candidate models examined is O(i_max * #models).
struct PathStats {
  std::size_t steps = 0;
  std::size_t candidate_scans = 0;
};

/// Exact piecewise-constant trajectory of the penalized selection
/// K -> argmin over models of f + K * g.
///
/// Walks the breakpoints: starting from the risk minimizer, each step moves
/// to the model minimizing the crossing ratio (f(m) - f(prev)) / (g(prev) -
/// g(m)) among models with strictly larger f and strictly smaller g, until
/// no such model remains. Models whose f and g both coincide within a
/// relative 1e-12 are collapsed to the order-smallest representative before
/// the walk. For every K in [K_i, K_{i+1}) the returned segment model is the
/// order-smallest minimizer of f + K * g.
SelectionPath compute_path(const std::vector<ModelScore>& scores,
                           PathStats* stats = nullptr);

/// Reference implementation of the selection at one K: full scan of
/// f + K * g, ties (relative 1e-12) resolved by the total order. Serves as
/// the independent oracle the path computation is tested against.
std::size_t brute_force_argmin(const std::vector<ModelScore>& scores, double k);

}  // namespace slopecal

#endif  // SLOPECAL_PATH_HPP
