#ifndef SLOPECAL_QUADRATURE_HPP
#define SLOPECAL_QUADRATURE_HPP

#include <functional>
#include <stdexcept>
#include <string>

namespace slopecal {

/// Thrown when the adaptive scheme cannot reach the requested tolerance.
/// The context string carries the cell id so callers can report which
/// partition cell failed.
struct QuadratureError : std::runtime_error {
  explicit QuadratureError(const std::string& what) : std::runtime_error(what) {}
};

/// Adaptive Gauss-Legendre integration of f over [a, b].
///
/// A 15-point rule is applied to the interval and compared against the sum
/// of the two half-interval rules; intervals whose discrepancy exceeds the
/// locally allotted absolute tolerance are bisected. `context` is included
/// in the error message on non-convergence.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol = 1e-10, const std::string& context = {});

}  // namespace slopecal

#endif  // SLOPECAL_QUADRATURE_HPP
