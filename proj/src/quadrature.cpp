#include "slopecal/quadrature.hpp"

#include <cmath>

namespace slopecal {
namespace {

// 15-point Gauss-Legendre nodes/weights on [-1, 1] (symmetric half listed).
constexpr int kHalf = 8;
constexpr double kNodes[kHalf] = {
    0.0,
    0.2011940939974345223006283,
    0.3941513470775633698972074,
    0.5709721726085388475372267,
    0.7244177313601700474161861,
    0.8482065834104272162006483,
    0.9372733924007059043077589,
    0.9879925180204854284895657,
};
constexpr double kWeights[kHalf] = {
    0.2025782419255612728806202,
    0.1984314853271115764561183,
    0.1861610000155622110268006,
    0.1662692058169939335532009,
    0.1395706779261543144478048,
    0.1071592204671719350118695,
    0.0703660474881081247092674,
    0.0307532419961172683546284,
};

double gauss15(const std::function<double(double)>& f, double a, double b) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double sum = kWeights[0] * f(mid);
  for (int i = 1; i < kHalf; ++i) {
    const double dx = half * kNodes[i];
    sum += kWeights[i] * (f(mid - dx) + f(mid + dx));
  }
  return sum * half;
}

double adaptive(const std::function<double(double)>& f, double a, double b,
                double whole, double tol, int depth, const std::string& context) {
  const double mid = 0.5 * (a + b);
  const double left = gauss15(f, a, mid);
  const double right = gauss15(f, mid, b);
  const double refined = left + right;
  if (std::abs(refined - whole) <= tol) return refined;
  if (depth >= 40) {
    throw QuadratureError("quadrature did not converge on [" + std::to_string(a) +
                          ", " + std::to_string(b) + "]" +
                          (context.empty() ? "" : " (" + context + ")"));
  }
  return adaptive(f, a, mid, left, 0.5 * tol, depth + 1, context) +
         adaptive(f, mid, b, right, 0.5 * tol, depth + 1, context);
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol, const std::string& context) {
  if (!(a <= b)) throw QuadratureError("integrate: empty interval");
  if (a == b) return 0.0;
  return adaptive(f, a, b, gauss15(f, a, b), abs_tol, 0, context);
}

}  // namespace slopecal
