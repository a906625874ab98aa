#include "slopecal/regressogram.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "slopecal/quadrature.hpp"
#include "slopecal/rng.hpp"

namespace slopecal {

FittedRegressogram fit(const Sample& sample, const PartitionModel& model) {
  const std::size_t dim = static_cast<std::size_t>(model.dim());
  FittedRegressogram out(model);
  out.counts.assign(dim, 0);
  out.cell_of.resize(sample.n());
  std::vector<double> sums(dim, 0.0);

  for (std::size_t i = 0; i < sample.n(); ++i) {
    const int cell = model.cell_index(sample.xs()[i]);
    out.cell_of[i] = cell;
    out.counts[static_cast<std::size_t>(cell)] += 1;
    sums[static_cast<std::size_t>(cell)] += sample.ys()[i];
  }

  out.beta_hat.assign(dim, std::numeric_limits<double>::quiet_NaN());
  out.p_hat.assign(dim, 0.0);
  out.admissible = true;
  const double n = static_cast<double>(sample.n());
  for (std::size_t cell = 0; cell < dim; ++cell) {
    out.p_hat[cell] = out.counts[cell] / n;
    if (out.counts[cell] > 0) {
      out.beta_hat[cell] = sums[cell] / out.counts[cell];
    } else {
      out.admissible = false;
    }
  }
  return out;
}

double empirical_risk(const FittedRegressogram& fit, const Sample& sample) {
  if (!fit.admissible)
    throw std::invalid_argument("empirical_risk: inadmissible fit of " + fit.model.id() +
                                " (a cell has no observations)");
  if (fit.cell_of.size() != sample.n())
    throw std::invalid_argument("empirical_risk: fit does not match the sample");
  double acc = 0.0;
  for (std::size_t i = 0; i < sample.n(); ++i) {
    const double r = sample.ys()[i] - fit.beta_hat[static_cast<std::size_t>(fit.cell_of[i])];
    acc += r * r;
  }
  return acc / static_cast<double>(sample.n());
}

TruthMoments compute_moments(const TrueModelSpec& truth, const PartitionModel& model) {
  if (truth.x_law != TrueModelSpec::XLaw::kUniform)
    throw std::invalid_argument("compute_moments: unsupported x_law");
  const double width = model.hi() - model.lo();
  const std::size_t dim = static_cast<std::size_t>(model.dim());
  TruthMoments m;
  m.cell_p.resize(dim);
  m.cell_beta.resize(dim);
  m.cell_sigma2.resize(dim);
  m.cell_resid2.resize(dim);

  double bias = 0.0;
  for (std::size_t cell = 0; cell < dim; ++cell) {
    const double a = model.edges()[cell];
    const double b = model.edges()[cell + 1];
    const std::string ctx = model.id() + " cell " + std::to_string(cell);
    const double p = (b - a) / width;
    const double int_s = integrate(truth.s, a, b, 1e-10, ctx) / width;
    const double int_s2 =
        integrate([&](double x) { const double v = truth.s(x); return v * v; }, a, b,
                  1e-10, ctx) / width;
    const double int_sig2 =
        integrate([&](double x) {
          const double v = truth.sigma(x);
          if (v < 0.0) throw std::invalid_argument("truth: sigma(x) < 0 at x=" + std::to_string(x));
          return v * v;
        }, a, b, 1e-10, ctx) / width;
    const double beta = int_s / p;
    m.cell_p[cell] = p;
    m.cell_beta[cell] = beta;
    m.cell_sigma2[cell] = int_sig2 / p;
    // E[(Y - beta)^2 | cell] = E[sigma^2 | cell] + E[(s - beta)^2 | cell]
    m.cell_resid2[cell] = int_sig2 / p + int_s2 / p - beta * beta;
    bias += int_s2 - p * beta * beta;
  }
  m.excess_loss_best = bias;
  return m;
}

OracleQuantities oracle_quantities(const FittedRegressogram& fit, const Sample& sample,
                                   const TrueModelSpec& truth,
                                   const TruthMoments& moments) {
  const std::size_t dim = static_cast<std::size_t>(fit.model.dim());
  if (moments.cell_p.size() != dim)
    throw std::invalid_argument("oracle_quantities: moments do not match the model");

  OracleQuantities q;
  // Estimation error, with the convention that an empty cell contributes its
  // conditional second moment around the cell mean (keeps the oracle risk
  // defined for inadmissible fits without affecting admissible ones).
  for (std::size_t cell = 0; cell < dim; ++cell) {
    if (fit.counts[cell] > 0) {
      const double d = moments.cell_beta[cell] - fit.beta_hat[cell];
      q.p1 += moments.cell_p[cell] * d * d;
    } else {
      q.p1 += moments.cell_p[cell] * moments.cell_resid2[cell];
    }
  }

  const double n = static_cast<double>(sample.n());
  double risk_best = 0.0;   // P_n of squared residuals of the population fit
  double risk_truth = 0.0;  // P_n of squared residuals of s itself
  double p2 = 0.0;
  for (std::size_t i = 0; i < sample.n(); ++i) {
    const std::size_t cell = static_cast<std::size_t>(fit.cell_of[i]);
    const double y = sample.ys()[i];
    const double rm = y - moments.cell_beta[cell];
    const double rs = y - truth.s(sample.xs()[i]);
    risk_best += rm * rm;
    risk_truth += rs * rs;
    const double rh = y - fit.beta_hat[cell];  // cell is nonempty: i lives in it
    p2 += rm * rm - rh * rh;
  }
  risk_best /= n;
  risk_truth /= n;

  q.p2 = p2 / n;
  q.excess_loss_best = moments.excess_loss_best;
  q.excess_loss_estimator = q.excess_loss_best + q.p1;
  q.delta = risk_best - risk_truth - moments.excess_loss_best;
  q.penid = q.p1 + q.p2 - q.delta;
  return q;
}

OracleQuantities oracle_quantities(const FittedRegressogram& fit, const Sample& sample,
                                   const TrueModelSpec& truth) {
  return oracle_quantities(fit, sample, truth, compute_moments(truth, fit.model));
}

Sample generate(const TrueModelSpec& truth, std::size_t n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("generate: n must be >= 1");
  if (truth.noise_law != TrueModelSpec::NoiseLaw::kGaussian)
    throw std::invalid_argument("generate: unsupported noise_law");
  Rng rng(seed);
  std::vector<double> xs(n);
  for (std::size_t i = 0; i < n; ++i)
    xs[i] = truth.lo + (truth.hi - truth.lo) * rng.uniform01();
  std::vector<double> ys(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double noise_level = truth.sigma(xs[i]);
    if (noise_level < 0.0)
      throw std::invalid_argument("generate: sigma(x) < 0 at x=" + std::to_string(xs[i]));
    ys[i] = truth.s(xs[i]) + noise_level * rng.normal();
  }
  return Sample(std::move(xs), std::move(ys), truth.lo, truth.hi);
}

}  // namespace slopecal
