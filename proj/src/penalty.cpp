#include "slopecal/penalty.hpp"

#include <cmath>
#include <optional>
#include <stdexcept>

namespace slopecal {

PenaltyShape shape_dimension(const std::vector<PartitionModel>& models) {
  PenaltyShape shape;
  shape.kind = PenaltyKind::kDimension;
  shape.values.reserve(models.size());
  for (const auto& m : models) shape.values.push_back(static_cast<double>(m.dim()));
  return shape;
}

namespace {

/// Residual variance of the finest (largest-dimension) admissible model,
/// divisor n - D; falls back to the overall variance of y when no model in
/// the collection is admissible.
double fallback_variance(const Sample& sample,
                         const std::vector<PartitionModel>& models) {
  std::optional<FittedRegressogram> finest;
  for (const auto& m : models) {
    auto f = fit(sample, m);
    if (f.admissible && (!finest || m.dim() > finest->model.dim())) finest = std::move(f);
  }
  const double n = static_cast<double>(sample.n());
  if (finest) {
    const double rss = empirical_risk(*finest, sample) * n;
    const double dof = std::max(1.0, n - finest->model.dim());
    return rss / dof;
  }
  double mean = 0.0;
  for (double y : sample.ys()) mean += y;
  mean /= n;
  double ss = 0.0;
  for (double y : sample.ys()) ss += (y - mean) * (y - mean);
  return ss / std::max(1.0, n - 1.0);
}

}  // namespace

PenaltyShape shape_plugin(const Sample& sample, const std::vector<PartitionModel>& models) {
  PenaltyShape shape;
  shape.kind = PenaltyKind::kHeteroscedasticPlugin;
  shape.values.reserve(models.size());
  const double n = static_cast<double>(sample.n());

  double fallback = -1.0;  // computed lazily; most collections never need it
  for (const auto& model : models) {
    const std::size_t dim = static_cast<std::size_t>(model.dim());
    std::vector<int> counts(dim, 0);
    std::vector<double> sums(dim, 0.0);
    std::vector<double> sq_sums(dim, 0.0);
    for (std::size_t i = 0; i < sample.n(); ++i) {
      const std::size_t cell = static_cast<std::size_t>(model.cell_index(sample.xs()[i]));
      const double y = sample.ys()[i];
      counts[cell] += 1;
      sums[cell] += y;
      sq_sums[cell] += y * y;
    }
    double total = 0.0;
    for (std::size_t cell = 0; cell < dim; ++cell) {
      if (counts[cell] >= 2) {
        const double mean = sums[cell] / counts[cell];
        double ss = sq_sums[cell] - counts[cell] * mean * mean;
        if (ss < 0.0) ss = 0.0;  // guard against cancellation
        total += ss / (counts[cell] - 1);
      } else {
        if (fallback < 0.0) fallback = fallback_variance(sample, models);
        total += fallback;
      }
    }
    shape.values.push_back(2.0 * total / n);
  }
  return shape;
}

PenaltyShape shape_known(const TrueModelSpec& truth,
                         const std::vector<PartitionModel>& models, std::size_t n) {
  if (n < 1) throw std::invalid_argument("shape_known: n must be >= 1");
  PenaltyShape shape;
  shape.kind = PenaltyKind::kHeteroscedasticKnown;
  shape.values.reserve(models.size());
  for (const auto& model : models) {
    const TruthMoments m = compute_moments(truth, model);
    double total = 0.0;
    for (double v : m.cell_sigma2) total += v;
    shape.values.push_back(2.0 * total / static_cast<double>(n));
  }
  return shape;
}

}  // namespace slopecal
