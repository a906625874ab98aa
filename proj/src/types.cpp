#include "slopecal/types.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace slopecal {

Sample::Sample(std::vector<double> xs, std::vector<double> ys, double lo, double hi)
    : xs_(std::move(xs)), ys_(std::move(ys)), lo_(lo), hi_(hi) {
  if (xs_.empty()) throw std::invalid_argument("Sample: needs at least one observation");
  if (xs_.size() != ys_.size())
    throw std::invalid_argument("Sample: xs and ys must have equal length");
  if (!(lo_ < hi_)) throw std::invalid_argument("Sample: empty feature interval");
  for (std::size_t i = 0; i < xs_.size(); ++i) {
    if (!(xs_[i] >= lo_ && xs_[i] <= hi_))
      throw std::invalid_argument("Sample: x[" + std::to_string(i) +
                                  "] outside the feature interval");
    if (!std::isfinite(xs_[i]) || !std::isfinite(ys_[i]))
      throw std::invalid_argument("Sample: non-finite value at row " + std::to_string(i));
  }
}

PartitionModel::PartitionModel(std::string id, std::vector<double> edges)
    : id_(std::move(id)), edges_(std::move(edges)) {
  if (edges_.size() < 2) throw std::invalid_argument("PartitionModel: needs >= 1 cell");
  for (std::size_t i = 1; i < edges_.size(); ++i) {
    if (!(edges_[i - 1] < edges_[i]))
      throw std::invalid_argument("PartitionModel: edges must be strictly increasing");
  }
}

PartitionModel PartitionModel::regular(int dim, double lo, double hi) {
  if (dim < 1) throw std::invalid_argument("PartitionModel::regular: dim must be >= 1");
  std::vector<double> edges(static_cast<std::size_t>(dim) + 1);
  for (int i = 0; i <= dim; ++i)
    edges[static_cast<std::size_t>(i)] = lo + (hi - lo) * static_cast<double>(i) / dim;
  edges.front() = lo;
  edges.back() = hi;
  return PartitionModel("regular:" + std::to_string(dim), std::move(edges));
}

int PartitionModel::cell_index(double x) const {
  if (x == edges_.back()) return dim() - 1;  // right endpoint joins the last cell
  if (!(x >= edges_.front() && x < edges_.back()))
    throw std::invalid_argument("PartitionModel: feature value " + std::to_string(x) +
                                " outside all cells of " + id_);
  const auto it = std::upper_bound(edges_.begin(), edges_.end(), x);
  return static_cast<int>(it - edges_.begin()) - 1;
}

std::vector<PartitionModel> make_regular_collection(const std::vector<int>& dims,
                                                    double lo, double hi) {
  std::vector<PartitionModel> models;
  models.reserve(dims.size());
  for (int d : dims) models.push_back(PartitionModel::regular(d, lo, hi));
  return models;
}

double FittedRegressogram::value_at(double x) const {
  const int cell = model.cell_index(x);
  const double v = beta_hat[static_cast<std::size_t>(cell)];
  if (std::isnan(v))
    throw std::logic_error("FittedRegressogram: value requested on an empty cell of " +
                           model.id());
  return v;
}

std::vector<std::size_t> total_order(const std::vector<ModelScore>& scores) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return ScoreOrder{}(scores[a], scores[b]);
  });
  return order;
}

SelectionPath::SelectionPath(std::vector<PathSegment> segments)
    : segments_(std::move(segments)) {
  if (segments_.empty()) throw std::invalid_argument("SelectionPath: empty");
  if (segments_.front().k_from != 0.0)
    throw std::invalid_argument("SelectionPath: first breakpoint must be 0");
  for (std::size_t i = 1; i < segments_.size(); ++i) {
    const auto& prev = segments_[i - 1];
    const auto& cur = segments_[i];
    if (!(prev.k_from < cur.k_from))
      throw std::invalid_argument("SelectionPath: breakpoints must increase strictly");
    if (!(cur.g < prev.g))
      throw std::invalid_argument("SelectionPath: g must decrease strictly along the path");
    if (!(cur.f > prev.f))
      throw std::invalid_argument("SelectionPath: f must increase strictly along the path");
  }
}

std::vector<double> SelectionPath::breakpoints() const {
  std::vector<double> ks;
  ks.reserve(segments_.size() + 1);
  for (const auto& seg : segments_) ks.push_back(seg.k_from);
  ks.push_back(std::numeric_limits<double>::infinity());
  return ks;
}

const PathSegment& SelectionPath::segment_at(double k) const {
  if (!(k >= 0.0)) throw std::invalid_argument("SelectionPath: k must be >= 0");
  std::size_t i = segments_.size();
  while (i > 0 && segments_[i - 1].k_from > k) --i;
  if (i == 0) return segments_.front();
  return segments_[i - 1];
}

}  // namespace slopecal
