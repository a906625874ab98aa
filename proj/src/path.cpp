#include "slopecal/path.hpp"

#include <cmath>
#include <stdexcept>

namespace slopecal {
namespace {

bool approx_equal(double a, double b) { return nearly_equal(a, b, kPathRelTol); }

bool strictly_less(double a, double b) { return a < b && !approx_equal(a, b); }

void validate(const std::vector<ModelScore>& scores) {
  if (scores.empty()) throw std::invalid_argument("compute_path: empty model list");
  for (const auto& s : scores) {
    if (!std::isfinite(s.f) || !std::isfinite(s.g))
      throw std::invalid_argument("compute_path: non-finite score for " + s.model_id);
    if (s.g < 0.0)
      throw std::invalid_argument("compute_path: negative penalty shape for " + s.model_id);
  }
}

}  // namespace

SelectionPath compute_path(const std::vector<ModelScore>& scores, PathStats* stats) {
  validate(scores);
  const ScoreOrder before;

  // Collapse duplicates (f and g both equal within tolerance), keeping the
  // order-smallest representative of each group.
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    bool duplicate = false;
    for (std::size_t& j : kept) {
      if (approx_equal(scores[i].f, scores[j].f) && approx_equal(scores[i].g, scores[j].g)) {
        if (before(scores[i], scores[j])) j = i;
        duplicate = true;
        break;
      }
    }
    if (!duplicate) kept.push_back(i);
  }

  // Init: the order-smallest minimizer of f.
  std::size_t current = kept.front();
  for (std::size_t m : kept) {
    if (strictly_less(scores[m].f, scores[current].f) ||
        (approx_equal(scores[m].f, scores[current].f) && before(scores[m], scores[current])))
      current = m;
  }

  std::vector<PathSegment> segments;
  auto push = [&](double k_from, std::size_t idx) {
    segments.push_back(PathSegment{k_from, idx, scores[idx].model_id, scores[idx].f,
                                   scores[idx].g, scores[idx].dim});
  };
  push(0.0, current);

  // Step i: among models with strictly larger f and strictly smaller g, the
  // next breakpoint is the smallest crossing ratio; ties resolved by the
  // total order. Stops when no candidate remains.
  while (true) {
    if (stats != nullptr) ++stats->steps;
    bool found = false;
    std::size_t best = 0;
    double best_ratio = 0.0;
    for (std::size_t m : kept) {
      if (stats != nullptr) ++stats->candidate_scans;
      if (!(strictly_less(scores[current].f, scores[m].f) &&
            strictly_less(scores[m].g, scores[current].g)))
        continue;
      const double ratio =
          (scores[m].f - scores[current].f) / (scores[current].g - scores[m].g);
      if (!found || strictly_less(ratio, best_ratio) ||
          (nearly_equal(ratio, best_ratio, kPathRelTol) && before(scores[m], scores[best]))) {
        found = true;
        best = m;
        best_ratio = ratio;
      }
    }
    if (!found) break;
    // Real arithmetic guarantees strictly increasing breakpoints; if two of
    // them collapse under rounding, the earlier segment is empty and its
    // model is dropped.
    double k_start = best_ratio;
    while (segments.size() > 1 && segments.back().k_from >= k_start) {
      k_start = segments.back().k_from;
      segments.pop_back();
    }
    push(k_start, best);
    current = best;
  }

  return SelectionPath(std::move(segments));
}

std::size_t brute_force_argmin(const std::vector<ModelScore>& scores, double k) {
  validate(scores);
  if (!(k >= 0.0)) throw std::invalid_argument("brute_force_argmin: k must be >= 0");
  const ScoreOrder before;
  // Two passes: locate the minimum value, then take the order-smallest of
  // the models tied with it. The tie tolerance only needs to absorb the few
  // ulps of rounding in f + k * g, so exact-breakpoint ties resolve to the
  // incoming model without blurring genuinely distinct criterion values.
  constexpr double kTieRelTol = 1e-15;
  double min_value = scores[0].f + k * scores[0].g;
  for (const auto& s : scores) min_value = std::min(min_value, s.f + k * s.g);
  std::size_t best = scores.size();
  for (std::size_t m = 0; m < scores.size(); ++m) {
    if (!nearly_equal(scores[m].f + k * scores[m].g, min_value, kTieRelTol)) continue;
    if (best == scores.size() || before(scores[m], scores[best])) best = m;
  }
  return best;
}

}  // namespace slopecal
