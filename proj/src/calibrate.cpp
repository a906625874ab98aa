#include "slopecal/calibrate.hpp"

#include <cmath>
#include <stdexcept>

namespace slopecal {

int default_d_thresh(std::size_t n) {
  if (n < 2) return 1;
  const double v = std::floor(static_cast<double>(n) / (2.0 * std::log(static_cast<double>(n))));
  return std::max(1, static_cast<int>(v));
}

ThresholdKmin kmin_thresh(const SelectionPath& path, const ThresholdConfig& cfg) {
  if (cfg.d_thresh < 1) throw std::invalid_argument("kmin_thresh: d_thresh must be >= 1");
  for (const auto& seg : path.segments()) {
    if (seg.dim <= cfg.d_thresh)
      return ThresholdKmin{seg.k_from, seg.k_from == 0.0};
  }
  throw std::runtime_error("kmin_thresh: threshold never reached along the path");
}

double kmin_maxjump(const SelectionPath& path) {
  const auto& segs = path.segments();
  if (segs.size() < 2) throw std::runtime_error("kmin_maxjump: path has no jump");
  std::size_t best = 1;
  int best_drop = segs[0].dim - segs[1].dim;
  for (std::size_t i = 2; i < segs.size(); ++i) {
    const int drop = segs[i - 1].dim - segs[i].dim;
    if (drop > best_drop) {  // ties keep the earliest breakpoint
      best_drop = drop;
      best = i;
    }
  }
  return segs[best].k_from;
}

SlopeWindow default_slope_window(std::size_t n) {
  const int lo = static_cast<int>(std::floor(std::sqrt(static_cast<double>(n))));
  return SlopeWindow{std::max(lo, 3), std::numeric_limits<int>::max()};
}

double kmin_slope(const std::vector<ModelScore>& scores, const SlopeWindow& window) {
  std::vector<const ModelScore*> in_window;
  for (const auto& s : scores)
    if (s.dim >= window.min_dim && s.dim <= window.max_dim) in_window.push_back(&s);
  if (in_window.size() < 2)
    throw std::runtime_error("kmin_slope: fewer than two models in the dimension window");

  double mean_f = 0.0, mean_g = 0.0;
  for (const auto* s : in_window) {
    mean_f += s->f;
    mean_g += s->g;
  }
  mean_f /= static_cast<double>(in_window.size());
  mean_g /= static_cast<double>(in_window.size());
  double sgg = 0.0, sgf = 0.0;
  for (const auto* s : in_window) {
    sgg += (s->g - mean_g) * (s->g - mean_g);
    sgf += (s->g - mean_g) * (s->f - mean_f);
  }
  if (sgg == 0.0)
    throw std::runtime_error("kmin_slope: window models share a single shape value");
  return -(sgf / sgg);
}

CalibrationReport calibrate(const std::vector<ModelScore>& scores,
                            const CalibrationConfig& cfg) {
  const SelectionPath path = compute_path(scores);
  const ThresholdKmin kt = kmin_thresh(path, cfg.threshold);
  const double kj = kmin_maxjump(path);

  CalibrationReport report;
  report.k_min_thresh = kt.value;
  report.k_min_maxjump = kj;
  report.selected_thresh = path.segment_at(2.0 * kt.value).model_id;
  report.selected_maxjump = path.segment_at(2.0 * kj).model_id;
  report.agreement = report.selected_thresh == report.selected_maxjump;
  if (!report.agreement) {
    report.warning =
        "threshold and max-jump calibrations disagree on the selected model; "
        "inspect the curve K -> dimension of the selected model before "
        "trusting either choice";
  }
  if (cfg.slope_window) report.k_min_slope = kmin_slope(scores, *cfg.slope_window);
  return report;
}

}  // namespace slopecal
