#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "slopecal/calibrate.hpp"
#include "slopecal/experiments.hpp"
#include "slopecal/regressogram.hpp"

using namespace slopecal;

namespace {

SelectionPath path_of(const std::vector<ModelScore>& scores) { return compute_path(scores); }

/// Synthetic path with prescribed dimensions and breakpoints: model i has
/// g = dim and f chosen so the crossing ratios land exactly on `ks`.
std::vector<ModelScore> scores_for_jumps(const std::vector<int>& dims,
                                         const std::vector<double>& ks) {
  REQUIRE(dims.size() == ks.size() + 1);
  std::vector<ModelScore> scores;
  double f = 0.0;
  scores.push_back({"d" + std::to_string(dims[0]), f, static_cast<double>(dims[0]), dims[0]});
  for (std::size_t i = 0; i < ks.size(); ++i) {
    f += ks[i] * (dims[i] - dims[i + 1]);
    scores.push_back(
        {"d" + std::to_string(dims[i + 1]), f, static_cast<double>(dims[i + 1]), dims[i + 1]});
  }
  return scores;
}

}  // namespace

TEST_CASE("threshold rule returns the first breakpoint under the threshold") {
  // Segments (0, D=100), (0.004, D=40), (0.006, D=12).
  const auto scores = scores_for_jumps({100, 40, 12}, {0.004, 0.006});
  const auto path = path_of(scores);
  REQUIRE(path.i_max() == 2);

  SUBCASE("scan stops at the first segment satisfying the threshold") {
    const auto k = kmin_thresh(path, ThresholdConfig{19});
    CHECK(k.value == doctest::Approx(0.006).epsilon(1e-12));
    CHECK_FALSE(k.degenerate);
  }
  SUBCASE("threshold satisfied immediately is degenerate") {
    const auto k = kmin_thresh(path, ThresholdConfig{100});
    CHECK(k.value == 0.0);
    CHECK(k.degenerate);
  }
  SUBCASE("threshold never reached is an error") {
    CHECK_THROWS_AS(kmin_thresh(path, ThresholdConfig{5}), std::runtime_error);
  }
}

TEST_CASE("max-jump rule returns the breakpoint of the largest drop") {
  SUBCASE("largest drop wins") {
    // dims (100, 95, 40, 12): drops 5, 55, 28 at breakpoints K_1..K_3.
    const auto path = path_of(scores_for_jumps({100, 95, 40, 12}, {0.1, 0.2, 0.3}));
    CHECK(kmin_maxjump(path) == doctest::Approx(0.2).epsilon(1e-12));
  }
  SUBCASE("single jump") {
    const auto path = path_of(scores_for_jumps({100, 10}, {0.4}));
    CHECK(kmin_maxjump(path) == doctest::Approx(0.4).epsilon(1e-12));
  }
  SUBCASE("equal drops resolve to the earliest breakpoint") {
    const auto path = path_of(scores_for_jumps({30, 20, 10}, {0.1, 0.2}));
    CHECK(kmin_maxjump(path) == doctest::Approx(0.1).epsilon(1e-12));
  }
  SUBCASE("a one-segment path has no jump") {
    const std::vector<ModelScore> one{{"m", 0.4, 2.0, 2}};
    CHECK_THROWS_AS(kmin_maxjump(path_of(one)), std::runtime_error);
  }
}

TEST_CASE("slope rule recovers exact linear relations") {
  auto line = [](double intercept, double slope) {
    std::vector<ModelScore> scores;
    for (int d = 10; d <= 30; d += 5) {
      const double g = d;
      scores.push_back({"d" + std::to_string(d), intercept + slope * g, g, d});
    }
    return scores;
  };
  const SlopeWindow window{10, 30};
  CHECK(kmin_slope(line(3.0, -1.0), window) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(kmin_slope(line(3.0, -0.005), window) == doctest::Approx(0.005).epsilon(1e-12));
  CHECK_THROWS_AS(kmin_slope(line(3.0, -1.0), SlopeWindow{100, 200}), std::runtime_error);

  // Window with one model only.
  std::vector<ModelScore> few{{"a", 1.0, 1.0, 1}, {"b", 0.5, 2.0, 20}};
  CHECK_THROWS_AS(kmin_slope(few, SlopeWindow{10, 30}), std::runtime_error);
}

TEST_CASE("slope rule regresses risk on the shape, not on the dimension") {
  // g grows quadratically in the dimension; an exact line in g must be
  // recovered regardless.
  std::vector<ModelScore> scores;
  for (int d = 10; d <= 30; d += 5) {
    const double g = static_cast<double>(d) * d;
    scores.push_back({"d" + std::to_string(d), 7.0 - 0.01 * g, g, d});
  }
  CHECK(kmin_slope(scores, SlopeWindow{10, 30}) == doctest::Approx(0.01).epsilon(1e-12));
}

TEST_CASE("slope rule on simulated homoscedastic runs tracks sigma^2 / n") {
  const std::size_t n = 200;
  for (std::uint64_t seed : {1ull, 2ull, 3ull, 4ull, 5ull}) {
    const auto cfg = fig1_config(1, seed);
    const auto sample = generate(cfg.truth, n, seed);
    std::vector<ModelScore> scores;
    for (const auto& model : make_regular_collection(cfg.dims)) {
      const auto f = fit(sample, model);
      if (!f.admissible) continue;
      scores.push_back({model.id(), empirical_risk(f, sample),
                        static_cast<double>(model.dim()), model.dim()});
    }
    const double k = kmin_slope(scores, default_slope_window(n));
    // Minimal constant for unit noise is about sigma^2 / n.
    CHECK(k * n > 0.5);
    CHECK(k * n < 2.0);
  }
}

TEST_CASE("calibrate combines the two rules and reports agreement") {
  SUBCASE("one clear jump: both rules select the same model") {
    const auto scores = scores_for_jumps({37, 36, 12, 8}, {0.001, 0.005, 0.2});
    // Max drop 36->12 at K = 0.005; threshold 19 reached there too.
    const auto report = calibrate(scores, CalibrationConfig{ThresholdConfig{19}, {}});
    CHECK(report.k_min_thresh == doctest::Approx(0.005).epsilon(1e-12));
    CHECK(report.k_min_maxjump == doctest::Approx(0.005).epsilon(1e-12));
    CHECK(report.selected_thresh == "d12");  // m(2 * 0.005), before 0.2
    CHECK(report.agreement);
    CHECK_FALSE(report.warning.has_value());
    CHECK_FALSE(report.k_min_slope.has_value());
  }
  SUBCASE("two distant jumps: rules disagree and a warning is raised") {
    // Threshold 19 is reached early (D=19 at 0.001), but the largest drop
    // (18 -> 2) sits far away at 0.1: the selections differ.
    const auto scores = scores_for_jumps({25, 19, 18, 2}, {0.001, 0.004, 0.1});
    const auto report = calibrate(scores, CalibrationConfig{ThresholdConfig{19}, {}});
    CHECK(report.k_min_thresh == doctest::Approx(0.001).epsilon(1e-12));
    CHECK(report.k_min_maxjump == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(report.selected_thresh == "d19");
    CHECK(report.selected_maxjump == "d2");
    CHECK_FALSE(report.agreement);
    REQUIRE(report.warning.has_value());
    CHECK(report.warning->find("K -> dimension") != std::string::npos);
  }
  SUBCASE("a single-model collection cannot be calibrated") {
    const std::vector<ModelScore> one{{"m", 0.4, 2.0, 2}};
    CHECK_THROWS_AS(calibrate(one, CalibrationConfig{ThresholdConfig{19}, {}}),
                    std::runtime_error);
  }
  SUBCASE("slope estimate appears when a window is configured") {
    const auto scores = scores_for_jumps({37, 30, 22, 12, 8}, {0.001, 0.002, 0.005, 0.2});
    CalibrationConfig cfg{ThresholdConfig{19}, SlopeWindow{12, 37}};
    const auto report = calibrate(scores, cfg);
    REQUIRE(report.k_min_slope.has_value());
    CHECK(*report.k_min_slope > 0.0);
  }
}

TEST_CASE("selection consistency: calibrate picks what the brute force picks") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<ModelScore> scores;
    const int count = 5 + static_cast<int>(unif(rng) * 30);
    for (int i = 0; i < count; ++i)
      scores.push_back({"m" + std::to_string(i), unif(rng), unif(rng) * 40, i + 1});
    CalibrationReport report;
    try {
      report = calibrate(scores, CalibrationConfig{ThresholdConfig{20}, {}});
    } catch (const std::runtime_error&) {
      continue;  // threshold never reached or no jump: nothing to check
    }
    CHECK(scores[brute_force_argmin(scores, 2.0 * report.k_min_thresh)].model_id ==
          report.selected_thresh);
    CHECK(scores[brute_force_argmin(scores, 2.0 * report.k_min_maxjump)].model_id ==
          report.selected_maxjump);
  }
}

TEST_CASE("calibration invariances") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  // Dyadic grids keep the scaling and shifting exact in floating point.
  auto dyadic = [&] { return std::floor(unif(rng) * 1048576.0) / 1048576.0; };

  int exercised = 0;
  for (int trial = 0; trial < 80; ++trial) {
    std::vector<ModelScore> scores;
    const int count = 6 + static_cast<int>(unif(rng) * 20);
    for (int i = 0; i < count; ++i)
      scores.push_back({"m" + std::to_string(i), dyadic(), dyadic() * 32, i + 1});
    const CalibrationConfig cfg{ThresholdConfig{10}, {}};
    CalibrationReport base;
    try {
      base = calibrate(scores, cfg);
    } catch (const std::runtime_error&) {
      continue;
    }
    ++exercised;

    // Scaling g by a power of two divides both constants exactly and keeps
    // the selections.
    for (const double c : {0.5, 2.0, 8.0}) {
      auto scaled = scores;
      for (auto& s : scaled) s.g *= c;
      const auto rep = calibrate(scaled, cfg);
      CHECK(rep.k_min_thresh == base.k_min_thresh / c);
      CHECK(rep.k_min_maxjump == base.k_min_maxjump / c);
      CHECK(rep.selected_thresh == base.selected_thresh);
      CHECK(rep.selected_maxjump == base.selected_maxjump);
      CHECK(rep.agreement == base.agreement);
    }
    // Shifting f by a dyadic constant changes nothing at all.
    for (const double shift : {0.25, 3.0, -1.5}) {
      auto shifted = scores;
      for (auto& s : shifted) s.f += shift;
      const auto rep = calibrate(shifted, cfg);
      CHECK(rep.k_min_thresh == base.k_min_thresh);
      CHECK(rep.k_min_maxjump == base.k_min_maxjump);
      CHECK(rep.selected_thresh == base.selected_thresh);
      CHECK(rep.selected_maxjump == base.selected_maxjump);
    }
  }
  CHECK(exercised > 20);
}

TEST_CASE("default threshold and slope window follow the sample size") {
  CHECK(default_d_thresh(200) == 18);  // floor(200 / (2 ln 200))
  CHECK(default_d_thresh(1000) == 72);
  CHECK(default_slope_window(200).min_dim == 14);  // max(floor(sqrt 200), 3)
  CHECK(default_slope_window(9).min_dim == 3);
}
