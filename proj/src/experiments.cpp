#include "slopecal/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <limits>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

#include "slopecal/rng.hpp"

namespace slopecal {
namespace {

/// Order-independent reduction: summing a fixed-index vector pairwise keeps
/// the result identical however the entries were produced, and cuts the
/// accumulation error on long runs.
double pairwise_sum(const std::vector<double>& v, std::size_t lo, std::size_t hi) {
  if (hi - lo <= 8) {
    double acc = 0.0;
    for (std::size_t i = lo; i < hi; ++i) acc += v[i];
    return acc;
  }
  const std::size_t mid = lo + (hi - lo) / 2;
  return pairwise_sum(v, lo, mid) + pairwise_sum(v, mid, hi);
}

double pairwise_sum(const std::vector<double>& v) { return pairwise_sum(v, 0, v.size()); }

double median_of(std::vector<int> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  if (v.size() % 2 == 1) return v[m];
  return 0.5 * (v[m - 1] + v[m]);
}

/// Everything shared read-only across replicates.
struct BenchmarkContext {
  std::vector<PartitionModel> models;
  std::vector<TruthMoments> moments;
};

BenchmarkContext make_context(const BenchmarkConfig& cfg) {
  if (cfg.replicates < 1) throw std::invalid_argument("run_benchmark: replicates must be >= 1");
  if (cfg.dims.empty()) throw std::invalid_argument("run_benchmark: empty dimension list");
  for (int d : cfg.dims)
    if (d < 1) throw std::invalid_argument("run_benchmark: dimensions must be >= 1");
  BenchmarkContext ctx;
  ctx.models = make_regular_collection(cfg.dims, cfg.truth.lo, cfg.truth.hi);
  ctx.moments.reserve(ctx.models.size());
  for (const auto& m : ctx.models) ctx.moments.push_back(compute_moments(cfg.truth, m));
  return ctx;
}

struct FittedCollection {
  std::vector<std::size_t> admissible;  // indices into ctx.models
  std::vector<FittedRegressogram> fits; // parallel to admissible
  std::vector<ModelScore> scores;       // parallel to admissible; g = D_m
  std::vector<double> losses;           // true excess loss per admissible model
};

FittedCollection fit_admissible(const BenchmarkContext& ctx, const BenchmarkConfig& cfg,
                                const Sample& sample) {
  FittedCollection fc;
  for (std::size_t j = 0; j < ctx.models.size(); ++j) {
    auto f = fit(sample, ctx.models[j]);
    if (!f.admissible) continue;
    const double risk = empirical_risk(f, sample);
    fc.scores.push_back(ModelScore{ctx.models[j].id(), risk,
                                   static_cast<double>(ctx.models[j].dim()),
                                   ctx.models[j].dim()});
    const auto q = oracle_quantities(f, sample, cfg.truth, ctx.moments[j]);
    fc.losses.push_back(q.excess_loss_estimator);
    fc.admissible.push_back(j);
    fc.fits.push_back(std::move(f));
  }
  return fc;
}

ReplicateRecord run_one(const BenchmarkContext& ctx, const BenchmarkConfig& cfg,
                        std::uint64_t replicate) {
  ReplicateRecord rec;
  rec.replicate = replicate;
  const Sample sample = generate(cfg.truth, cfg.n, mix_seed(cfg.seed, replicate));
  FittedCollection fc = fit_admissible(ctx, cfg, sample);
  if (fc.scores.empty()) {
    rec.failure = ReplicateFailure::kAllInadmissible;
    return rec;
  }

  const SelectionPath path = compute_path(fc.scores);
  if (path.segments().size() < 2) {
    rec.failure = ReplicateFailure::kNoJump;
    return rec;
  }
  const ThresholdKmin kt = kmin_thresh(path, ThresholdConfig{cfg.d_thresh});
  const double kj = kmin_maxjump(path);
  rec.k_min_thresh = kt.value;
  rec.k_min_maxjump = kj;

  const std::size_t sel_t = brute_force_argmin(fc.scores, 2.0 * kt.value);
  const std::size_t sel_j = brute_force_argmin(fc.scores, 2.0 * kj);

  // Unbiased-risk baseline: residual mean square of the finest admissible
  // model (divisor n - D), penalty 2 sigma_hat^2 D / n.
  std::size_t finest = 0;
  for (std::size_t i = 1; i < fc.scores.size(); ++i)
    if (fc.scores[i].dim > fc.scores[finest].dim) finest = i;
  const double n = static_cast<double>(cfg.n);
  const double dof = std::max(1.0, n - fc.scores[finest].dim);
  const double sigma_hat2 = fc.scores[finest].f * n / dof;
  std::vector<ModelScore> mallows = fc.scores;
  for (auto& s : mallows) s.g = 2.0 * sigma_hat2 * s.dim / n;
  const std::size_t sel_c = brute_force_argmin(mallows, 1.0);

  std::size_t oracle = 0;
  for (std::size_t i = 1; i < fc.losses.size(); ++i)
    if (fc.losses[i] < fc.losses[oracle]) oracle = i;

  // Breakpoints are distinct doubles, so same value means same breakpoint.
  if (rec.k_min_thresh == rec.k_min_maxjump)
    rec.jump_case = 1;
  else if (sel_t == sel_j)
    rec.jump_case = 2;
  else
    rec.jump_case = 3;

  rec.dim_thresh = fc.scores[sel_t].dim;
  rec.dim_maxjump = fc.scores[sel_j].dim;
  rec.dim_mallows = fc.scores[sel_c].dim;
  rec.dim_oracle = fc.scores[oracle].dim;
  rec.loss_thresh = fc.losses[sel_t];
  rec.loss_maxjump = fc.losses[sel_j];
  rec.loss_mallows = fc.losses[sel_c];
  rec.loss_oracle = fc.losses[oracle];
  return rec;
}

BenchmarkResult reduce(const BenchmarkConfig& cfg, std::vector<ReplicateRecord> records) {
  BenchmarkResult result;
  result.replicates = cfg.replicates;
  result.records = std::move(records);

  std::vector<double> num_t, num_j, num_c, den;
  std::array<std::size_t, 3> cases{0, 0, 0};
  for (const auto& rec : result.records) {
    if (rec.failure != ReplicateFailure::kNone) {
      ++result.failed_replicates;
      continue;
    }
    num_t.push_back(rec.loss_thresh);
    num_j.push_back(rec.loss_maxjump);
    num_c.push_back(rec.loss_mallows);
    den.push_back(rec.loss_oracle);
    cases[static_cast<std::size_t>(rec.jump_case - 1)] += 1;
  }

  const std::size_t used = den.size();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  if (used == 0) {
    result.oracle_degenerate = true;
    result.c_or_thresh = result.c_or_maxjump = result.c_or_mallows = nan;
    result.se_thresh = result.se_maxjump = result.se_mallows = nan;
    return result;
  }
  for (std::size_t c = 0; c < 3; ++c)
    result.case_freqs[c] = static_cast<double>(cases[c]) / static_cast<double>(used);

  const double den_mean = pairwise_sum(den) / static_cast<double>(used);
  if (den_mean == 0.0) {
    result.oracle_degenerate = true;
    result.c_or_thresh = result.c_or_maxjump = result.c_or_mallows = nan;
    result.se_thresh = result.se_maxjump = result.se_mallows = nan;
    return result;
  }

  // Ratio of means; the standard error comes from the linearization
  // num_i - R * den_i of the ratio around its value.
  auto ratio_and_se = [&](const std::vector<double>& num, double* se) {
    const double r = pairwise_sum(num) / static_cast<double>(used) / den_mean;
    std::vector<double> infl(used);
    for (std::size_t i = 0; i < used; ++i) infl[i] = num[i] - r * den[i];
    const double mean_infl = pairwise_sum(infl) / static_cast<double>(used);
    std::vector<double> sq(used);
    for (std::size_t i = 0; i < used; ++i) sq[i] = (infl[i] - mean_infl) * (infl[i] - mean_infl);
    const double var = pairwise_sum(sq) / std::max<double>(1.0, static_cast<double>(used - 1));
    *se = std::sqrt(var / static_cast<double>(used)) / den_mean;
    return r;
  };
  result.c_or_thresh = ratio_and_se(num_t, &result.se_thresh);
  result.c_or_maxjump = ratio_and_se(num_j, &result.se_maxjump);
  result.c_or_mallows = ratio_and_se(num_c, &result.se_mallows);
  return result;
}

template <typename Kernel>
void replicate_loop_serial(std::size_t replicates, const Kernel& kernel) {
  for (std::int64_t r = 0; r < static_cast<std::int64_t>(replicates); ++r) kernel(r);
}

template <typename Kernel>
void replicate_loop_parallel(std::size_t replicates, const Kernel& kernel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
  for (std::int64_t r = 0; r < static_cast<std::int64_t>(replicates); ++r) kernel(r);
}

}  // namespace

std::vector<int> default_dims(std::size_t n) {
  if (n < 2) return {1};
  const int top = std::max(
      1, static_cast<int>(std::floor(static_cast<double>(n) / std::log(static_cast<double>(n)))));
  std::vector<int> dims(static_cast<std::size_t>(top));
  for (int d = 1; d <= top; ++d) dims[static_cast<std::size_t>(d - 1)] = d;
  return dims;
}

BenchmarkConfig fig1_config(std::size_t replicates, std::uint64_t seed) {
  BenchmarkConfig cfg;
  cfg.n = 200;
  cfg.replicates = replicates;
  cfg.truth.s = [](double x) { return std::sin(3.14159265358979323846 * x); };
  cfg.truth.sigma = [](double) { return 1.0; };
  cfg.dims = default_dims(cfg.n);  // 1..37
  cfg.d_thresh = 19;
  cfg.seed = seed;
  return cfg;
}

BenchmarkResult run_benchmark(const BenchmarkConfig& cfg) {
  const BenchmarkContext ctx = make_context(cfg);
  std::vector<ReplicateRecord> records(cfg.replicates);
  replicate_loop_parallel(cfg.replicates, [&](std::int64_t r) {
    records[static_cast<std::size_t>(r)] = run_one(ctx, cfg, static_cast<std::uint64_t>(r));
  });
  return reduce(cfg, std::move(records));
}

BenchmarkResult run_benchmark_serial(const BenchmarkConfig& cfg) {
  const BenchmarkContext ctx = make_context(cfg);
  std::vector<ReplicateRecord> records(cfg.replicates);
  replicate_loop_serial(cfg.replicates, [&](std::int64_t r) {
    records[static_cast<std::size_t>(r)] = run_one(ctx, cfg, static_cast<std::uint64_t>(r));
  });
  return reduce(cfg, std::move(records));
}

DimensionJumpReport verify_dimension_jump(const BenchmarkConfig& cfg,
                                          const PenaltyShape& ideal_shape) {
  const BenchmarkContext ctx = make_context(cfg);
  if (ideal_shape.values.size() != ctx.models.size())
    throw std::invalid_argument("verify_dimension_jump: shape does not match the collection");

  DimensionJumpReport report;
  report.multipliers = {0.5, 0.75, 1.25, 2.0};
  report.replicates = cfg.replicates;
  report.dims_at.assign(report.multipliers.size(), std::vector<int>(cfg.replicates, 0));

  replicate_loop_parallel(cfg.replicates, [&](std::int64_t r) {
    const Sample sample = generate(cfg.truth, cfg.n, mix_seed(cfg.seed, static_cast<std::uint64_t>(r)));
    std::vector<ModelScore> scores;
    for (std::size_t j = 0; j < ctx.models.size(); ++j) {
      auto f = fit(sample, ctx.models[j]);
      if (!f.admissible) continue;
      // The ideal shape estimates twice the minimal penalty; multipliers are
      // measured against the minimal one.
      scores.push_back(ModelScore{ctx.models[j].id(), empirical_risk(f, sample),
                                  0.5 * ideal_shape.values[j], ctx.models[j].dim()});
    }
    for (std::size_t k = 0; k < report.multipliers.size(); ++k) {
      // A replicate with no admissible model records dimension 0.
      const std::size_t sel = scores.empty() ? 0 : brute_force_argmin(scores, report.multipliers[k]);
      report.dims_at[k][static_cast<std::size_t>(r)] = scores.empty() ? 0 : scores[sel].dim;
    }
  });

  report.median_dim.resize(report.multipliers.size());
  for (std::size_t k = 0; k < report.multipliers.size(); ++k)
    report.median_dim[k] = median_of(report.dims_at[k]);

  const double n = static_cast<double>(cfg.n);
  const double low_cut = n / (std::log(n) * std::log(n));
  const double high_cut = std::pow(n, 0.9);
  std::size_t low_ok = 0, high_ok = 0;
  for (std::size_t r = 0; r < cfg.replicates; ++r) {
    if (report.dims_at[0][r] >= low_cut) ++low_ok;
    if (report.dims_at[3][r] <= high_cut) ++high_ok;
  }
  report.frac_low_huge = static_cast<double>(low_ok) / static_cast<double>(cfg.replicates);
  report.frac_high_small = static_cast<double>(high_ok) / static_cast<double>(cfg.replicates);
  return report;
}

P1P2Report verify_p1_p2(const BenchmarkConfig& cfg, const PartitionModel& model) {
  const TruthMoments moments = compute_moments(cfg.truth, model);

  P1P2Report report;
  report.replicates = cfg.replicates;
  double min_p = moments.cell_p[0];
  for (double p : moments.cell_p) min_p = std::min(min_p, p);
  const double b = static_cast<double>(cfg.n) * min_p;
  report.min_np = b;
  report.bracket_lo = (1.0 - std::exp(-b)) * (1.0 - std::exp(-b));
  const double bmax = std::max(b, 1.0);
  report.bracket_hi =
      std::min(2.0, 1.0 + 5.1 * std::pow(b, -0.25)) + bmax * std::exp(-bmax);

  std::vector<double> p1s(cfg.replicates), p2s(cfg.replicates);
  replicate_loop_parallel(cfg.replicates, [&](std::int64_t r) {
    const Sample sample = generate(cfg.truth, cfg.n, mix_seed(cfg.seed, static_cast<std::uint64_t>(r)));
    const auto f = fit(sample, model);
    const auto q = oracle_quantities(f, sample, cfg.truth, moments);
    p1s[static_cast<std::size_t>(r)] = q.p1;
    p2s[static_cast<std::size_t>(r)] = q.p2;
  });

  const double m = static_cast<double>(cfg.replicates);
  report.mean_p1 = pairwise_sum(p1s) / m;
  report.mean_p2 = pairwise_sum(p2s) / m;
  auto se = [&](const std::vector<double>& v, double mean) {
    if (v.size() < 2) return 0.0;
    std::vector<double> sq(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) sq[i] = (v[i] - mean) * (v[i] - mean);
    return std::sqrt(pairwise_sum(sq) / (m - 1.0) / m);
  };
  report.se_p1 = se(p1s, report.mean_p1);
  report.se_p2 = se(p2s, report.mean_p2);
  if (report.mean_p1 == 0.0 && report.mean_p2 == 0.0) {
    report.degenerate = true;
    report.ratio = std::numeric_limits<double>::quiet_NaN();
  } else {
    report.ratio = report.mean_p1 / report.mean_p2;
  }
  return report;
}

void write_benchmark_csv(const BenchmarkResult& result, std::ostream& out) {
  out << "replicate,failed,k_min_thresh,k_min_maxjump,jump_case,"
         "dim_thresh,dim_maxjump,dim_mallows,dim_oracle,"
         "loss_thresh,loss_maxjump,loss_mallows,loss_oracle\n";
  const auto fmt = [&](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  for (const auto& rec : result.records) {
    const bool failed = rec.failure != ReplicateFailure::kNone;
    out << rec.replicate << ',' << (failed ? 1 : 0) << ',';
    if (failed) {
      out << ",,,,,,,,,,\n";
      continue;
    }
    out << fmt(rec.k_min_thresh) << ',' << fmt(rec.k_min_maxjump) << ',' << rec.jump_case
        << ',' << rec.dim_thresh << ',' << rec.dim_maxjump << ',' << rec.dim_mallows << ','
        << rec.dim_oracle << ',' << fmt(rec.loss_thresh) << ',' << fmt(rec.loss_maxjump)
        << ',' << fmt(rec.loss_mallows) << ',' << fmt(rec.loss_oracle) << '\n';
  }
}

std::string benchmark_summary_json(const BenchmarkResult& result, const BenchmarkConfig& cfg) {
  nlohmann::json j;
  auto set_or_null = [&](const char* key, double v) {
    if (std::isnan(v))
      j[key] = nullptr;
    else
      j[key] = v;
  };
  set_or_null("c_or_thresh", result.c_or_thresh);
  set_or_null("c_or_thresh_se", result.se_thresh);
  set_or_null("c_or_maxjump", result.c_or_maxjump);
  set_or_null("c_or_maxjump_se", result.se_maxjump);
  set_or_null("c_or_mallows", result.c_or_mallows);
  set_or_null("c_or_mallows_se", result.se_mallows);
  j["case_freqs"] = result.case_freqs;
  j["agreement_freq"] = result.case_freqs[0] + result.case_freqs[1];
  j["replicates"] = result.replicates;
  j["failed_replicates"] = result.failed_replicates;
  j["oracle_degenerate"] = result.oracle_degenerate;
  j["n"] = cfg.n;
  j["seed"] = cfg.seed;
  j["d_thresh"] = cfg.d_thresh;
  return j.dump(2);
}

}  // namespace slopecal
