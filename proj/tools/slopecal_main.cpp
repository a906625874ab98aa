// Command-line front end: data ingestion, penalty calibration, selection-path
// export for inspection of the K -> dimension curve, and the Monte-Carlo
// benchmark.
//
// Exit codes: 0 success (calibrate: the two rules agree), 1 input or usage
// error, 2 calibrate ran but the two rules disagree (the JSON report carries
// the warning).

#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "slopecal/calibrate.hpp"
#include "slopecal/experiments.hpp"
#include "slopecal/path.hpp"
#include "slopecal/penalty.hpp"
#include "slopecal/regressogram.hpp"

namespace {

using slopecal::ModelScore;

struct CsvError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  fields.push_back(cur);
  return fields;
}

double parse_double(const std::string& s, std::size_t row, const std::string& what) {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0' || errno == ERANGE)
    throw CsvError("row " + std::to_string(row) + ": cannot parse " + what + " value '" + s + "'");
  return v;
}

slopecal::Sample read_sample_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CsvError("cannot open '" + path + "'");
  std::string line;
  std::size_t row = 0;
  if (!std::getline(in, line)) throw CsvError("row 1: empty file");
  ++row;
  if (split_csv_line(line) != std::vector<std::string>{"x", "y"})
    throw CsvError("row 1: header must be exactly 'x,y'");

  std::vector<double> xs, ys;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() && in.eof()) break;
    const auto fields = split_csv_line(line);
    if (fields.size() != 2)
      throw CsvError("row " + std::to_string(row) + ": expected 2 fields, got " +
                     std::to_string(fields.size()));
    const double x = parse_double(fields[0], row, "x");
    const double y = parse_double(fields[1], row, "y");
    if (!(x >= 0.0 && x <= 1.0))
      throw CsvError("row " + std::to_string(row) + ": x must lie in [0,1], got " + fields[0]);
    xs.push_back(x);
    ys.push_back(y);
  }
  if (xs.empty()) throw CsvError("row " + std::to_string(row) + ": no observations");
  return slopecal::Sample(std::move(xs), std::move(ys));
}

std::vector<ModelScore> read_scores_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CsvError("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw CsvError("row 1: empty scores file");
  const auto header = split_csv_line(line);
  auto col = [&](const std::string& name) {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return i;
    throw CsvError("row 1: scores file needs a '" + name + "' column");
  };
  const std::size_t c_id = col("model_id"), c_f = col("f"), c_g = col("g"), c_d = col("d_m");

  std::vector<ModelScore> scores;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() && in.eof()) break;
    const auto fields = split_csv_line(line);
    if (fields.size() != header.size())
      throw CsvError("row " + std::to_string(row) + ": expected " +
                     std::to_string(header.size()) + " fields, got " +
                     std::to_string(fields.size()));
    ModelScore s;
    s.model_id = fields[c_id];
    s.f = parse_double(fields[c_f], row, "f");
    s.g = parse_double(fields[c_g], row, "g");
    s.dim = static_cast<int>(parse_double(fields[c_d], row, "d_m"));
    scores.push_back(std::move(s));
  }
  if (scores.empty()) throw CsvError("scores file has no rows");
  return scores;
}

/// Fits the regular-partition collection and scores the admissible models
/// with the requested shape.
std::vector<ModelScore> build_scores(const slopecal::Sample& sample,
                                     const std::vector<int>& dims,
                                     const std::string& shape_kind) {
  const auto models = slopecal::make_regular_collection(dims);
  std::vector<slopecal::FittedRegressogram> fits;
  std::vector<std::size_t> admissible;
  for (std::size_t j = 0; j < models.size(); ++j) {
    auto f = slopecal::fit(sample, models[j]);
    if (!f.admissible) continue;
    admissible.push_back(j);
    fits.push_back(std::move(f));
  }
  if (admissible.empty()) throw CsvError("no model in the collection is admissible");

  std::vector<double> g(admissible.size());
  if (shape_kind == "dimension") {
    for (std::size_t i = 0; i < admissible.size(); ++i)
      g[i] = static_cast<double>(models[admissible[i]].dim());
  } else if (shape_kind == "plugin") {
    std::vector<slopecal::PartitionModel> kept;
    for (std::size_t j : admissible) kept.push_back(models[j]);
    g = slopecal::shape_plugin(sample, kept).values;
  } else {
    throw CsvError("unknown shape '" + shape_kind + "'");
  }

  std::vector<ModelScore> scores(admissible.size());
  for (std::size_t i = 0; i < admissible.size(); ++i) {
    scores[i].model_id = models[admissible[i]].id();
    scores[i].f = slopecal::empirical_risk(fits[i], sample);
    scores[i].g = g[i];
    scores[i].dim = models[admissible[i]].dim();
  }
  return scores;
}

std::vector<int> parse_dims(const std::string& arg, std::size_t n) {
  if (arg.empty()) return slopecal::default_dims(n);
  std::vector<int> dims;
  std::stringstream ss(arg);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    const int d = std::atoi(tok.c_str());
    if (d < 1) throw CsvError("--dims entries must be integers >= 1, got '" + tok + "'");
    dims.push_back(d);
  }
  if (dims.empty()) throw CsvError("--dims is empty");
  return dims;
}

std::optional<slopecal::SlopeWindow> parse_slope_window(const std::string& arg) {
  if (arg.empty()) return std::nullopt;
  slopecal::SlopeWindow w;
  const auto comma = arg.find(',');
  w.min_dim = std::atoi(arg.substr(0, comma).c_str());
  if (comma != std::string::npos) w.max_dim = std::atoi(arg.substr(comma + 1).c_str());
  if (w.min_dim < 1 || w.max_dim < w.min_dim)
    throw CsvError("--slope-window must be MIN or MIN,MAX with 1 <= MIN <= MAX");
  return w;
}

void write_text(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw CsvError("cannot write '" + out_path + "'");
  out << text;
}

std::string report_to_json(const slopecal::CalibrationReport& report) {
  nlohmann::json j;
  j["k_min_thresh"] = report.k_min_thresh;
  j["k_min_maxjump"] = report.k_min_maxjump;
  if (report.k_min_slope)
    j["k_min_slope"] = *report.k_min_slope;
  else
    j["k_min_slope"] = nullptr;
  j["selected_thresh"] = report.selected_thresh;
  j["selected_maxjump"] = report.selected_maxjump;
  j["agreement"] = report.agreement;
  if (report.warning)
    j["warning"] = *report.warning;
  else
    j["warning"] = nullptr;
  return j.dump(2) + "\n";
}

std::string path_to_csv(const slopecal::SelectionPath& path) {
  std::ostringstream out;
  out << "k,model_id,d_m,f,g\n";
  char buf[32];
  auto fmt = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  for (const auto& seg : path.segments())
    out << fmt(seg.k_from) << ',' << seg.model_id << ',' << seg.dim << ',' << fmt(seg.f)
        << ',' << fmt(seg.g) << '\n';
  return out.str();
}

slopecal::TrueModelSpec truth_from_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CsvError("cannot open truth spec '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw CsvError("truth spec '" + path + "': " + e.what());
  }
  slopecal::TrueModelSpec truth;
  const std::string s_kind = j.at("s").at("kind").get<std::string>();
  if (s_kind == "sin_pi") {
    truth.s = [](double x) { return std::sin(3.14159265358979323846 * x); };
  } else if (s_kind == "constant") {
    const double v = j.at("s").value("value", 0.0);
    truth.s = [v](double) { return v; };
  } else if (s_kind == "linear") {
    const double a = j.at("s").value("intercept", 0.0);
    const double b = j.at("s").value("slope", 1.0);
    truth.s = [a, b](double x) { return a + b * x; };
  } else {
    throw CsvError("truth spec: unknown s.kind '" + s_kind + "'");
  }
  const std::string sig_kind = j.at("sigma").at("kind").get<std::string>();
  if (sig_kind == "const") {
    const double v = j.at("sigma").value("value", 1.0);
    if (v < 0.0) throw CsvError("truth spec: sigma value must be >= 0");
    truth.sigma = [v](double) { return v; };
  } else if (sig_kind == "linear") {
    const double a = j.at("sigma").value("intercept", 0.0);
    const double b = j.at("sigma").value("slope", 1.0);
    truth.sigma = [a, b](double x) { return a + b * x; };
  } else {
    throw CsvError("truth spec: unknown sigma.kind '" + sig_kind + "'");
  }
  return truth;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Slope-heuristics penalty calibration for regressogram selection"};
  app.require_subcommand(1);

  // --- calibrate ---
  std::string cal_input, cal_dims, cal_shape = "dimension", cal_window, cal_out;
  int cal_dthresh = 0;
  auto* cal = app.add_subcommand("calibrate", "Calibrate the penalty on a CSV dataset");
  cal->add_option("input", cal_input, "CSV file with header x,y")->required();
  cal->add_option("--dims", cal_dims, "comma-separated model dimensions (default 1..n/ln n)");
  cal->add_option("--shape", cal_shape, "penalty shape: dimension|plugin")
      ->check(CLI::IsMember({"dimension", "plugin"}));
  cal->add_option("--d-thresh", cal_dthresh, "dimension threshold (default n/(2 ln n))");
  cal->add_option("--slope-window", cal_window, "slope-rule window MIN or MIN,MAX");
  cal->add_option("--out", cal_out, "write the JSON report here instead of stdout");

  // --- path ---
  std::string path_input, path_scores, path_dims, path_shape = "dimension", path_out;
  auto* pathcmd = app.add_subcommand("path", "Export the selection path as CSV");
  pathcmd->add_option("input", path_input, "CSV file with header x,y");
  pathcmd->add_option("--scores-file", path_scores,
                      "CSV with columns model_id,f,g,d_m (bypasses fitting)");
  pathcmd->add_option("--dims", path_dims, "comma-separated model dimensions");
  pathcmd->add_option("--shape", path_shape, "penalty shape: dimension|plugin")
      ->check(CLI::IsMember({"dimension", "plugin"}));
  pathcmd->add_option("--out", path_out, "write the CSV here instead of stdout");

  // --- benchmark ---
  std::string bench_truth = "fig1", bench_out = "benchmark";
  std::size_t bench_n = 200, bench_reps = 1000;
  std::uint64_t bench_seed = 0;
  int bench_dthresh = 0;
  auto* bench = app.add_subcommand("benchmark", "Run the Monte-Carlo benchmark");
  bench->add_option("--truth", bench_truth, "fig1 or a JSON truth spec file");
  bench->add_option("--n", bench_n, "sample size per replicate");
  bench->add_option("--replicates", bench_reps, "number of replicates");
  bench->add_option("--seed", bench_seed, "base seed");
  bench->add_option("--d-thresh", bench_dthresh, "dimension threshold");
  bench->add_option("--out", bench_out, "output prefix (PREFIX.csv and PREFIX.json)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (cal->parsed()) {
      const auto sample = read_sample_csv(cal_input);
      const auto dims = parse_dims(cal_dims, sample.n());
      const auto scores = build_scores(sample, dims, cal_shape);
      slopecal::CalibrationConfig cfg;
      cfg.threshold.d_thresh =
          cal_dthresh > 0 ? cal_dthresh : slopecal::default_d_thresh(sample.n());
      cfg.slope_window = parse_slope_window(cal_window);
      const auto report = slopecal::calibrate(scores, cfg);
      if (report.k_min_thresh == 0.0)
        std::cerr << "note: the first path segment already satisfies the dimension "
                     "threshold; the threshold rule returned 0 and is likely "
                     "mis-specified\n";
      write_text(report_to_json(report), cal_out);
      if (!report.agreement) {
        std::cerr << "warning: " << *report.warning << "\n";
        return 2;
      }
      return 0;
    }

    if (pathcmd->parsed()) {
      std::vector<ModelScore> scores;
      if (!path_scores.empty()) {
        scores = read_scores_csv(path_scores);
      } else if (!path_input.empty()) {
        const auto sample = read_sample_csv(path_input);
        scores = build_scores(sample, parse_dims(path_dims, sample.n()), path_shape);
      } else {
        std::cerr << "error: path needs an input CSV or --scores-file\n";
        return 1;
      }
      write_text(path_to_csv(slopecal::compute_path(scores)), path_out);
      return 0;
    }

    // benchmark
    slopecal::BenchmarkConfig cfg = slopecal::fig1_config(bench_reps, bench_seed);
    if (bench_truth != "fig1") cfg.truth = truth_from_json(bench_truth);
    cfg.n = bench_n;
    cfg.dims = slopecal::default_dims(cfg.n);
    cfg.d_thresh = bench_dthresh > 0 ? bench_dthresh
                   : bench_truth == "fig1" && bench_n == 200
                       ? 19
                       : slopecal::default_d_thresh(cfg.n);
    const auto result = slopecal::run_benchmark(cfg);
    std::ofstream csv(bench_out + ".csv", std::ios::binary);
    if (!csv) throw CsvError("cannot write '" + bench_out + ".csv'");
    slopecal::write_benchmark_csv(result, csv);
    const std::string summary = slopecal::benchmark_summary_json(result, cfg) + "\n";
    std::ofstream js(bench_out + ".json", std::ios::binary);
    if (!js) throw CsvError("cannot write '" + bench_out + ".json'");
    js << summary;
    std::cout << summary;
    return 0;
  } catch (const CsvError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
