// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// non-zero when any criterion fails.

#include "bagvar/anova.hpp"
#include "bagvar/bagging.hpp"
#include "bagvar/error.hpp"
#include "bagvar/generators.hpp"
#include "bagvar/learners.hpp"
#include "bagvar/study.hpp"
#include "bagvar/variance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#ifndef BAGVAR_CLI_PATH
#error "BAGVAR_CLI_PATH must name the bagvar executable"
#endif
#ifndef BAGVAR_DATA_DIR
#error "BAGVAR_DATA_DIR must name the bundled data directory"
#endif

using namespace bagvar;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void criterion(int id, const std::string& name, double limit_seconds, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome out;
  try {
    out = body();
  } catch (const std::exception& e) {
    out = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const bool in_time = secs < limit_seconds;
  const bool pass = out.pass && in_time;
  if (!pass) ++failures;
  std::printf("[%s] %d %s: %s; runtime %.1fs (limit %.0fs)%s\n", pass ? "PASS" : "FAIL", id, name.c_str(),
              out.detail.c_str(), secs, limit_seconds, in_time ? "" : " EXCEEDED");
  std::fflush(stdout);
}

std::string fmt(double v, int precision = 4) {
  std::ostringstream ss;
  ss.precision(precision);
  ss << v;
  return ss.str();
}

double mean_of(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / v.size(); }

double variance_of(const std::vector<double>& v) {
  const double m = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return ss / (v.size() - 1);
}

ResamplePlan plan(std::size_t n, std::size_t b, std::uint64_t seed) {
  ResamplePlan p;
  p.n = n;
  p.replicates = b;
  p.seed = seed;
  return p;
}

Dataset normal_sample(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z;
  Matrix x(n, 1);
  Vector y(n);
  for (std::size_t i = 0; i < n; ++i) {
    x(i, 0) = static_cast<double>(i);
    y(i) = z(rng);
  }
  return Dataset(x, y);
}

// --- 1 ---------------------------------------------------------------------

// Straight transcription of the IJ and jackknife-after-bootstrap formulas.
struct Brute {
  double ij;
  double j;
};

Brute brute_force(const std::vector<std::vector<int>>& counts, const std::vector<double>& t) {
  const std::size_t b = counts.size();
  const std::size_t n = counts[0].size();
  double tbar = 0.0;
  for (double v : t) tbar += v;
  tbar /= b;
  Brute out{0.0, 0.0};
  for (std::size_t i = 0; i < n; ++i) {
    double cov = 0.0;
    for (std::size_t r = 0; r < b; ++r) cov += (counts[r][i] - 1.0) * (t[r] - tbar);
    cov /= b;
    out.ij += cov * cov;

    double sum_out = 0.0;
    std::size_t n_out = 0;
    for (std::size_t r = 0; r < b; ++r) {
      if (counts[r][i] == 0) {
        sum_out += t[r];
        ++n_out;
      }
    }
    const double delta = (n_out == 0 || n_out == b) ? 0.0 : sum_out / n_out - tbar;
    out.j += delta * delta;
  }
  out.j *= (n - 1.0) / n;
  return out;
}

Outcome transcription() {
  std::mt19937_64 rng(20240601);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + rng() % 5;
    const std::size_t b = 2 + rng() % 7;
    std::vector<std::vector<int>> counts(b, std::vector<int>(n, 0));
    CountArray array(b, n);
    for (std::size_t r = 0; r < b; ++r) {
      for (std::size_t k = 0; k < n; ++k) ++counts[r][rng() % n];
      for (std::size_t i = 0; i < n; ++i) array(r, i) = counts[r][i];
    }
    std::vector<double> t(b);
    std::normal_distribution<double> z(0.0, 2.0);
    for (auto& v : t) v = (trial % 7 == 0) ? std::round(z(rng)) : z(rng);

    const CountMatrix cm(array, n);
    const Brute ref = brute_force(counts, t);
    worst = std::max(worst, std::abs(ij_variance(cm, t).raw_value - ref.ij));
    worst = std::max(worst, std::abs(jackknife_variance(cm, t).raw_value - ref.j));

    ResampleTrace trace;
    trace.counts = cm;
    trace.predictions = Eigen::Map<const Vector>(t.data(), b);
    const TraceEstimates all = estimate_all(trace);
    worst = std::max(worst, std::abs(all.ij(0) - ref.ij));
    worst = std::max(worst, std::abs(all.jackknife(0) - ref.j));
  }
  return {worst <= 1e-12, "max abs deviation " + fmt(worst) + " over 1000 traces (tol 1e-12)"};
}

// --- 2 ---------------------------------------------------------------------

Outcome delta_method() {
  const auto learner = make_learner({LearnerKind::sample_mean});
  std::vector<double> ratios;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Dataset data = normal_sample(100, 1000 + seed);
    const BaggedRun run = bag_predict(data, *learner, plan(100, 20000, seed), QueryMatrix::Zero(1, 1));
    const double ybar = data.y().mean();
    const double target = (data.y().array() - ybar).square().sum() / (100.0 * 100.0);
    ratios.push_back(ij_unbiased(run.trace, 0).raw_value / target);
  }
  const double r = mean_of(ratios);
  return {std::abs(r - 1.0) <= 0.10, "mean IJ_U / target = " + fmt(r) + " over 20 seeds (tol 10%)"};
}

// --- 3 ---------------------------------------------------------------------

Outcome mc_bias_law() {
  GeneratorSpec spec;
  spec.kind = GeneratorKind::cosine;
  spec.n = 50;
  spec.seed = 11;
  const Dataset data = generate(spec);
  LearnerSpec ls;
  ls.max_leaves = 5;
  const auto learner = make_learner(ls);
  const std::vector<double> query = {0.5, 0.5};
  const McBiasCheck c = run_mc_bias_check(data, *learner, query, 100, 200, 50000, 12);
  const double rel_ij = std::abs(c.bias_ij - c.predicted_bias_ij) / c.predicted_bias_ij;
  const double rel_j = std::abs(c.bias_j - c.predicted_bias_j) / c.predicted_bias_j;
  return {rel_ij <= 0.25 && rel_j <= 0.25,
          "IJ bias " + fmt(c.bias_ij) + " vs n*v/B " + fmt(c.predicted_bias_ij) + " (rel " + fmt(rel_ij, 3) +
              "); J bias " + fmt(c.bias_j) + " vs (e-1)n*v/B " + fmt(c.predicted_bias_j) + " (rel " +
              fmt(rel_j, 3) + "); tol 25%"};
}

// --- 4 ---------------------------------------------------------------------

Outcome ratio_reproduction() {
  const std::size_t n = 100;
  const Dataset data = normal_sample(n, 404);
  const auto learner = make_learner({LearnerKind::sample_mean});
  RatioConfig c;
  c.b_grid = {n / 2, n, 2 * n, 10 * n};
  c.n_draws = 2000;
  c.reference_replicates = 200000;
  c.seed = 405;
  const std::vector<double> query = {0.0};
  const RatioExperiment e = run_mc_ratio_experiment(data, *learner, query, c);
  bool ok = true;
  std::string bias_text;
  for (const auto& p : e.points) {
    ok = ok && p.empirical_bias_ratio >= 1.4 && p.empirical_bias_ratio <= 2.1;
    bias_text += (bias_text.empty() ? "" : ",") + fmt(p.empirical_bias_ratio, 3);
  }
  const double small_b = e.points.front().empirical_var_ratio;
  const double large_b = e.points.back().empirical_var_ratio;
  ok = ok && small_b >= 2.0 && small_b <= 4.5 && large_b >= 1.3 && large_b <= 2.3;
  return {ok, "bias ratios [" + bias_text + "] in [1.4,2.1]; var ratio B=n/2 " + fmt(small_b, 3) +
                  " in [2,4.5] (theory " + fmt(e.points.front().predicted_var_ratio, 3) + "); B=10n " +
                  fmt(large_b, 3) + " in [1.3,2.3] (theory " + fmt(e.points.back().predicted_var_ratio, 3) + ")"};
}

// --- 5 ---------------------------------------------------------------------

Outcome table_directions() {
  StudyConfig c;
  c.generator.kind = GeneratorKind::cosine;
  c.generator.n = 50;
  c.learner.mtry = 1;
  c.learner.min_leaf = 5;
  c.replicates = 200;
  c.n_test = 50;
  c.n_reps = 100;
  c.seed = 2013;
  const StudyReport r = run_table_study(c);
  const StudyCell& ij = r.cell(Method::ij_unbiased);
  const StudyCell& j = r.cell(Method::jackknife_unbiased);
  const StudyCell& avg = r.cell(Method::averaged);

  const bool ij_neg = ij.bias + ij.bias_half_width < 0.0;
  const bool j_pos = j.bias - j.bias_half_width > 0.0;
  const double largest = std::max(std::abs(ij.bias) - ij.bias_half_width, std::abs(j.bias) - j.bias_half_width);
  const bool avg_small = std::abs(avg.bias) + avg.bias_half_width < largest;
  const bool var_order = ij.variance + ij.variance_half_width < j.variance - j.variance_half_width;
  const bool mse_order = ij.mse + ij.mse_half_width < j.mse - j.mse_half_width;
  const bool ok = ij_neg && j_pos && avg_small && var_order && mse_order && !r.degenerate;
  auto cell = [](const StudyCell& s) {
    return fmt(s.bias, 3) + "+-" + fmt(s.bias_half_width, 2) + "/" + fmt(s.variance, 3) + "+-" +
           fmt(s.variance_half_width, 2) + "/" + fmt(s.mse, 3) + "+-" + fmt(s.mse_half_width, 2);
  };
  return {ok, "bias/var/mse IJ_U " + cell(ij) + ", J_U " + cell(j) + ", AVG " + cell(avg) + "; checks " +
                  std::to_string(ij_neg) + std::to_string(j_pos) + std::to_string(avg_small) +
                  std::to_string(var_order) + std::to_string(mse_order) + "; truth MC share " +
                  fmt(r.truth_mc_share, 3)};
}

// --- 6 ---------------------------------------------------------------------

Outcome spike_study() {
  SpikeConfig c;
  c.n = 500;
  c.replicates = 500;
  c.n_reps = 100;
  c.seed = 2;
  const SpikeProfile p = run_spike_study(c);
  const auto peaks = local_maxima(p.mean_estimate);
  bool ok = peaks.size() >= 4;
  std::vector<double> located;
  for (std::size_t k = 0; k < 4 && k < peaks.size(); ++k) located.push_back(p.grid[peaks[k]]);
  std::sort(located.begin(), located.end());
  std::vector<bool> matched(kStepJumps.size(), false);
  for (double x : located) {
    bool hit = false;
    for (std::size_t j = 0; j < kStepJumps.size(); ++j) {
      if (!matched[j] && std::abs(x - kStepJumps[j]) <= 0.05 + 1e-12) {
        matched[j] = hit = true;
        break;
      }
    }
    ok = ok && hit;
  }
  const double frac = fraction_within_bands(p, 1.96);
  ok = ok && frac >= 0.80;
  std::string peaks_text;
  for (double x : located) peaks_text += (peaks_text.empty() ? "" : ",") + fmt(x, 3);
  return {ok, "top maxima at [" + peaks_text + "] vs jumps [0.2,0.4,0.6,0.8] (tol 0.05); within bands " +
                  fmt(100 * frac, 3) + "% (need >= 80%)"};
}

// --- 7 ---------------------------------------------------------------------

Outcome anova() {
  const DiscreteDistribution dist{{0.0, 1.0}, {0.5, 0.5}};
  const auto learner = make_max_response_learner();
  const std::vector<double> query = {0.0};
  const AnovaOracle o = anova_oracle(dist, 4, *learner, query);
  const double gap = std::abs(o.sum_terms - o.total_variance);
  const bool exact = gap <= 1e-10;
  const bool upward = o.expected_jackknife >= o.sum_terms;
  const bool averaging = std::abs(o.expected_average - o.sum_terms) <= std::abs(o.expected_jackknife - o.sum_terms);
  bool nonneg = true;
  for (double v : o.terms) nonneg = nonneg && v >= 0.0;
  return {exact && upward && averaging && nonneg,
          "sum V_k " + fmt(o.sum_terms, 6) + " vs Var " + fmt(o.total_variance, 6) + " (gap " + fmt(gap, 2) +
              "); E[J] " + fmt(o.expected_jackknife, 6) + ", E[IJ] " + fmt(o.expected_ij, 6) + ", E[avg] " +
              fmt(o.expected_average, 6)};
}

// --- 8 ---------------------------------------------------------------------

Outcome var_of_var_check() {
  const auto learner = make_learner({LearnerKind::sample_mean});
  const std::size_t datasets = 200;
  std::vector<double> ij(datasets);
  std::vector<double> vov(datasets);
  for (std::size_t d = 0; d < datasets; ++d) {
    const Dataset data = normal_sample(50, 8000 + d);
    const BaggedRun run = bag_predict(data, *learner, plan(50, 20000, 9000 + d), QueryMatrix::Zero(1, 1));
    ij[d] = ij_variance(run.trace, 0).raw_value;
    vov[d] = var_of_var(run.trace, 0).value;
  }
  std::nth_element(vov.begin(), vov.begin() + datasets / 2, vov.end());
  const double median = vov[datasets / 2];
  const double empirical = variance_of(ij);
  const double ratio = median / empirical;
  return {ratio >= 0.5 && ratio <= 2.0, "median plug-in " + fmt(median) + " vs empirical Var(IJ) " +
                                            fmt(empirical) + " (ratio " + fmt(ratio, 3) + ", need within 2x)"};
}

// --- 9 ---------------------------------------------------------------------

std::vector<std::vector<std::string>> read_rows(const std::string& path) {
  std::ifstream in(path);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(BAGVAR_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Outcome cli_pipeline() {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "bagvar_acceptance_cli";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::string data = std::string(BAGVAR_DATA_DIR) + "/synthetic_regression.csv";
  const std::string queries = std::string(BAGVAR_DATA_DIR) + "/synthetic_queries.csv";
  const std::string run = (dir / "run").string();

  std::vector<std::string> problems;
  auto check = [&](bool cond, const std::string& what) {
    if (!cond) problems.push_back(what);
  };

  check(run_cli("train --data " + data + " -B 400 --seed 5 --estimators IJ_U,J_U,AVG --out-dir " + run) == 0,
        "train failed");
  check(fs::exists(run + "/manifest.json") && fs::exists(run + "/trace_counts.csv") &&
            fs::exists(run + "/trace_predictions.csv"),
        "train artifacts missing");
  const std::string predict = "predict --manifest " + run + "/manifest.json --queries " + queries;
  const std::string out_a = (dir / "a.csv").string();
  const std::string out_b = (dir / "b.csv").string();
  check(run_cli(predict + " --out " + out_a) == 0, "predict failed");
  check(run_cli(predict + " --out " + out_b) == 0, "second predict failed");
  check(slurp(out_a) == slurp(out_b) && !slurp(out_a).empty(), "repeat predict not byte-identical");

  const auto rows = read_rows(out_a);
  const std::vector<std::string> expected = {"query_id",   "prediction",   "v_hat",        "rho_hat",
                                             "B",          "se_IJ_U",      "var_raw_IJ_U", "truncated_IJ_U",
                                             "se_J_U",     "var_raw_J_U",  "truncated_J_U", "se_AVG",
                                             "var_raw_AVG", "truncated_AVG"};
  check(!rows.empty() && rows[0] == expected, "unexpected header");
  std::size_t se_columns = 0;
  if (!rows.empty()) {
    for (const auto& h : rows[0]) se_columns += h.rfind("se_", 0) == 0;
  }
  check(se_columns == 3, "expected exactly three se columns");
  check(rows.size() == 11, "expected ten query rows");
  double worst = 0.0;
  for (std::size_t r = 1; r < rows.size() && rows[0] == expected; ++r) {
    const double ij = std::stod(rows[r][6]);
    const double j = std::stod(rows[r][9]);
    const double avg_raw = std::stod(rows[r][12]);
    const double avg_se = std::stod(rows[r][11]);
    const double recomputed = std::sqrt(std::max(0.5 * (ij + j), 0.0));
    worst = std::max(worst, std::abs(avg_se - recomputed) / std::max(recomputed, 1e-300));
    worst = std::max(worst, std::abs(avg_raw - 0.5 * (ij + j)) / std::max(std::abs(avg_raw), 1e-300));
    check((std::stoi(rows[r][13]) == 1) == (avg_raw < 0.0), "truncation flag mismatch");
    for (int c : {5, 8, 11}) check(std::stod(rows[r][c]) >= 0.0, "negative standard error");
  }
  check(worst <= 1e-12, "AVG recompute deviation " + fmt(worst));

  // retrain from the manifest's settings reproduces the trace byte for byte
  const std::string run2 = (dir / "run2").string();
  check(run_cli("train --data " + data + " -B 400 --seed 5 --estimators IJ_U,J_U,AVG --out-dir " + run2) == 0,
        "second train failed");
  check(slurp(run + "/trace_counts.csv") == slurp(run2 + "/trace_counts.csv") &&
            slurp(run + "/trace_predictions.csv") == slurp(run2 + "/trace_predictions.csv"),
        "trace export not reproducible");

  // error contract: blank cell is a data error, B < 2 a config error
  const std::string bad = (dir / "bad.csv").string();
  std::ofstream(bad) << "x1,y\n1,2\n,3\n";
  check(run_cli("train --data " + bad + " --out-dir " + (dir / "bad").string()) == 3, "blank cell exit code");
  check(run_cli("train --data " + data + " -B 1 --out-dir " + (dir / "b1").string()) == 2, "B < 2 exit code");

  fs::remove_all(dir);
  std::string detail = "train/predict on bundled CSV: columns, determinism, AVG recompute (max rel dev " +
                       fmt(worst, 2) + "), exit codes";
  for (const auto& p : problems) detail += "; " + p;
  return {problems.empty(), detail};
}

}  // namespace

int main() {
  criterion(1, "formula transcription", 5, transcription);
  criterion(2, "delta-method oracle", 60, delta_method);
  criterion(3, "Monte Carlo bias law", 600, mc_bias_law);
  criterion(4, "J/IJ Monte Carlo ratios", 600, ratio_reproduction);
  criterion(5, "cosine study directions", 900, table_directions);
  criterion(6, "step-function variance spikes", 600, spike_study);
  criterion(7, "ANOVA oracle", 60, anova);
  criterion(8, "variance-of-variance plausibility", 300, var_of_var_check);
  criterion(9, "CSV to train to predict pipeline", 300, cli_pipeline);
  std::printf("%d of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
