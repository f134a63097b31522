#include "bagvar/study.hpp"

#include "bagvar/bagging.hpp"
#include "bagvar/error.hpp"
#include "bagvar/parallel.hpp"
#include "bagvar/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace bagvar {
namespace {

double mean_of(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

/// Sample variance with the n - 1 denominator.
double sample_variance(const std::vector<double>& v) {
  const double m = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return ss / static_cast<double>(v.size() - 1);
}

double half_width(const std::vector<double>& per_rep) {
  if (per_rep.size() < 2) return 0.0;
  return kHalfWidthZ * std::sqrt(sample_variance(per_rep) / static_cast<double>(per_rep.size()));
}

ResamplePlan plan_for(std::size_t n, std::size_t replicates, std::uint64_t seed) {
  ResamplePlan plan;
  plan.n = n;
  plan.replicates = replicates;
  plan.seed = seed;
  return plan;
}

}  // namespace

const StudyCell& StudyReport::cell(Method method) const {
  for (const auto& c : cells) {
    if (c.method == method) return c;
  }
  throw ConfigError("study report has no cell for " + std::string(to_string(method)));
}

StudyCell summarize_estimates(Method method, std::span<const double> truth, const Matrix& estimates) {
  const auto reps = estimates.rows();
  const auto tests = estimates.cols();
  if (static_cast<std::size_t>(tests) != truth.size() || reps < 1 || tests < 1) {
    throw DataError("study summary: estimate matrix does not match the test set");
  }
  const Eigen::Map<const Vector> truth_v(truth.data(), tests);
  const Eigen::RowVectorXd per_test_mean = estimates.colwise().mean();
  const Matrix error = estimates.rowwise() - truth_v.transpose();
  const Matrix spread = estimates.rowwise() - per_test_mean;

  std::vector<double> bias_r(static_cast<std::size_t>(reps));
  std::vector<double> var_r(static_cast<std::size_t>(reps));
  std::vector<double> mse_r(static_cast<std::size_t>(reps));
  for (Eigen::Index r = 0; r < reps; ++r) {
    bias_r[static_cast<std::size_t>(r)] = error.row(r).mean();
    var_r[static_cast<std::size_t>(r)] = spread.row(r).array().square().mean();
    mse_r[static_cast<std::size_t>(r)] = error.row(r).array().square().mean();
  }
  const Eigen::RowVectorXd per_test_bias = per_test_mean - truth_v.transpose();

  StudyCell cell;
  cell.method = method;
  cell.bias = mean_of(bias_r);
  cell.bias_half_width = half_width(bias_r);
  cell.variance = mean_of(var_r);
  cell.variance_half_width = half_width(var_r);
  cell.mse = mean_of(mse_r);
  cell.mse_half_width = half_width(mse_r);
  cell.mean_squared_bias = per_test_bias.array().square().mean();
  return cell;
}

StudyReport run_table_study(const StudyConfig& config) {
  config.generator.validate();
  if (config.n_reps < 2) throw ConfigError("study: n_reps must be at least 2");
  if (config.n_test < 1) throw ConfigError("study: n_test must be at least 1");
  if (config.replicates < 2) throw ConfigError("study: B must be at least 2");
  if (config.methods.empty()) throw ConfigError("study: no estimators selected");

  const GeneratorKind kind = config.generator.kind;
  const std::size_t p = config.generator.features();
  const QueryMatrix test = sample_features(kind, config.n_test, p, derive_seed(config.seed, StreamDomain::study, 0));
  const auto learner = make_learner(config.learner);

  const auto reps = static_cast<Eigen::Index>(config.n_reps);
  const auto tests = static_cast<Eigen::Index>(config.n_test);
  Matrix predictions(reps, tests);
  Matrix v_hat(reps, tests);
  std::vector<Matrix> estimates(config.methods.size(), Matrix(reps, tests));

  parallel_for(config.n_reps, [&](std::size_t r) {
    GeneratorSpec spec = config.generator;
    spec.seed = derive_seed(config.seed, StreamDomain::study, 2 * r + 1);
    const Dataset data = generate(spec);
    const ResamplePlan plan =
        plan_for(data.rows(), config.replicates, derive_seed(config.seed, StreamDomain::study, 2 * r + 2));
    const BaggedRun run = bag_predict(data, *learner, plan, test);
    const TraceEstimates est = estimate_all(run.trace);
    const auto row = static_cast<Eigen::Index>(r);
    for (Eigen::Index k = 0; k < tests; ++k) predictions(row, k) = run.prediction[static_cast<std::size_t>(k)];
    v_hat.row(row) = est.v_hat.transpose();
    for (std::size_t m = 0; m < config.methods.size(); ++m) {
      estimates[m].row(row) = est.raw(config.methods[m]).transpose();
    }
  });

  StudyReport report;
  report.generator = std::string(to_string(kind));
  report.n = config.generator.n;
  report.p = p;
  report.replicates = config.replicates;
  report.n_test = config.n_test;
  report.n_reps = config.n_reps;

  const Eigen::RowVectorXd mean_pred = predictions.colwise().mean();
  const Matrix centred = predictions.rowwise() - mean_pred;
  const Vector truth = centred.array().square().colwise().sum().transpose() / static_cast<double>(reps - 1);
  report.truth.assign(truth.data(), truth.data() + truth.size());
  report.mean_truth = truth.mean();
  report.mean_v_hat = v_hat.mean();
  report.degenerate = (truth.array() == 0.0).all();
  report.truth_mc_share = report.mean_truth > 0.0
                              ? report.mean_v_hat / (static_cast<double>(config.replicates) * report.mean_truth)
                              : std::numeric_limits<double>::infinity();
  report.truth_mc_ok = report.truth_mc_share < 0.05;

  for (std::size_t m = 0; m < config.methods.size(); ++m) {
    report.cells.push_back(summarize_estimates(config.methods[m], report.truth, estimates[m]));
  }
  return report;
}

namespace {

QueryMatrix single_query(std::span<const double> query) {
  QueryMatrix q(1, static_cast<Eigen::Index>(query.size()));
  for (std::size_t j = 0; j < query.size(); ++j) q(0, static_cast<Eigen::Index>(j)) = query[j];
  return q;
}

struct DrawPair {
  double ij = 0.0;
  double j = 0.0;
};

DrawPair draw_estimates(const Dataset& data, const Learner& learner, const QueryMatrix& query,
                        std::size_t replicates, std::uint64_t seed) {
  const BaggedRun run = bag_predict(data, learner, plan_for(data.rows(), replicates, seed), query);
  return {ij_variance(run.trace, 0).raw_value, jackknife_variance(run.trace, 0).raw_value};
}

struct Reference {
  double v_hat = 0.0;
  double ij = 0.0;
  double j = 0.0;
};

Reference reference_estimates(const Dataset& data, const Learner& learner, const QueryMatrix& query,
                              std::size_t replicates, std::uint64_t seed) {
  const BaggedRun run = bag_predict(data, learner, plan_for(data.rows(), replicates, seed), query);
  Reference ref;
  ref.v_hat = bootstrap_base_variance(run.trace, 0);
  ref.ij = ij_variance(run.trace, 0).raw_value;
  ref.j = jackknife_variance(run.trace, 0).raw_value;
  if (!(ref.v_hat > 0.0)) {
    throw EstimationError("reference trace has zero bootstrap variance at the query point");
  }
  return ref;
}

}  // namespace

RatioExperiment run_mc_ratio_experiment(const Dataset& data, const Learner& learner,
                                        std::span<const double> query, const RatioConfig& config) {
  if (config.b_grid.empty()) throw ConfigError("mc ratio: empty B grid");
  if (!std::is_sorted(config.b_grid.begin(), config.b_grid.end())) {
    throw ConfigError("mc ratio: B grid must be ascending");
  }
  if (config.b_grid.front() < 2) throw ConfigError("mc ratio: B must be at least 2");
  if (config.n_draws < 50) throw ConfigError("mc ratio: need at least 50 draws per B");

  const QueryMatrix q = single_query(query);
  const Reference ref = reference_estimates(data, learner, q, config.reference_replicates,
                                            derive_seed(config.seed, StreamDomain::study, 0));
  RatioExperiment out;
  out.n = data.rows();
  out.v_hat = ref.v_hat;
  out.ij_ref = ref.ij;
  out.j_ref = ref.j;

  for (std::size_t g = 0; g < config.b_grid.size(); ++g) {
    const std::size_t replicates = config.b_grid[g];
    std::vector<double> ij(config.n_draws);
    std::vector<double> j(config.n_draws);
    parallel_for(config.n_draws, [&](std::size_t d) {
      const auto stream = 1 + g * config.n_draws + d;
      const DrawPair pair = draw_estimates(data, learner, q, replicates,
                                           derive_seed(config.seed, StreamDomain::study, stream));
      ij[d] = pair.ij;
      j[d] = pair.j;
    });
    RatioPoint point;
    point.replicates = replicates;
    point.bias_ij = mean_of(ij) - ref.ij;
    point.bias_j = mean_of(j) - ref.j;
    point.bias_ij_se = std::sqrt(sample_variance(ij) / static_cast<double>(ij.size()));
    point.bias_j_se = std::sqrt(sample_variance(j) / static_cast<double>(j.size()));
    point.var_ij = sample_variance(ij);
    point.var_j = sample_variance(j);
    point.empirical_bias_ratio = point.bias_j / point.bias_ij;
    point.empirical_var_ratio = point.var_j / point.var_ij;

    const auto ij_theory = predict_mc_moments(McEstimator::ij, out.n, replicates, 0, ref.v_hat, ref.ij);
    const auto j_theory = predict_mc_moments(McEstimator::jackknife, out.n, replicates, 0, ref.v_hat, ref.j);
    point.predicted_bias_ij = ij_theory.bias;
    point.predicted_bias_j = j_theory.bias;
    point.predicted_var_ij = ij_theory.variance;
    point.predicted_var_j = j_theory.variance;
    point.predicted_bias_ratio = j_theory.bias / ij_theory.bias;
    point.predicted_var_ratio = j_theory.variance / ij_theory.variance;
    out.points.push_back(point);
  }
  return out;
}

McBiasCheck run_mc_bias_check(const Dataset& data, const Learner& learner,
                              std::span<const double> query, std::size_t replicates,
                              std::size_t n_draws, std::size_t reference_replicates,
                              std::uint64_t seed) {
  if (replicates < 2 || n_draws < 2) throw ConfigError("mc bias check: need B >= 2 and >= 2 draws");
  const QueryMatrix q = single_query(query);
  const Reference ref = reference_estimates(data, learner, q, reference_replicates,
                                            derive_seed(seed, StreamDomain::study, 0));
  std::vector<double> ij(n_draws);
  std::vector<double> j(n_draws);
  parallel_for(n_draws, [&](std::size_t d) {
    const DrawPair pair =
        draw_estimates(data, learner, q, replicates, derive_seed(seed, StreamDomain::study, d + 1));
    ij[d] = pair.ij;
    j[d] = pair.j;
  });
  McBiasCheck out;
  out.replicates = replicates;
  out.n_draws = n_draws;
  out.v_hat = ref.v_hat;
  out.ij_ref = ref.ij;
  out.j_ref = ref.j;
  out.mean_ij = mean_of(ij);
  out.mean_j = mean_of(j);
  out.bias_ij = out.mean_ij - ref.ij;
  out.bias_j = out.mean_j - ref.j;
  out.predicted_bias_ij = predict_mc_moments(McEstimator::ij, data.rows(), replicates, 0, ref.v_hat, ref.ij).bias;
  out.predicted_bias_j =
      predict_mc_moments(McEstimator::jackknife, data.rows(), replicates, 0, ref.v_hat, ref.j).bias;
  return out;
}

SpikeProfile run_spike_study(const SpikeConfig& config) {
  if (config.n_reps < 20) throw ConfigError("spike study: need at least 20 training sets");
  if (config.replicates < 2) throw ConfigError("spike study: B must be at least 2");

  std::vector<double> grid = config.grid;
  if (grid.empty()) {
    for (int k = 0; k <= 100; ++k) grid.push_back(k / 100.0);
  }
  const auto points = static_cast<Eigen::Index>(grid.size());
  QueryMatrix queries(points, 1);
  for (Eigen::Index k = 0; k < points; ++k) queries(k, 0) = grid[static_cast<std::size_t>(k)];

  const auto learner = make_learner(config.learner);
  const auto reps = static_cast<Eigen::Index>(config.n_reps);
  Matrix predictions(reps, points);
  Matrix estimates(reps, points);

  parallel_for(config.n_reps, [&](std::size_t r) {
    GeneratorSpec spec;
    spec.kind = GeneratorKind::step_function;
    spec.n = config.n;
    spec.noise_sd = config.noise_sd;
    spec.seed = derive_seed(config.seed, StreamDomain::study, 2 * r + 1);
    const Dataset data = generate(spec);
    const BaggedRun run = bag_predict(data, *learner,
                                      plan_for(data.rows(), config.replicates,
                                               derive_seed(config.seed, StreamDomain::study, 2 * r + 2)),
                                      queries);
    const TraceEstimates est = estimate_all(run.trace);
    const auto row = static_cast<Eigen::Index>(r);
    for (Eigen::Index k = 0; k < points; ++k) predictions(row, k) = run.prediction[static_cast<std::size_t>(k)];
    estimates.row(row) = est.ij_unbiased.transpose();
  });

  SpikeProfile profile;
  profile.grid = grid;
  const double rd = static_cast<double>(reps);
  for (Eigen::Index k = 0; k < points; ++k) {
    const Vector pred = predictions.col(k);
    const Vector est = estimates.col(k);
    const double pred_mean = pred.mean();
    const double est_mean = est.mean();
    const double truth = (pred.array() - pred_mean).square().sum() / (rd - 1.0);
    const double est_var = (est.array() - est_mean).square().sum() / (rd - 1.0);
    profile.mean_prediction.push_back(pred_mean);
    profile.mean_estimate.push_back(est_mean);
    profile.estimate_se.push_back(std::sqrt(est_var / rd));
    profile.truth.push_back(truth);
    // standard error of a sample variance from the fourth central moment
    const double m4 = (pred.array() - pred_mean).pow(4).mean();
    const double var_s2 = (m4 - (rd - 3.0) / (rd - 1.0) * truth * truth) / rd;
    profile.truth_se.push_back(std::sqrt(std::max(var_s2, 0.0)));
  }
  return profile;
}

std::vector<std::size_t> local_maxima(std::span<const double> profile) {
  std::vector<std::size_t> maxima;
  for (std::size_t k = 1; k + 1 < profile.size(); ++k) {
    if (profile[k] > profile[k - 1] && profile[k] >= profile[k + 1]) maxima.push_back(k);
  }
  std::stable_sort(maxima.begin(), maxima.end(),
                   [&](std::size_t a, std::size_t b) { return profile[a] > profile[b]; });
  return maxima;
}

double fraction_within_bands(const SpikeProfile& profile, double z) {
  if (profile.grid.empty()) return 0.0;
  std::size_t inside = 0;
  for (std::size_t k = 0; k < profile.grid.size(); ++k) {
    const double band = z * std::hypot(profile.estimate_se[k], profile.truth_se[k]);
    if (std::abs(profile.mean_estimate[k] - profile.truth[k]) <= band) ++inside;
  }
  return static_cast<double>(inside) / static_cast<double>(profile.grid.size());
}

}  // namespace bagvar
