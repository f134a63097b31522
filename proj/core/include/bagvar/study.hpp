#pragma once

#include "bagvar/dataset.hpp"
#include "bagvar/generators.hpp"
#include "bagvar/learners.hpp"
#include "bagvar/variance.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace bagvar {

/// Two-sided 95% normal quantile used for all reported half-widths.
inline constexpr double kHalfWidthZ = 1.959963984540054;

// ---------------------------------------------------------------------------
// Bias / variance / MSE study of the variance estimators
// ---------------------------------------------------------------------------

struct StudyConfig {
  GeneratorSpec generator;          ///< generator.n is the training-set size
  LearnerSpec learner;
  std::size_t replicates = 200;     ///< B per bagged predictor
  std::size_t n_test = 50;
  std::size_t n_reps = 100;         ///< independent training sets
  std::uint64_t seed = 0;
  std::vector<Method> methods = {Method::ij_unbiased, Method::jackknife_unbiased, Method::averaged};
};

/// Error summary of one estimator, averaged over the test set. Half-widths
/// are 95% normal intervals from the spread across training sets.
struct StudyCell {
  Method method = Method::ij_unbiased;
  double bias = 0.0;
  double bias_half_width = 0.0;
  double variance = 0.0;
  double variance_half_width = 0.0;
  double mse = 0.0;
  double mse_half_width = 0.0;
  double mean_squared_bias = 0.0;  ///< mse == mean_squared_bias + variance
};

struct StudyReport {
  std::string generator;
  std::size_t n = 0;
  std::size_t p = 0;
  std::size_t replicates = 0;
  std::size_t n_test = 0;
  std::size_t n_reps = 0;
  std::vector<StudyCell> cells;
  std::vector<double> truth;       ///< per test point: variance of theta_B across training sets
  double mean_truth = 0.0;
  double mean_v_hat = 0.0;
  /// Share of the measured truth explained by Monte Carlo noise in theta_B,
  /// mean(v_hat) / (B * mean(truth)); the truth is trusted below 5%.
  double truth_mc_share = 0.0;
  bool truth_mc_ok = false;
  bool degenerate = false;         ///< zero truth at every test point

  const StudyCell& cell(Method method) const;
};

/// Aggregates an (n_reps x n_test) matrix of raw estimates against the
/// per-test-point truth.
StudyCell summarize_estimates(Method method, std::span<const double> truth, const Matrix& estimates);

/// Fixes a test set, draws n_reps training sets, bags the learner on each
/// and records every requested estimator at every test point. Raw
/// (untruncated) estimates are scored.
StudyReport run_table_study(const StudyConfig& config);

// ---------------------------------------------------------------------------
// Monte Carlo bias / variance ratio of J versus IJ as a function of B
// ---------------------------------------------------------------------------

struct RatioConfig {
  std::vector<std::size_t> b_grid;
  std::size_t n_draws = 200;
  std::size_t reference_replicates = 50000;
  std::uint64_t seed = 0;
};

struct RatioPoint {
  std::size_t replicates = 0;
  double bias_ij = 0.0;
  double bias_j = 0.0;
  double bias_ij_se = 0.0;
  double bias_j_se = 0.0;
  double var_ij = 0.0;
  double var_j = 0.0;
  double empirical_bias_ratio = 0.0;
  double empirical_var_ratio = 0.0;
  double predicted_bias_ij = 0.0;
  double predicted_bias_j = 0.0;
  double predicted_var_ij = 0.0;
  double predicted_var_j = 0.0;
  double predicted_bias_ratio = 0.0;
  double predicted_var_ratio = 0.0;
};

struct RatioExperiment {
  std::size_t n = 0;
  double v_hat = 0.0;   ///< from the reference trace
  double ij_ref = 0.0;  ///< IJ at B = reference_replicates
  double j_ref = 0.0;   ///< J at B = reference_replicates
  std::vector<RatioPoint> points;
};

/// For each B in the grid, draws n_draws independent traces at one query
/// point and compares the empirical bias and variance of IJ and J (against a
/// large-B reference) with predict_mc_moments. Throws EstimationError if the
/// reference bootstrap variance is not positive.
RatioExperiment run_mc_ratio_experiment(const Dataset& data, const Learner& learner,
                                        std::span<const double> query, const RatioConfig& config);

/// Empirical Monte Carlo bias check at one B: mean over n_draws traces of
/// the uncorrected estimator minus its large-B reference.
struct McBiasCheck {
  std::size_t replicates = 0;
  std::size_t n_draws = 0;
  double v_hat = 0.0;
  double ij_ref = 0.0;
  double j_ref = 0.0;
  double mean_ij = 0.0;
  double mean_j = 0.0;
  double bias_ij = 0.0;
  double bias_j = 0.0;
  double predicted_bias_ij = 0.0;
  double predicted_bias_j = 0.0;
};

McBiasCheck run_mc_bias_check(const Dataset& data, const Learner& learner,
                              std::span<const double> query, std::size_t replicates,
                              std::size_t n_draws, std::size_t reference_replicates,
                              std::uint64_t seed);

// ---------------------------------------------------------------------------
// Variance profile of a bagged tree on the step function
// ---------------------------------------------------------------------------

struct SpikeConfig {
  std::size_t n = 500;
  std::size_t replicates = 1000;
  std::size_t n_reps = 100;
  std::vector<double> grid;  ///< empty means 0, 0.01, ..., 1
  LearnerSpec learner = {LearnerKind::regression_tree, 0, 1, 5, 6};
  double noise_sd = 0.5;
  std::uint64_t seed = 0;
};

struct SpikeProfile {
  std::vector<double> grid;
  std::vector<double> mean_estimate;  ///< IJ_U averaged over training sets
  std::vector<double> estimate_se;
  std::vector<double> truth;          ///< variance of theta_B across training sets
  std::vector<double> truth_se;
  std::vector<double> mean_prediction;
};

SpikeProfile run_spike_study(const SpikeConfig& config);

/// Indices of interior strict local maxima, largest value first.
std::vector<std::size_t> local_maxima(std::span<const double> profile);

/// Fraction of grid points where |mean_estimate - truth| <= z * combined SE.
double fraction_within_bands(const SpikeProfile& profile, double z = kHalfWidthZ);

}  // namespace bagvar
