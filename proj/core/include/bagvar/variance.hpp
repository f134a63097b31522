#pragma once

#include "bagvar/bagging.hpp"
#include "bagvar/bootstrap.hpp"

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace bagvar {

// Variance estimators for bagged predictions, computed from a ResampleTrace.
//
// For one query point with replicate predictions t*_1..t*_B and counts N*_bi:
//   v_hat   = (1/B) sum_b (t*_b - tbar)^2
//   Cov_i   = (1/B) sum_b (N*_bi - m/n)(t*_b - tbar)
//   IJ      = sum_i Cov_i^2
//   Delta_i = mean{t*_b : N*_bi = 0} - tbar   (0 if that set is empty or all of B)
//   J       = (n-1)/n sum_i Delta_i^2
//   IJ_U    = IJ - m v_hat / B
//   J_U     = J - (e-1) n v_hat / B
//   AVG     = (IJ_U + J_U) / 2
// with m the resample size (m = n for ordinary bagging).

enum class Method { ij, jackknife, ij_unbiased, jackknife_unbiased, averaged };

/// "IJ", "J", "IJ_U", "J_U", "AVG".
std::string_view to_string(Method method) noexcept;
/// Case-insensitive inverse of to_string; throws ConfigError.
Method parse_method(std::string_view name);

struct VarianceEstimate {
  Method method = Method::ij;
  double raw_value = 0.0;  ///< may be negative for bias-corrected methods
  double value = 0.0;      ///< max(raw_value, 0)
  /// Cov_i for the IJ family, Delta_i for the J family; for AVG the mean of
  /// the two per-observation contributions Cov_i^2 and (n-1)/n Delta_i^2.
  std::vector<double> components;

  bool truncated() const noexcept { return raw_value < 0.0; }
  double standard_error() const;
};

/// e - 1, the jackknife's Monte Carlo inflation factor relative to IJ.
double jackknife_mc_factor() noexcept;

double bootstrap_base_variance(std::span<const double> predictions);
double bootstrap_base_variance(const ResampleTrace& trace, std::size_t query);

// Kernels on a count matrix and one column of replicate predictions.
// All of them throw EstimationError when B < 2.
VarianceEstimate ij_variance(const CountMatrix& counts, std::span<const double> predictions);
VarianceEstimate jackknife_variance(const CountMatrix& counts, std::span<const double> predictions);
VarianceEstimate ij_unbiased(const CountMatrix& counts, std::span<const double> predictions);
VarianceEstimate jackknife_unbiased(const CountMatrix& counts, std::span<const double> predictions);

VarianceEstimate ij_variance(const ResampleTrace& trace, std::size_t query);
VarianceEstimate jackknife_variance(const ResampleTrace& trace, std::size_t query);
VarianceEstimate ij_unbiased(const ResampleTrace& trace, std::size_t query);
VarianceEstimate jackknife_unbiased(const ResampleTrace& trace, std::size_t query);

/// Midpoint of an IJ-type and a J-type estimate (IJ_U with J_U, or IJ with
/// J, in either order). Throws DataError for any other pairing.
VarianceEstimate averaged_estimator(const VarianceEstimate& ij_type, const VarianceEstimate& j_type);

VarianceEstimate estimate(Method method, const ResampleTrace& trace, std::size_t query);

enum class McEstimator { ij, jackknife };

/// Predicted Monte Carlo bias and variance of the finite-B estimator
/// relative to its B = infinity limit.
struct MCErrorPrediction {
  McEstimator estimator = McEstimator::ij;
  double bias = 0.0;
  double variance = 0.0;
  std::size_t n = 0;
  std::size_t replicates = 0;
  std::size_t m_sub = 0;
  double v_hat = 0.0;
  double v_ref = 0.0;
};

/// IJ:  bias = m v/B,          variance = 2 m^2 v^2 / (n B^2) + 4 m V v / (n B)
/// J:   bias = (e-1) n v/B,    variance = 2 (e-1)^2 n v^2 / B^2 + 4 (e-1) V v / B
/// (the IJ lines reduce to n v/B and 2 n v^2/B^2 + 4 V v/B at m = n; the J
/// moments are only derived for m = n, so m_sub does not enter them).
/// m_sub == 0 means n. Throws ConfigError on B == 0, n == 0 or negative inputs.
MCErrorPrediction predict_mc_moments(McEstimator estimator, std::size_t n, std::size_t replicates,
                                     std::size_t m_sub, double v_hat, double v_ref);

/// Plug-in estimate of the sampling variance of IJ:
/// sum_i (C_i^2 - mean_j C_j^2)^2 with C_i the IJ covariances.
struct VarOfVarEstimate {
  double value = 0.0;
  std::vector<double> c_star;
};

VarOfVarEstimate var_of_var(const ResampleTrace& trace, std::size_t query);

/// Ensemble variance = rho * v, with v the single-learner bootstrap variance.
struct DecompositionEstimate {
  double v_hat = 0.0;
  double rho_hat = 0.0;
};

/// Throws EstimationError when v_hat == 0.
DecompositionEstimate tree_decomposition(const ResampleTrace& trace, std::size_t query,
                                         const VarianceEstimate& variance_estimate);

/// Per-observation conditional variances of t* given N*_bi = 0 and given
/// N*_bi > 0; J_U replaces both with v_hat, and these let callers check that.
/// Entries are NaN when the conditioning set is empty.
struct JackknifeDiagnostics {
  double v_hat = 0.0;
  std::vector<double> v_out;  ///< Var(t* | N_i = 0)
  std::vector<double> v_in;   ///< Var(t* | N_i > 0)
};

JackknifeDiagnostics jackknife_diagnostics(const ResampleTrace& trace, std::size_t query);

/// All scalar estimates for every query at once (matrix products instead of
/// per-query loops). Each vector has one entry per query; raw values.
struct TraceEstimates {
  Vector v_hat;
  Vector ij;
  Vector jackknife;
  Vector ij_unbiased;
  Vector jackknife_unbiased;
  Vector averaged;

  const Vector& raw(Method method) const;
};

TraceEstimates estimate_all(const ResampleTrace& trace);

}  // namespace bagvar
