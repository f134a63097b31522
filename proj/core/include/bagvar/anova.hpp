#pragma once

#include "bagvar/learners.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace bagvar {

/// Finite distribution for Z = (x, y) with x = y = support value.
struct DiscreteDistribution {
  std::vector<double> support;
  std::vector<double> probabilities;

  /// ConfigError unless the probabilities are non-negative and sum to 1.
  void validate() const;
};

inline constexpr std::size_t kMaxAnovaSupport = 3;
inline constexpr std::size_t kMaxAnovaN = 5;

/// Exact variance decomposition of theta_inf over all support^n datasets.
struct AnovaOracle {
  std::size_t n = 0;
  std::vector<double> terms;  ///< V_1 .. V_n
  double mean = 0.0;          ///< E_F[theta_inf]
  double total_variance = 0.0;
  double sum_terms = 0.0;
  double expected_jackknife = 0.0;  ///< E_F[V_J^inf] at the oracle's own n
  double expected_ij = 0.0;         ///< E_F[V_IJ^inf]
  double expected_average = 0.0;
  /// 1 - E[V_IJ] / V_1, floored at 0.
  double first_order_shortfall = 0.0;
  /// E[V_J] - sum_k k V_k. The clean identity holds for a jackknife on n + 1
  /// points; at the oracle's own n this gap is reported rather than removed.
  double jackknife_identity_gap = 0.0;
};

/// Exact infinite-B estimates for one dataset.
struct ExactEstimates {
  double theta = 0.0;
  double ij = 0.0;
  double jackknife = 0.0;
};

ExactEstimates exact_estimates(const Dataset& data, const Learner& learner,
                               std::span<const double> query, std::uint64_t noise_seed = 0);

/// CapacityError when the support exceeds kMaxAnovaSupport or n > kMaxAnovaN.
AnovaOracle anova_oracle(const DiscreteDistribution& dist, std::size_t n, const Learner& learner,
                         std::span<const double> query);

}  // namespace bagvar
