#pragma once

#include "bagvar/dataset.hpp"
#include "bagvar/learners.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace bagvar {

/// Polynomial in the single feature with degree chosen by Mallows' Cp.
class AdaptivePolyModel final : public Model {
 public:
  AdaptivePolyModel() = default;
  /// coefficients[k] multiplies x^k; degree() == coefficients.size() - 1.
  explicit AdaptivePolyModel(std::vector<double> coefficients, std::vector<double> cp_scores = {});

  double predict(std::span<const double> x) const override;

  std::size_t degree() const noexcept { return coefficients_.size() - 1; }
  const std::vector<double>& coefficients() const noexcept { return coefficients_; }
  /// Cp(d) for d = 1..d_max, as computed during fitting.
  const std::vector<double>& cp_scores() const noexcept { return cp_scores_; }

 private:
  std::vector<double> coefficients_;
  std::vector<double> cp_scores_;
};

/// Weighted least squares for each degree 1..max_degree, keeping the degree
/// minimizing Cp(d) = RSS(d)/s2 - n + 2(d+1) with s2 = RSS(max)/(n - max - 1)
/// and n the total weight. Ties go to the smaller degree. When s2 vanishes
/// (exact fit) the smallest degree with RSS <= 1e-9 * TSS is chosen.
/// Requires p == 1. Throws FitError on a rank-deficient weighted design.
AdaptivePolyModel fit_adaptive_poly(const Dataset& data, std::span<const double> weights,
                                    std::size_t max_degree);
AdaptivePolyModel fit_adaptive_poly(const Dataset& data, std::size_t max_degree);

/// Horner evaluation.
double predict_poly(const AdaptivePolyModel& model, double x);

}  // namespace bagvar
