#include "bagvar/adaptive_poly.hpp"

#include "bagvar/error.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace bagvar {

AdaptivePolyModel::AdaptivePolyModel(std::vector<double> coefficients, std::vector<double> cp_scores)
    : coefficients_(std::move(coefficients)), cp_scores_(std::move(cp_scores)) {
  if (coefficients_.empty()) throw DataError("polynomial: no coefficients");
}

double AdaptivePolyModel::predict(std::span<const double> x) const { return predict_poly(*this, x[0]); }

double predict_poly(const AdaptivePolyModel& model, double x) {
  const auto& c = model.coefficients();
  double value = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) value = value * x + *it;
  return value;
}

namespace {

struct WeightedFit {
  std::vector<double> coefficients;
  double rss = 0.0;
};

// Least squares on sqrt(w)-scaled rows. x is centered and scaled before
// building the Vandermonde columns, then coefficients are mapped back.
WeightedFit fit_degree(const Vector& x, const Vector& y, const Vector& w, std::size_t degree,
                       double center, double scale) {
  const Eigen::Index n = x.size();
  const auto cols = static_cast<Eigen::Index>(degree + 1);
  Matrix design(n, cols);
  const Vector root_w = w.cwiseSqrt();
  for (Eigen::Index i = 0; i < n; ++i) {
    const double u = (x(i) - center) / scale;
    double power = 1.0;
    for (Eigen::Index k = 0; k < cols; ++k) {
      design(i, k) = root_w(i) * power;
      power *= u;
    }
  }
  const Vector rhs = root_w.cwiseProduct(y);
  Eigen::ColPivHouseholderQR<Matrix> qr(design);
  qr.setThreshold(1e-10);
  if (qr.rank() < cols) {
    throw FitError("adaptive polynomial: rank-deficient design for degree " + std::to_string(degree));
  }
  const Vector beta = qr.solve(rhs);
  const double rss = (design * beta - rhs).squaredNorm();

  // expand sum_k beta_k ((x - c)/s)^k into powers of x
  std::vector<double> coefficients(degree + 1, 0.0);
  std::vector<double> binom(degree + 1, 0.0);
  for (std::size_t k = 0; k <= degree; ++k) {
    const double bk = beta(static_cast<Eigen::Index>(k)) / std::pow(scale, static_cast<double>(k));
    // (x - c)^k = sum_j C(k, j) x^j (-c)^(k-j)
    double choose = 1.0;
    for (std::size_t j = 0; j <= k; ++j) {
      if (j > 0) choose = choose * static_cast<double>(k - j + 1) / static_cast<double>(j);
      coefficients[j] += bk * choose * std::pow(-center, static_cast<double>(k - j));
    }
  }
  if (!std::all_of(coefficients.begin(), coefficients.end(), [](double c) { return std::isfinite(c); })) {
    throw FitError("adaptive polynomial: non-finite coefficients");
  }
  return {std::move(coefficients), rss};
}

}  // namespace

AdaptivePolyModel fit_adaptive_poly(const Dataset& data, std::span<const double> weights,
                                    std::size_t max_degree) {
  if (data.features() != 1) {
    throw DataError("adaptive polynomial: requires exactly one feature, got " +
                    std::to_string(data.features()));
  }
  if (max_degree < 1) throw ConfigError("adaptive polynomial: max degree must be at least 1");
  if (weights.size() != data.rows()) throw DataError("adaptive polynomial: weight count mismatch");

  std::vector<Eigen::Index> active;
  for (std::size_t i = 0; i < data.rows(); ++i) {
    if (weights[i] > 0.0) active.push_back(static_cast<Eigen::Index>(i));
  }
  if (active.size() <= max_degree + 1) {
    throw FitError("adaptive polynomial: " + std::to_string(active.size()) +
                   " weighted rows cannot support degree " + std::to_string(max_degree));
  }
  const auto m = static_cast<Eigen::Index>(active.size());
  Vector x(m), y(m), w(m);
  for (Eigen::Index k = 0; k < m; ++k) {
    x(k) = data.x(static_cast<std::size_t>(active[static_cast<std::size_t>(k)]), 0);
    y(k) = data.y(static_cast<std::size_t>(active[static_cast<std::size_t>(k)]));
    w(k) = weights[static_cast<std::size_t>(active[static_cast<std::size_t>(k)])];
  }
  const double total_weight = w.sum();
  const double center = w.dot(x) / total_weight;
  double scale = std::sqrt(w.dot((x.array() - center).square().matrix()) / total_weight);
  if (!(scale > 0.0)) throw FitError("adaptive polynomial: feature has no spread");
  const double y_mean = w.dot(y) / total_weight;
  const double tss = w.dot((y.array() - y_mean).square().matrix());

  std::vector<WeightedFit> fits;
  fits.reserve(max_degree);
  for (std::size_t d = 1; d <= max_degree; ++d) fits.push_back(fit_degree(x, y, w, d, center, scale));

  const double dof = total_weight - static_cast<double>(max_degree) - 1.0;
  const double sigma2 = fits.back().rss / dof;
  std::vector<double> cp(max_degree, 0.0);
  std::size_t chosen = 0;
  if (sigma2 > 1e-12 * tss / total_weight && dof > 0.0) {
    for (std::size_t k = 0; k < max_degree; ++k) {
      cp[k] = fits[k].rss / sigma2 - total_weight + 2.0 * static_cast<double>(k + 2);
      if (cp[k] < cp[chosen]) chosen = k;
    }
  } else {
    // exact fit: Cp degenerates, fall back to the first degree that interpolates
    std::fill(cp.begin(), cp.end(), std::numeric_limits<double>::quiet_NaN());
    chosen = max_degree - 1;
    for (std::size_t k = 0; k < max_degree; ++k) {
      if (fits[k].rss <= 1e-9 * tss) {
        chosen = k;
        break;
      }
    }
  }
  return AdaptivePolyModel(std::move(fits[chosen].coefficients), std::move(cp));
}

AdaptivePolyModel fit_adaptive_poly(const Dataset& data, std::size_t max_degree) {
  const std::vector<double> weights = data.weights_or_ones();
  return fit_adaptive_poly(data, weights, max_degree);
}

}  // namespace bagvar
