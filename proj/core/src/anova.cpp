#include "bagvar/anova.hpp"

#include "bagvar/bootstrap.hpp"
#include "bagvar/error.hpp"
#include "bagvar/parallel.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>
#include <unordered_map>

namespace bagvar {

void DiscreteDistribution::validate() const {
  if (support.empty() || support.size() != probabilities.size()) {
    throw ConfigError("discrete distribution: support and probabilities must be non-empty and equal length");
  }
  double total = 0.0;
  for (double p : probabilities) {
    if (!(p >= 0.0)) throw ConfigError("discrete distribution: negative probability");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12) throw ConfigError("discrete distribution: probabilities must sum to 1");
}

ExactEstimates exact_estimates(const Dataset& data, const Learner& learner,
                               std::span<const double> query, std::uint64_t noise_seed) {
  const std::size_t n = data.rows();
  const ExactResampleSet set = enumerate_exact_resamples(n);
  std::vector<double> t(set.entries.size());
  std::vector<double> weights(n);
  for (std::size_t c = 0; c < set.entries.size(); ++c) {
    const auto& counts = set.entries[c].counts;
    std::copy(counts.begin(), counts.end(), weights.begin());
    t[c] = learner.fit(data, weights, noise_seed)->predict(query);
  }

  ExactEstimates out;
  for (std::size_t c = 0; c < t.size(); ++c) out.theta += set.entries[c].probability * t[c];

  const double nd = static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    double cov = 0.0;
    double out_mass = 0.0;
    double out_sum = 0.0;
    for (std::size_t c = 0; c < t.size(); ++c) {
      const double p = set.entries[c].probability;
      const double count = static_cast<double>(set.entries[c].counts[i]);
      cov += p * (count - 1.0) * (t[c] - out.theta);
      if (set.entries[c].counts[i] == 0) {
        out_mass += p;
        out_sum += p * t[c];
      }
    }
    out.ij += cov * cov;
    const double delta = out_sum / out_mass - out.theta;
    out.jackknife += delta * delta;
  }
  out.jackknife *= (nd - 1.0) / nd;
  return out;
}

AnovaOracle anova_oracle(const DiscreteDistribution& dist, std::size_t n, const Learner& learner,
                         std::span<const double> query) {
  dist.validate();
  if (dist.support.size() > kMaxAnovaSupport) {
    throw CapacityError("anova oracle: support size " + std::to_string(dist.support.size()) +
                        " exceeds " + std::to_string(kMaxAnovaSupport));
  }
  if (n > kMaxAnovaN) {
    throw CapacityError("anova oracle: n = " + std::to_string(n) + " exceeds " + std::to_string(kMaxAnovaN));
  }
  if (n < 2) throw ConfigError("anova oracle: n must be at least 2");

  const std::size_t s = dist.support.size();
  std::size_t total = 1;
  for (std::size_t i = 0; i < n; ++i) total *= s;

  // dataset d encodes its support indices in base s, observation 0 least significant
  auto digit = [&](std::size_t d, std::size_t i) {
    for (std::size_t k = 0; k < i; ++k) d /= s;
    return d % s;
  };

  std::vector<double> prob(total);
  std::vector<ExactEstimates> est(total);
  parallel_for(total, [&](std::size_t d) {
    Matrix x(static_cast<Eigen::Index>(n), 1);
    Vector y(static_cast<Eigen::Index>(n));
    double p = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t k = digit(d, i);
      x(static_cast<Eigen::Index>(i), 0) = dist.support[k];
      y(static_cast<Eigen::Index>(i)) = dist.support[k];
      p *= dist.probabilities[k];
    }
    prob[d] = p;
    est[d] = exact_estimates(Dataset(std::move(x), std::move(y)), learner, query);
  });

  AnovaOracle out;
  out.n = n;
  for (std::size_t d = 0; d < total; ++d) {
    out.mean += prob[d] * est[d].theta;
    out.expected_ij += prob[d] * est[d].ij;
    out.expected_jackknife += prob[d] * est[d].jackknife;
  }
  for (std::size_t d = 0; d < total; ++d) {
    out.total_variance += prob[d] * (est[d].theta - out.mean) * (est[d].theta - out.mean);
  }

  // g[T][d] = E[theta | Z_T = d_T], T a bitmask over observations
  auto project = [&](std::size_t d, std::size_t mask) {
    std::size_t key = 0;
    std::size_t scale = 1;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (std::size_t{1} << i)) key += digit(d, i) * scale;
      scale *= s;
    }
    return key;
  };
  const std::size_t subsets = std::size_t{1} << n;
  std::vector<std::vector<double>> g(subsets, std::vector<double>(total));
  for (std::size_t mask = 0; mask < subsets; ++mask) {
    std::unordered_map<std::size_t, std::pair<double, double>> cells;
    for (std::size_t d = 0; d < total; ++d) {
      auto& cell = cells[project(d, mask)];
      cell.first += prob[d] * est[d].theta;
      cell.second += prob[d];
    }
    for (std::size_t d = 0; d < total; ++d) {
      const auto& cell = cells[project(d, mask)];
      g[mask][d] = cell.second > 0.0 ? cell.first / cell.second : 0.0;
    }
  }

  out.terms.assign(n, 0.0);
  for (std::size_t S = 1; S < subsets; ++S) {
    const int k = std::popcount(S);
    for (std::size_t d = 0; d < total; ++d) {
      double f = 0.0;
      // Moebius inversion over every T subset of S
      for (std::size_t T = S;; T = (T - 1) & S) {
        const int sign = ((k - std::popcount(T)) % 2 == 0) ? 1 : -1;
        f += sign * g[T][d];
        if (T == 0) break;
      }
      out.terms[static_cast<std::size_t>(k - 1)] += prob[d] * f * f;
    }
  }

  double weighted = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    out.sum_terms += out.terms[k];
    weighted += static_cast<double>(k + 1) * out.terms[k];
  }
  out.expected_average = 0.5 * (out.expected_jackknife + out.expected_ij);
  out.first_order_shortfall =
      out.terms[0] > 0.0 ? std::max(0.0, 1.0 - out.expected_ij / out.terms[0]) : 0.0;
  out.jackknife_identity_gap = out.expected_jackknife - weighted;
  return out;
}

}  // namespace bagvar
