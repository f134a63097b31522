#include "bagvar/bootstrap.hpp"

#include "bagvar/error.hpp"
#include "bagvar/parallel.hpp"
#include "bagvar/rng.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace bagvar {

void ResamplePlan::validate() const {
  if (n == 0) throw ConfigError("resample plan: n must be at least 1");
  if (replicates == 0) throw ConfigError("resample plan: B must be at least 1");
  if (resample_size() == 0) throw ConfigError("resample plan: m_sub must be at least 1");
}

CountMatrix::CountMatrix(CountArray counts, std::size_t resample_size)
    : counts_(std::move(counts)), resample_size_(resample_size) {}

void draw_counts_row(std::uint64_t seed, std::size_t replicate, std::size_t m,
                     std::span<std::int32_t> counts) {
  std::fill(counts.begin(), counts.end(), 0);
  Engine engine = make_engine(seed, StreamDomain::resample, replicate);
  const std::size_t n = counts.size();
  for (std::size_t k = 0; k < m; ++k) ++counts[uniform_index(engine, n)];
}

CountMatrix draw_resample_counts(const ResamplePlan& plan) {
  plan.validate();
  const std::size_t m = plan.resample_size();
  CountArray counts(plan.replicates, plan.n);
  parallel_for(plan.replicates, [&](std::size_t b) {
    draw_counts_row(plan.seed, b, m, {counts.data() + b * plan.n, plan.n});
  });
  return CountMatrix(std::move(counts), m);
}

namespace {

void compose(std::size_t index, std::size_t remaining, std::vector<std::int32_t>& current,
             const std::vector<std::uint64_t>& factorial, double total_weight,
             ExactResampleSet& out) {
  const std::size_t n = current.size();
  if (index + 1 == n) {
    current[index] = static_cast<std::int32_t>(remaining);
    std::uint64_t coefficient = factorial[n];
    for (std::int32_t c : current) coefficient /= factorial[static_cast<std::size_t>(c)];
    out.entries.push_back({current, static_cast<double>(coefficient) / total_weight});
    return;
  }
  // descending so the first entry is [n, 0, ..., 0]
  for (std::size_t c = remaining + 1; c-- > 0;) {
    current[index] = static_cast<std::int32_t>(c);
    compose(index + 1, remaining - c, current, factorial, total_weight, out);
  }
}

}  // namespace

ExactResampleSet enumerate_exact_resamples(std::size_t n) {
  if (n == 0) throw ConfigError("exact resamples: n must be at least 1");
  if (n > kMaxExactResampleN) {
    throw CapacityError("exact resamples: n = " + std::to_string(n) + " exceeds limit " +
                        std::to_string(kMaxExactResampleN));
  }
  std::vector<std::uint64_t> factorial(n + 1, 1);
  for (std::size_t k = 1; k <= n; ++k) factorial[k] = factorial[k - 1] * k;
  double total_weight = 1.0;  // n^n, exact in a double for n <= 8
  for (std::size_t k = 0; k < n; ++k) total_weight *= static_cast<double>(n);

  ExactResampleSet out;
  out.n = n;
  std::vector<std::int32_t> current(n, 0);
  compose(0, n, current, factorial, total_weight, out);
  return out;
}

}  // namespace bagvar
