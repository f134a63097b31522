#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace bagvar {

/// Shape and seed of a bagging run.
struct ResamplePlan {
  std::size_t n = 0;           ///< training-set size
  std::size_t replicates = 0;  ///< B
  std::size_t m_sub = 0;       ///< resample size; 0 means n
  std::uint64_t seed = 0;

  std::size_t resample_size() const noexcept { return m_sub == 0 ? n : m_sub; }

  /// Throws ConfigError when n == 0, replicates == 0 or the resample size is 0.
  void validate() const;
};

using CountArray = Eigen::Matrix<std::int32_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// B x n matrix of bootstrap counts N*_bi. Every row sums to the resample size.
class CountMatrix {
 public:
  CountMatrix() = default;
  CountMatrix(CountArray counts, std::size_t resample_size);

  std::size_t replicates() const noexcept { return static_cast<std::size_t>(counts_.rows()); }
  std::size_t observations() const noexcept { return static_cast<std::size_t>(counts_.cols()); }
  std::size_t resample_size() const noexcept { return resample_size_; }

  std::int32_t operator()(std::size_t b, std::size_t i) const { return counts_(b, i); }
  std::span<const std::int32_t> row(std::size_t b) const {
    return {counts_.data() + b * observations(), observations()};
  }
  const CountArray& array() const noexcept { return counts_; }

  bool operator==(const CountMatrix& other) const {
    return resample_size_ == other.resample_size_ && counts_ == other.counts_;
  }

 private:
  CountArray counts_;
  std::size_t resample_size_ = 0;
};

__extension__ using uint128 = unsigned __int128;

/// Unbiased integer in [0, bound) via Lemire's multiply-shift rejection.
/// Stdlib-independent so count matrices are identical across toolchains.
template <class Engine>
std::size_t uniform_index(Engine& engine, std::size_t bound) {
  static_assert(sizeof(typename Engine::result_type) == 8);
  const std::uint64_t range = bound;
  uint128 product = static_cast<uint128>(engine()) * range;
  auto low = static_cast<std::uint64_t>(product);
  if (low < range) {
    const std::uint64_t threshold = (0 - range) % range;
    while (low < threshold) {
      product = static_cast<uint128>(engine()) * range;
      low = static_cast<std::uint64_t>(product);
    }
  }
  return static_cast<std::size_t>(product >> 64);
}

/// Fills `counts` (length n) with one multinomial(m; 1/n, ..., 1/n) draw.
void draw_counts_row(std::uint64_t seed, std::size_t replicate, std::size_t m,
                     std::span<std::int32_t> counts);

/// Draws the full count matrix. Row b depends only on (plan.seed, b).
CountMatrix draw_resample_counts(const ResamplePlan& plan);

struct ExactResample {
  std::vector<std::int32_t> counts;
  double probability = 0.0;
};

/// Every bootstrap resample of an n-point dataset with its probability.
struct ExactResampleSet {
  std::size_t n = 0;
  std::vector<ExactResample> entries;
};

inline constexpr std::size_t kMaxExactResampleN = 8;

/// All C(2n-1, n-1) compositions of n into n parts with multinomial
/// probabilities. Throws CapacityError for n > kMaxExactResampleN.
ExactResampleSet enumerate_exact_resamples(std::size_t n);

}  // namespace bagvar
