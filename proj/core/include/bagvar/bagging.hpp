#pragma once

#include "bagvar/bootstrap.hpp"
#include "bagvar/dataset.hpp"
#include "bagvar/learners.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace bagvar {

/// Everything the variance estimators need: the B x n count matrix and the
/// B x q matrix of replicate predictions t*_b(x_k).
struct ResampleTrace {
  CountMatrix counts;
  Matrix predictions;
  std::string learner;

  std::size_t replicates() const noexcept { return counts.replicates(); }
  std::size_t observations() const noexcept { return counts.observations(); }
  std::size_t queries() const noexcept { return static_cast<std::size_t>(predictions.cols()); }
  std::size_t resample_size() const noexcept { return counts.resample_size(); }

  /// Replicate predictions at one query point.
  Vector column(std::size_t query) const { return predictions.col(static_cast<Eigen::Index>(query)); }

  /// Throws DataError when the matrices disagree in B or hold non-finite values.
  void validate() const;
};

struct BaggedRun {
  ResampleTrace trace;
  std::vector<double> prediction;  ///< theta_B per query: row mean of predictions
};

/// Seed handed to the learner for replicate b (the auxiliary noise xi_b).
std::uint64_t replicate_noise_seed(std::uint64_t seed, std::size_t replicate) noexcept;

/// Bagged prediction at every row of `queries`. Replicate b is fit on the
/// data weighted by row b of the count matrix. Replicates run in parallel
/// with results identical to a sequential run. A learner failure is
/// rethrown as ReplicateError carrying the replicate index.
BaggedRun bag_predict(const Dataset& data, const Learner& learner, const ResamplePlan& plan,
                      const QueryMatrix& queries);

/// Same as bag_predict, but with a caller-supplied count matrix.
BaggedRun bag_predict_with_counts(const Dataset& data, const Learner& learner, CountMatrix counts,
                                  std::uint64_t seed, const QueryMatrix& queries);

/// theta_inf: the exact bootstrap expectation of the learner, by enumerating
/// every resample. Requires n <= kMaxExactResampleN (CapacityError otherwise).
/// Randomized learners are evaluated with the fixed `noise_seed`.
std::vector<double> exact_bag_predict(const Dataset& data, const Learner& learner,
                                      const QueryMatrix& queries, std::uint64_t noise_seed = 0);

/// Out-of-bag mean squared error. `trace` must have been built with the
/// training rows as queries (query i == row i). Rows never out of bag are
/// skipped; EstimationError if every row is skipped.
double oob_error(const ResampleTrace& trace, const Dataset& data);

/// Training rows as a query matrix.
QueryMatrix training_queries(const Dataset& data);

}  // namespace bagvar
