#include "bagvar/bagging.hpp"

#include "bagvar/error.hpp"
#include "bagvar/parallel.hpp"
#include "bagvar/rng.hpp"

#include <string>

namespace bagvar {

void ResampleTrace::validate() const {
  if (static_cast<std::size_t>(predictions.rows()) != counts.replicates()) {
    throw DataError("trace: " + std::to_string(predictions.rows()) + " prediction rows for " +
                    std::to_string(counts.replicates()) + " replicates");
  }
  if (!predictions.allFinite()) throw DataError("trace: non-finite replicate prediction");
}

std::uint64_t replicate_noise_seed(std::uint64_t seed, std::size_t replicate) noexcept {
  return derive_seed(seed, StreamDomain::split_noise, replicate);
}

namespace {

void check_queries(const Dataset& data, const QueryMatrix& queries) {
  if (static_cast<std::size_t>(queries.cols()) != data.features()) {
    throw DataError("queries have " + std::to_string(queries.cols()) + " features, data has " +
                    std::to_string(data.features()));
  }
}

void predict_queries(const Model& model, const QueryMatrix& queries, Eigen::Ref<Vector> out) {
  std::vector<double> x(static_cast<std::size_t>(queries.cols()));
  for (Eigen::Index k = 0; k < queries.rows(); ++k) {
    for (Eigen::Index j = 0; j < queries.cols(); ++j) x[static_cast<std::size_t>(j)] = queries(k, j);
    out(k) = model.predict(x);
  }
}

}  // namespace

BaggedRun bag_predict_with_counts(const Dataset& data, const Learner& learner, CountMatrix counts,
                                  std::uint64_t seed, const QueryMatrix& queries) {
  check_queries(data, queries);
  if (counts.observations() != data.rows()) {
    throw ConfigError("bagging: plan has n = " + std::to_string(counts.observations()) +
                      " but data has " + std::to_string(data.rows()) + " rows");
  }
  const std::size_t replicates = counts.replicates();
  const std::size_t n = data.rows();

  // predictions are filled row-wise, so store them transposed (q x B) first
  Matrix by_query(queries.rows(), static_cast<Eigen::Index>(replicates));
  const std::vector<double> base = data.weights_or_ones();
  parallel_for(replicates, [&](std::size_t b) {
    std::vector<double> weights(n);
    const auto row = counts.row(b);
    for (std::size_t i = 0; i < n; ++i) weights[i] = static_cast<double>(row[i]) * base[i];
    try {
      const auto model = learner.fit(data, weights, replicate_noise_seed(seed, b));
      predict_queries(*model, queries, by_query.col(static_cast<Eigen::Index>(b)));
    } catch (const FitError& e) {
      throw ReplicateError(b, e.what());
    }
  });

  BaggedRun run;
  run.trace.counts = std::move(counts);
  run.trace.predictions = by_query.transpose();
  run.trace.learner = learner.describe();
  run.trace.validate();
  const Vector mean = run.trace.predictions.colwise().mean();
  run.prediction.assign(mean.data(), mean.data() + mean.size());
  return run;
}

BaggedRun bag_predict(const Dataset& data, const Learner& learner, const ResamplePlan& plan,
                      const QueryMatrix& queries) {
  plan.validate();
  if (plan.n != data.rows()) {
    throw ConfigError("bagging: plan has n = " + std::to_string(plan.n) + " but data has " +
                      std::to_string(data.rows()) + " rows");
  }
  check_queries(data, queries);
  return bag_predict_with_counts(data, learner, draw_resample_counts(plan), plan.seed, queries);
}

std::vector<double> exact_bag_predict(const Dataset& data, const Learner& learner,
                                      const QueryMatrix& queries, std::uint64_t noise_seed) {
  check_queries(data, queries);
  const ExactResampleSet resamples = enumerate_exact_resamples(data.rows());
  Vector total = Vector::Zero(queries.rows());
  Vector values(queries.rows());
  std::vector<double> weights(data.rows());
  const std::vector<double> base = data.weights_or_ones();
  for (const auto& entry : resamples.entries) {
    for (std::size_t i = 0; i < weights.size(); ++i) weights[i] = entry.counts[i] * base[i];
    const auto model = learner.fit(data, weights, noise_seed);
    predict_queries(*model, queries, values);
    total += entry.probability * values;
  }
  return {total.data(), total.data() + total.size()};
}

double oob_error(const ResampleTrace& trace, const Dataset& data) {
  if (trace.queries() != data.rows() || trace.observations() != data.rows()) {
    throw ConfigError("oob error: trace queries must be the training rows");
  }
  double squared_error = 0.0;
  std::size_t used = 0;
  for (std::size_t i = 0; i < data.rows(); ++i) {
    double sum = 0.0;
    std::size_t out_of_bag = 0;
    for (std::size_t b = 0; b < trace.replicates(); ++b) {
      if (trace.counts(b, i) == 0) {
        sum += trace.predictions(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(i));
        ++out_of_bag;
      }
    }
    if (out_of_bag == 0) continue;
    const double residual = sum / static_cast<double>(out_of_bag) - data.y(i);
    squared_error += residual * residual;
    ++used;
  }
  if (used == 0) throw EstimationError("oob error: no row was ever out of bag");
  return squared_error / static_cast<double>(used);
}

QueryMatrix training_queries(const Dataset& data) { return data.x(); }

}  // namespace bagvar
