#include "bagvar/bagging.hpp"
#include "bagvar/error.hpp"
#include "bagvar/parallel.hpp"
#include "helpers.hpp"

#include <doctest.h>

#include <cmath>

using namespace bagvar;

namespace {

// Fails whenever the first observation is absent from the resample.
class FragileLearner final : public Learner {
 public:
  std::unique_ptr<Model> fit(const Dataset& data, std::span<const double> weights, std::uint64_t s) const override {
    if (weights[0] == 0.0) throw FitError("first row missing");
    return inner_->fit(data, weights, s);
  }
  std::string describe() const override { return "fragile"; }

 private:
  std::unique_ptr<Learner> inner_ = make_learner({LearnerKind::sample_mean});
};

// Predicts y exactly at every training x by remembering the responses.
class MemorizingLearner final : public Learner {
 public:
  std::unique_ptr<Model> fit(const Dataset& data, std::span<const double>, std::uint64_t) const override {
    LearnerSpec spec;
    spec.min_leaf = 1;
    std::vector<double> ones(data.rows(), 1.0);
    return make_learner(spec)->fit(data, ones, 0);
  }
  std::string describe() const override { return "memorize"; }
};

}  // namespace

TEST_CASE("sample mean bagging approaches the sample mean") {
  const Dataset d = testing::normal_data(50, 1, 1);
  const auto learner = make_learner({LearnerKind::sample_mean});
  const BaggedRun run = bag_predict(d, *learner, testing::plan(50, 20000, 2), QueryMatrix::Zero(1, 1));
  // sd of theta_B is about sd(y) / sqrt(n B)
  CHECK(std::abs(run.prediction[0] - d.y().mean()) < 5.0 * std::sqrt(1.0 / (50.0 * 20000.0)) * 1.5);
  CHECK(run.trace.replicates() == 20000);
  CHECK(run.trace.queries() == 1);
}

TEST_CASE("constant data gives constant replicates") {
  const Dataset d = testing::column_data({0.1, 0.2, 0.3, 0.4}, {2.0, 2.0, 2.0, 2.0});
  const BaggedRun run = bag_predict(d, *make_learner({}), testing::plan(4, 30, 3), training_queries(d));
  CHECK((run.trace.predictions.array() == 2.0).all());
  for (double p : run.prediction) CHECK(p == 2.0);
}

TEST_CASE("B = 1 returns the single replicate") {
  const Dataset d = testing::normal_data(20, 2, 4);
  const BaggedRun run = bag_predict(d, *make_learner({}), testing::plan(20, 1, 5), training_queries(d));
  for (std::size_t k = 0; k < run.prediction.size(); ++k) {
    CHECK(run.prediction[k] == run.trace.predictions(0, static_cast<Eigen::Index>(k)));
  }
}

TEST_CASE("bagged prediction lies within the replicate range") {
  const Dataset d = testing::normal_data(40, 2, 6);
  LearnerSpec spec;
  spec.mtry = 1;
  const BaggedRun run = bag_predict(d, *make_learner(spec), testing::plan(40, 50, 7), training_queries(d));
  for (std::size_t k = 0; k < run.prediction.size(); ++k) {
    const auto col = run.trace.predictions.col(static_cast<Eigen::Index>(k));
    CHECK(run.prediction[k] >= col.minCoeff() - 1e-12);
    CHECK(run.prediction[k] <= col.maxCoeff() + 1e-12);
  }
}

TEST_CASE("bagging is reproducible and independent of thread count") {
  const Dataset d = testing::normal_data(60, 3, 8);
  LearnerSpec spec;
  spec.mtry = 1;
  const auto learner = make_learner(spec);
  const auto p = testing::plan(60, 64, 9);
  const BaggedRun a = bag_predict(d, *learner, p, training_queries(d));
  const std::size_t saved = thread_count();
  set_thread_count(1);
  const BaggedRun b = bag_predict(d, *learner, p, training_queries(d));
  set_thread_count(4);
  const BaggedRun c = bag_predict(d, *learner, p, training_queries(d));
  set_thread_count(saved);
  CHECK(a.trace.counts == b.trace.counts);
  CHECK(a.trace.predictions == b.trace.predictions);
  CHECK(a.trace.predictions == c.trace.predictions);
}

TEST_CASE("replicate failures carry the replicate index") {
  const Dataset d = testing::normal_data(30, 1, 10);
  FragileLearner learner;
  try {
    bag_predict(d, learner, testing::plan(30, 200, 11), QueryMatrix::Zero(1, 1));
    FAIL("expected a replicate error");
  } catch (const ReplicateError& e) {
    const auto counts = draw_resample_counts(testing::plan(30, 200, 11));
    std::size_t first = 0;
    while (counts(first, 0) != 0) ++first;
    CHECK(e.replicate() == first);
  }
}

TEST_CASE("bagging input checks") {
  const Dataset d = testing::normal_data(10, 2, 12);
  const auto learner = make_learner({});
  CHECK_THROWS_AS(bag_predict(d, *learner, testing::plan(11, 5, 1), training_queries(d)), ConfigError);
  CHECK_THROWS_AS(bag_predict(d, *learner, testing::plan(10, 5, 1), QueryMatrix::Zero(1, 3)), Error);
}

TEST_CASE("exact bagging") {
  const auto mean = make_learner({LearnerKind::sample_mean});
  for (std::size_t n = 1; n <= 7; ++n) {
    const Dataset d = testing::normal_data(n, 1, 20 + n);
    CHECK(exact_bag_predict(d, *mean, QueryMatrix::Zero(1, 1))[0] == doctest::Approx(d.y().mean()).epsilon(1e-13));
  }
  const auto max = make_max_response_learner();
  CHECK(exact_bag_predict(testing::responses_only({0.0, 1.0}), *max, QueryMatrix::Zero(1, 1))[0] ==
        doctest::Approx(0.75).epsilon(1e-15));
  const Dataset single = testing::column_data({0.3}, {4.0});
  CHECK(exact_bag_predict(single, *make_learner({}), QueryMatrix::Constant(1, 1, 0.3))[0] == 4.0);
  CHECK_THROWS_AS(exact_bag_predict(testing::normal_data(9, 1, 1), *mean, QueryMatrix::Zero(1, 1)), CapacityError);
}

TEST_CASE("oob error") {
  SUBCASE("memorizing learner has zero OOB error") {
    const Dataset d = testing::normal_data(30, 1, 30);
    MemorizingLearner learner;
    const BaggedRun run = bag_predict(d, learner, testing::plan(30, 50, 31), training_queries(d));
    CHECK(oob_error(run.trace, d) == doctest::Approx(0.0));
  }
  SUBCASE("sample mean: Var(y)(1 + 1/n)") {
    // brute-force oracle: the leave-one-out mean of n iid draws misses y_i by
    // sigma^2 (1 + 1/(n-1)); out-of-bag replicates average over resamples of
    // the other n-1 points, whose expected squared error is close to that.
    const std::size_t n = 20;
    const auto mean = make_learner({LearnerKind::sample_mean});
    double total = 0.0;
    const int datasets = 600;
    for (int r = 0; r < datasets; ++r) {
      const Dataset d = testing::normal_data(n, 1, 1000 + r);
      const BaggedRun run = bag_predict(d, *mean, testing::plan(n, 400, 2000 + r), training_queries(d));
      total += oob_error(run.trace, d);
    }
    // y = x + N(0,1) with x ~ U(0,1): Var(y) = 1 + 1/12
    const double expected = (1.0 + 1.0 / 12.0) * (1.0 + 1.0 / n);
    CHECK(total / datasets == doctest::Approx(expected).epsilon(0.05));
  }
  SUBCASE("rows always in bag are skipped") {
    const ResampleTrace trace = testing::trace_from({{1, 1}, {2, 0}}, {1.0, 3.0});
    ResampleTrace two;
    two.counts = trace.counts;
    two.predictions = Matrix(2, 2);
    two.predictions << 1.0, 5.0, 3.0, 7.0;
    const Dataset d = testing::column_data({0.0, 1.0}, {0.0, 6.0});
    // row 0 is never out of bag; row 1 is out of bag only in replicate 1
    CHECK(oob_error(two, d) == doctest::Approx(1.0));
    ResampleTrace none;
    none.counts = testing::counts_from({{1, 1}, {1, 1}});
    none.predictions = Matrix::Zero(2, 2);
    CHECK_THROWS_AS(oob_error(none, d), EstimationError);
  }
}

TEST_CASE("observation weights multiply the resample counts") {
  Matrix x(3, 1);
  x << 0, 1, 2;
  Vector y(3);
  y << 1, 2, 6;
  Vector w(3);
  w << 1, 0.5, 2;
  const Dataset weighted(x, y, w);
  const auto mean = make_learner({LearnerKind::sample_mean});
  const BaggedRun run = bag_predict(weighted, *mean, testing::plan(3, 20, 1), QueryMatrix::Zero(1, 1));
  for (std::size_t b = 0; b < 20; ++b) {
    const double n0 = run.trace.counts(b, 0);
    const double n1 = 0.5 * run.trace.counts(b, 1);
    const double n2 = 2.0 * run.trace.counts(b, 2);
    CHECK(run.trace.predictions(static_cast<Eigen::Index>(b), 0) ==
          doctest::Approx((n0 + 2 * n1 + 6 * n2) / (n0 + n1 + n2)));
  }
}
