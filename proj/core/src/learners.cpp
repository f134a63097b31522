#include "bagvar/learners.hpp"

#include "bagvar/adaptive_poly.hpp"
#include "bagvar/error.hpp"
#include "bagvar/tree.hpp"

#include <limits>
#include <sstream>
#include <string>

namespace bagvar {

std::string_view to_string(LearnerKind kind) noexcept {
  switch (kind) {
    case LearnerKind::regression_tree:
      return "tree";
    case LearnerKind::adaptive_poly:
      return "poly";
    case LearnerKind::sample_mean:
      return "mean";
  }
  return "unknown";
}

LearnerKind parse_learner_kind(std::string_view name) {
  if (name == "tree" || name == "regression_tree") return LearnerKind::regression_tree;
  if (name == "poly" || name == "adaptive_poly") return LearnerKind::adaptive_poly;
  if (name == "mean" || name == "sample_mean") return LearnerKind::sample_mean;
  throw ConfigError("unknown learner '" + std::string(name) + "'");
}

std::string LearnerSpec::describe() const {
  std::ostringstream out;
  out << to_string(kind);
  switch (kind) {
    case LearnerKind::regression_tree:
      out << "(mtry=" << mtry << ",min_leaf=" << min_leaf << ",max_leaves=" << max_leaves << ")";
      break;
    case LearnerKind::adaptive_poly:
      out << "(max_degree=" << max_degree << ")";
      break;
    case LearnerKind::sample_mean:
      break;
  }
  return out.str();
}

namespace {

class ConstantModel final : public Model {
 public:
  explicit ConstantModel(double value) : value_(value) {}
  double predict(std::span<const double>) const override { return value_; }

 private:
  double value_;
};

class TreeLearner final : public Learner {
 public:
  explicit TreeLearner(LearnerSpec spec) : spec_(std::move(spec)) {}

  std::unique_ptr<Model> fit(const Dataset& data, std::span<const double> weights,
                             std::uint64_t noise_seed) const override {
    TreeParams params;
    params.mtry = spec_.mtry;
    params.min_leaf = spec_.min_leaf;
    params.max_leaves = spec_.max_leaves;
    params.split_noise_seed = noise_seed;
    return std::make_unique<TreeModel>(fit_regression_tree(data, weights, params));
  }
  std::string describe() const override { return spec_.describe(); }

 private:
  LearnerSpec spec_;
};

class PolyLearner final : public Learner {
 public:
  explicit PolyLearner(LearnerSpec spec) : spec_(std::move(spec)) {}

  std::unique_ptr<Model> fit(const Dataset& data, std::span<const double> weights,
                             std::uint64_t) const override {
    return std::make_unique<AdaptivePolyModel>(fit_adaptive_poly(data, weights, spec_.max_degree));
  }
  std::string describe() const override { return spec_.describe(); }

 private:
  LearnerSpec spec_;
};

}  // namespace

std::unique_ptr<Learner> make_learner(const LearnerSpec& spec) {
  switch (spec.kind) {
    case LearnerKind::regression_tree:
      if (spec.min_leaf == 0) throw ConfigError("tree learner: min_leaf must be at least 1");
      if (spec.max_leaves == 1) throw ConfigError("tree learner: max_leaves must be 0 or at least 2");
      return std::make_unique<TreeLearner>(spec);
    case LearnerKind::adaptive_poly:
      if (spec.max_degree == 0) throw ConfigError("poly learner: max_degree must be at least 1");
      return std::make_unique<PolyLearner>(spec);
    case LearnerKind::sample_mean:
      return std::make_unique<StatisticLearner>(
          "mean", [](const Dataset& data, std::span<const double> w) {
            return sample_mean_learner(data, w);
          });
  }
  throw ConfigError("unsupported learner kind");
}

double sample_mean_learner(const Dataset& data, std::span<const double> weights) {
  if (weights.size() != data.rows()) throw DataError("sample mean: weight count mismatch");
  double total = 0.0;
  double weighted_sum = 0.0;
  for (std::size_t i = 0; i < data.rows(); ++i) {
    total += weights[i];
    weighted_sum += weights[i] * data.y(i);
  }
  if (!(total > 0.0)) throw FitError("sample mean: all weights are zero");
  return weighted_sum / total;
}

double sample_mean_learner(const Dataset& data) {
  const std::vector<double> weights = data.weights_or_ones();
  return sample_mean_learner(data, weights);
}

StatisticLearner::StatisticLearner(std::string name, Statistic statistic)
    : name_(std::move(name)), statistic_(std::move(statistic)) {}

std::unique_ptr<Model> StatisticLearner::fit(const Dataset& data, std::span<const double> weights,
                                             std::uint64_t) const {
  return std::make_unique<ConstantModel>(statistic_(data, weights));
}

std::unique_ptr<Learner> make_max_response_learner() {
  return std::make_unique<StatisticLearner>(
      "max", [](const Dataset& data, std::span<const double> w) {
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < data.rows(); ++i) {
          if (w[i] > 0.0) best = std::max(best, data.y(i));
        }
        if (best == -std::numeric_limits<double>::infinity()) {
          throw FitError("max learner: all weights are zero");
        }
        return best;
      });
}

}  // namespace bagvar
