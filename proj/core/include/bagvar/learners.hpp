#pragma once

#include "bagvar/dataset.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <string_view>

namespace bagvar {

/// A fitted base predictor t(x; xi, Z*).
class Model {
 public:
  virtual ~Model() = default;
  virtual double predict(std::span<const double> x) const = 0;
};

/// Fits a Model to weighted training data. Weights are bootstrap counts in
/// the bagging path; zero-weight rows must not influence the fit.
class Learner {
 public:
  virtual ~Learner() = default;

  /// `noise_seed` is the auxiliary randomness xi; deterministic learners ignore it.
  virtual std::unique_ptr<Model> fit(const Dataset& data, std::span<const double> weights,
                                     std::uint64_t noise_seed) const = 0;
  virtual std::string describe() const = 0;
};

enum class LearnerKind { regression_tree, adaptive_poly, sample_mean };

std::string_view to_string(LearnerKind kind) noexcept;
/// Accepts "tree", "regression_tree", "poly", "adaptive_poly", "mean", "sample_mean".
LearnerKind parse_learner_kind(std::string_view name);

/// Serializable description of a base learner and its hyperparameters.
struct LearnerSpec {
  LearnerKind kind = LearnerKind::regression_tree;
  std::size_t mtry = 0;        ///< features tried per split; 0 means p
  std::size_t min_leaf = 1;    ///< minimum weight mass per leaf
  std::size_t max_leaves = 0;  ///< 0 means unlimited
  std::size_t max_degree = 6;  ///< adaptive polynomial degree cap

  std::string describe() const;
};

std::unique_ptr<Learner> make_learner(const LearnerSpec& spec);

/// Weighted mean of the responses.
double sample_mean_learner(const Dataset& data, std::span<const double> weights);
double sample_mean_learner(const Dataset& data);

/// Learner built from a plain statistic of the weighted sample; the fitted
/// model is constant in x.
class StatisticLearner final : public Learner {
 public:
  using Statistic = std::function<double(const Dataset&, std::span<const double>)>;

  StatisticLearner(std::string name, Statistic statistic);

  std::unique_ptr<Model> fit(const Dataset& data, std::span<const double> weights,
                             std::uint64_t noise_seed) const override;
  std::string describe() const override { return name_; }

 private:
  std::string name_;
  Statistic statistic_;
};

/// Maximum response among rows with positive weight. Nonlinear in the
/// resample, which makes it useful for exact-enumeration checks.
std::unique_ptr<Learner> make_max_response_learner();

}  // namespace bagvar
