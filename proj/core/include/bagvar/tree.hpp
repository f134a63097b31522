#pragma once

#include "bagvar/dataset.hpp"
#include "bagvar/learners.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace bagvar {

struct TreeParams {
  std::size_t mtry = 0;        ///< candidate features per split, in [1, p]; 0 means p
  std::size_t min_leaf = 1;    ///< minimum total weight in each child
  std::size_t max_leaves = 0;  ///< 0 means grow until no split helps
  std::uint64_t split_noise_seed = 0;
};

struct TreeNode {
  std::int32_t feature = -1;  ///< -1 for leaves
  double threshold = 0.0;     ///< x[feature] <= threshold goes left
  std::int32_t left = -1;
  std::int32_t right = -1;
  double value = 0.0;         ///< weighted mean response of the node
  double weight = 0.0;

  bool is_leaf() const noexcept { return feature < 0; }
};

/// Binary regression tree. Node 0 is the root.
class TreeModel final : public Model {
 public:
  TreeModel() = default;
  /// Validates child links and leaf values; throws DataError when malformed.
  TreeModel(std::vector<TreeNode> nodes, std::size_t feature_count);

  static TreeModel leaf(double value, std::size_t feature_count);
  static TreeModel stump(std::size_t feature, double threshold, double left_value,
                         double right_value, std::size_t feature_count);

  double predict(std::span<const double> x) const override;

  const std::vector<TreeNode>& nodes() const noexcept { return nodes_; }
  std::size_t feature_count() const noexcept { return feature_count_; }
  std::size_t leaf_count() const noexcept;

  /// Training SSE after 0, 1, 2, ... accepted splits (filled by the fitter).
  const std::vector<double>& sse_path() const noexcept { return sse_path_; }

 private:
  friend TreeModel fit_regression_tree(const Dataset&, std::span<const double>, const TreeParams&);

  std::vector<TreeNode> nodes_;
  std::size_t feature_count_ = 0;
  std::vector<double> sse_path_;
};

/// Greedy best-first CART growth on weighted data. Each split considers
/// `mtry` features drawn without replacement from the split-noise stream
/// and picks the SSE-minimizing (feature, midpoint threshold); ties go to
/// the lowest feature index, then the lowest threshold. Zero-weight rows
/// are ignored. Throws FitError when no row has positive weight.
TreeModel fit_regression_tree(const Dataset& data, std::span<const double> weights,
                              const TreeParams& params);
TreeModel fit_regression_tree(const Dataset& data, const TreeParams& params);

/// Throws DataError when x.size() != model.feature_count().
double predict_tree(const TreeModel& model, std::span<const double> x);

}  // namespace bagvar
