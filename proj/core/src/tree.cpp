#include "bagvar/tree.hpp"

#include "bagvar/bootstrap.hpp"
#include "bagvar/error.hpp"
#include "bagvar/rng.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numeric>
#include <string>

namespace bagvar {

TreeModel::TreeModel(std::vector<TreeNode> nodes, std::size_t feature_count)
    : nodes_(std::move(nodes)), feature_count_(feature_count) {
  if (nodes_.empty()) throw DataError("tree: no nodes");
  const auto count = static_cast<std::int32_t>(nodes_.size());
  for (const auto& node : nodes_) {
    if (node.is_leaf()) {
      if (!std::isfinite(node.value)) throw DataError("tree: non-finite leaf value");
      continue;
    }
    if (static_cast<std::size_t>(node.feature) >= feature_count_) {
      throw DataError("tree: split feature out of range");
    }
    if (node.left <= 0 || node.right <= 0 || node.left >= count || node.right >= count) {
      throw DataError("tree: internal node with invalid children");
    }
  }
}

TreeModel TreeModel::leaf(double value, std::size_t feature_count) {
  TreeNode node;
  node.value = value;
  return TreeModel({node}, feature_count);
}

TreeModel TreeModel::stump(std::size_t feature, double threshold, double left_value,
                           double right_value, std::size_t feature_count) {
  TreeNode root;
  root.feature = static_cast<std::int32_t>(feature);
  root.threshold = threshold;
  root.left = 1;
  root.right = 2;
  root.value = 0.5 * (left_value + right_value);
  TreeNode left;
  left.value = left_value;
  TreeNode right;
  right.value = right_value;
  return TreeModel({root, left, right}, feature_count);
}

double TreeModel::predict(std::span<const double> x) const {
  std::size_t at = 0;
  while (!nodes_[at].is_leaf()) {
    const TreeNode& node = nodes_[at];
    at = static_cast<std::size_t>(x[static_cast<std::size_t>(node.feature)] <= node.threshold
                                      ? node.left
                                      : node.right);
  }
  return nodes_[at].value;
}

std::size_t TreeModel::leaf_count() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(nodes_.begin(), nodes_.end(), [](const TreeNode& n) { return n.is_leaf(); }));
}

double predict_tree(const TreeModel& model, std::span<const double> x) {
  if (x.size() != model.feature_count()) {
    throw DataError("predict_tree: query has " + std::to_string(x.size()) +
                    " features, model expects " + std::to_string(model.feature_count()));
  }
  return model.predict(x);
}

namespace {

struct Split {
  std::int32_t feature = -1;
  double threshold = 0.0;
  double gain = 0.0;
};

struct Candidate {
  std::size_t node = 0;
  std::vector<std::size_t> rows;
  Split split;
};

struct NodeStats {
  double weight = 0.0;
  double mean = 0.0;
  double sse = 0.0;
};

NodeStats node_stats(const Dataset& data, std::span<const double> weights,
                     const std::vector<std::size_t>& rows) {
  NodeStats s;
  double weighted_sum = 0.0;
  for (std::size_t r : rows) {
    s.weight += weights[r];
    weighted_sum += weights[r] * data.y(r);
  }
  s.mean = weighted_sum / s.weight;
  for (std::size_t r : rows) {
    const double d = data.y(r) - s.mean;
    s.sse += weights[r] * d * d;
  }
  return s;
}

class Grower {
 public:
  Grower(const Dataset& data, std::span<const double> weights, const TreeParams& params)
      : data_(data),
        weights_(weights),
        params_(params),
        p_(data.features()),
        mtry_(params.mtry == 0 ? p_ : params.mtry),
        engine_(params.split_noise_seed) {}

  struct Grown {
    std::vector<TreeNode> nodes;
    std::vector<double> sse_path;
  };

  Grown grow() {
    std::vector<std::size_t> rows;
    for (std::size_t r = 0; r < data_.rows(); ++r) {
      if (weights_[r] > 0.0) rows.push_back(r);
    }
    if (rows.empty()) throw FitError("regression tree: no rows with positive weight");

    const NodeStats root = node_stats(data_, weights_, rows);
    min_gain_ = 1e-12 * root.sse;
    nodes_.push_back(make_node(root));
    double total_sse = root.sse;
    sse_path_.push_back(total_sse);

    std::vector<Candidate> frontier;
    frontier.push_back({0, std::move(rows), {}});
    frontier.back().split = best_split(frontier.back().rows);

    std::size_t leaves = 1;
    const std::size_t leaf_cap = params_.max_leaves == 0 ? data_.rows() + 1 : params_.max_leaves;
    while (leaves < leaf_cap) {
      // largest gain first; the earliest-created leaf wins ties
      auto best = frontier.end();
      for (auto it = frontier.begin(); it != frontier.end(); ++it) {
        if (it->split.feature < 0) continue;
        if (best == frontier.end() || it->split.gain > best->split.gain) best = it;
      }
      if (best == frontier.end()) break;

      Candidate parent = std::move(*best);
      frontier.erase(best);

      std::vector<std::size_t> left_rows;
      std::vector<std::size_t> right_rows;
      const auto f = static_cast<std::size_t>(parent.split.feature);
      for (std::size_t r : parent.rows) {
        (data_.x(r, f) <= parent.split.threshold ? left_rows : right_rows).push_back(r);
      }
      const NodeStats left = node_stats(data_, weights_, left_rows);
      const NodeStats right = node_stats(data_, weights_, right_rows);

      const auto left_id = static_cast<std::int32_t>(nodes_.size());
      nodes_.push_back(make_node(left));
      nodes_.push_back(make_node(right));
      TreeNode& node = nodes_[parent.node];
      node.feature = parent.split.feature;
      node.threshold = parent.split.threshold;
      node.left = left_id;
      node.right = left_id + 1;

      const double parent_sse = node_sse_[parent.node];
      const double next_sse = total_sse - parent_sse + left.sse + right.sse;
      assert(next_sse <= total_sse + 1e-9 * (1.0 + total_sse));
      total_sse = std::min(total_sse, next_sse);
      sse_path_.push_back(total_sse);
      ++leaves;

      frontier.push_back({static_cast<std::size_t>(left_id), std::move(left_rows), {}});
      frontier.back().split = best_split(frontier.back().rows);
      frontier.push_back({static_cast<std::size_t>(left_id + 1), std::move(right_rows), {}});
      frontier.back().split = best_split(frontier.back().rows);
    }

    return {std::move(nodes_), std::move(sse_path_)};
  }

 private:
  TreeNode make_node(const NodeStats& stats) {
    TreeNode node;
    node.value = stats.mean;
    node.weight = stats.weight;
    node_sse_.push_back(stats.sse);
    return node;
  }

  std::vector<std::size_t> candidate_features() {
    std::vector<std::size_t> features(p_);
    std::iota(features.begin(), features.end(), std::size_t{0});
    if (mtry_ >= p_) return features;
    // partial Fisher-Yates: the first mtry_ entries are a uniform subset
    for (std::size_t k = 0; k < mtry_; ++k) {
      const std::size_t pick = k + uniform_index(engine_, p_ - k);
      std::swap(features[k], features[pick]);
    }
    features.resize(mtry_);
    std::sort(features.begin(), features.end());
    return features;
  }

  Split best_split(const std::vector<std::size_t>& rows) {
    Split best;
    double node_weight = 0.0;
    double y_min = data_.y(rows.front());
    double y_max = y_min;
    for (std::size_t r : rows) {
      node_weight += weights_[r];
      y_min = std::min(y_min, data_.y(r));
      y_max = std::max(y_max, data_.y(r));
    }
    const auto min_leaf = static_cast<double>(params_.min_leaf);
    // constant responses or too little mass: no feature draw, stays a leaf
    if (y_min == y_max || node_weight < 2.0 * min_leaf || rows.size() < 2) return best;

    const std::vector<std::size_t> features = candidate_features();
    std::vector<std::size_t> order(rows);
    for (std::size_t f : features) {
      std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const double xa = data_.x(a, f);
        const double xb = data_.x(b, f);
        return xa < xb || (xa == xb && a < b);
      });
      double total_wy = 0.0;
      for (std::size_t r : order) total_wy += weights_[r] * data_.y(r);

      double left_w = 0.0;
      double left_wy = 0.0;
      for (std::size_t k = 0; k + 1 < order.size(); ++k) {
        const std::size_t r = order[k];
        left_w += weights_[r];
        left_wy += weights_[r] * data_.y(r);
        const double x_here = data_.x(r, f);
        const double x_next = data_.x(order[k + 1], f);
        if (x_here == x_next) continue;
        const double right_w = node_weight - left_w;
        if (left_w < min_leaf || right_w < min_leaf) continue;
        const double diff = left_wy / left_w - (total_wy - left_wy) / right_w;
        const double gain = left_w * right_w / node_weight * diff * diff;
        if (gain > best.gain && gain > min_gain_) {
          double threshold = 0.5 * (x_here + x_next);
          if (!(threshold < x_next)) threshold = x_here;
          best.feature = static_cast<std::int32_t>(f);
          best.threshold = threshold;
          best.gain = gain;
        }
      }
    }
    return best;
  }

  const Dataset& data_;
  std::span<const double> weights_;
  TreeParams params_;
  std::size_t p_;
  std::size_t mtry_;
  Engine engine_;
  double min_gain_ = 0.0;
  std::vector<TreeNode> nodes_;
  std::vector<double> node_sse_;
  std::vector<double> sse_path_;
};

}  // namespace

TreeModel fit_regression_tree(const Dataset& data, std::span<const double> weights,
                              const TreeParams& params) {
  if (weights.size() != data.rows()) throw DataError("regression tree: weight count mismatch");
  if (params.mtry > data.features()) {
    throw ConfigError("regression tree: mtry " + std::to_string(params.mtry) + " exceeds p = " +
                      std::to_string(data.features()));
  }
  if (params.min_leaf == 0) throw ConfigError("regression tree: min_leaf must be at least 1");
  if (params.max_leaves == 1) throw ConfigError("regression tree: max_leaves must be at least 2");
  Grower::Grown grown = Grower(data, weights, params).grow();
  TreeModel model(std::move(grown.nodes), data.features());
  model.sse_path_ = std::move(grown.sse_path);
  return model;
}

TreeModel fit_regression_tree(const Dataset& data, const TreeParams& params) {
  const std::vector<double> weights = data.weights_or_ones();
  return fit_regression_tree(data, weights, params);
}

}  // namespace bagvar
