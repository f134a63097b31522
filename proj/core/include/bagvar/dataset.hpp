#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace bagvar {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Training examples Z_i = (x_i, y_i): an n x p feature matrix, n responses
/// and optional non-negative row weights.
class Dataset {
 public:
  Dataset() = default;

  /// Throws DataError on shape mismatch, non-finite values, n == 0, p == 0,
  /// or weights that are negative or all zero.
  Dataset(Matrix features, Vector responses, std::optional<Vector> weights = std::nullopt);

  std::size_t rows() const noexcept { return static_cast<std::size_t>(features_.rows()); }
  std::size_t features() const noexcept { return static_cast<std::size_t>(features_.cols()); }

  const Matrix& x() const noexcept { return features_; }
  const Vector& y() const noexcept { return responses_; }
  double x(std::size_t i, std::size_t j) const { return features_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)); }
  double y(std::size_t i) const { return responses_(static_cast<Eigen::Index>(i)); }

  bool has_weights() const noexcept { return weights_.has_value(); }
  const std::optional<Vector>& weights() const noexcept { return weights_; }
  /// Row weights, or all ones when none were given.
  std::vector<double> weights_or_ones() const;

  /// Feature vector of row i.
  std::vector<double> row(std::size_t i) const;

  const std::vector<std::string>& feature_names() const noexcept { return feature_names_; }
  const std::string& response_name() const noexcept { return response_name_; }
  void set_names(std::vector<std::string> feature_names, std::string response_name);

 private:
  Matrix features_;
  Vector responses_;
  std::optional<Vector> weights_;
  std::vector<std::string> feature_names_;
  std::string response_name_ = "y";
};

/// Query points as rows of a q x p matrix.
using QueryMatrix = Eigen::MatrixXd;

}  // namespace bagvar
