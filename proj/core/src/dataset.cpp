#include "bagvar/dataset.hpp"

#include "bagvar/error.hpp"

#include <cmath>

namespace bagvar {

Dataset::Dataset(Matrix x, Vector y, std::optional<Vector> weights)
    : features_(std::move(x)), responses_(std::move(y)), weights_(std::move(weights)) {
  if (features_.rows() == 0) throw DataError("dataset: no rows");
  if (features_.cols() == 0) throw DataError("dataset: no feature columns");
  if (responses_.size() != features_.rows()) {
    throw DataError("dataset: " + std::to_string(responses_.size()) + " responses for " +
                    std::to_string(features_.rows()) + " rows");
  }
  if (!features_.allFinite()) throw DataError("dataset: non-finite feature value");
  if (!responses_.allFinite()) throw DataError("dataset: non-finite response value");
  if (weights_) {
    if (weights_->size() != features_.rows()) throw DataError("dataset: weight count mismatch");
    if (!weights_->allFinite() || (weights_->array() < 0.0).any()) {
      throw DataError("dataset: weights must be finite and non-negative");
    }
    if ((weights_->array() == 0.0).all()) throw DataError("dataset: all weights are zero");
  }
  feature_names_.reserve(features());
  for (std::size_t j = 0; j < features(); ++j) feature_names_.push_back("x" + std::to_string(j + 1));
}

std::vector<double> Dataset::weights_or_ones() const {
  if (!weights_) return std::vector<double>(rows(), 1.0);
  return {weights_->data(), weights_->data() + weights_->size()};
}

std::vector<double> Dataset::row(std::size_t i) const {
  std::vector<double> out(features());
  for (std::size_t j = 0; j < features(); ++j) out[j] = x(i, j);
  return out;
}

void Dataset::set_names(std::vector<std::string> feature_names, std::string response_name) {
  if (feature_names.size() != features()) throw DataError("dataset: feature name count mismatch");
  feature_names_ = std::move(feature_names);
  response_name_ = std::move(response_name);
}

}  // namespace bagvar
