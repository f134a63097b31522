#include "bagvar/error.hpp"

namespace bagvar {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::config:
      return "CONFIG_ERROR";
    case ErrorCode::data:
      return "DATA_ERROR";
    case ErrorCode::estimation:
      return "ESTIMATION_ERROR";
    case ErrorCode::capacity:
      return "CAPACITY_ERROR";
  }
  return "UNKNOWN_ERROR";
}

ReplicateError::ReplicateError(std::size_t replicate, const std::string& message)
    : FitError("replicate " + std::to_string(replicate) + ": " + message),
      replicate_(replicate) {}

}  // namespace bagvar
