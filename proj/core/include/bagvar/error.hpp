#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace bagvar {

/// Error categories. The numeric values double as CLI exit codes.
enum class ErrorCode : int {
  config = 2,
  data = 3,
  estimation = 4,
  capacity = 5,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& message) : Error(ErrorCode::config, message) {}
};

class DataError : public Error {
 public:
  explicit DataError(const std::string& message) : Error(ErrorCode::data, message) {}
};

/// A learner could not be fit to the (weighted) data it was given.
class FitError : public DataError {
 public:
  using DataError::DataError;
};

/// Fit failure inside a bagging run, tagged with the offending replicate.
class ReplicateError : public FitError {
 public:
  ReplicateError(std::size_t replicate, const std::string& message);

  std::size_t replicate() const noexcept { return replicate_; }

 private:
  std::size_t replicate_;
};

class EstimationError : public Error {
 public:
  explicit EstimationError(const std::string& message)
      : Error(ErrorCode::estimation, message) {}
};

class CapacityError : public Error {
 public:
  explicit CapacityError(const std::string& message) : Error(ErrorCode::capacity, message) {}
};

}  // namespace bagvar
