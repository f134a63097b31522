#pragma once

#include "bagvar/dataset.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>

namespace bagvar {

/// Synthetic regression problems.
///   cosine:           Y = 3 cos(pi (X1 + X2)),                       p = 2, no noise
///   noisy_xor:        Y = 5 [XOR(X1>.6, X2>.6) + XOR(X3>.6, X4>.6)] + e, p = 50
///   noisy_and:        Y = 10 AND(X1>.3, X2>.3, X3>.3, X4>.3) + e,    p = 500
///   step_function:    Y = #{jumps below X1} + e, e ~ N(0, 0.5^2),    p = 1
///   circle_indicator: Y = 1(||X||_2 >= 1), X ~ U([-1, 1]^2),        p = 2
/// Features are U([0, 1]) except for the circle. e ~ N(0, 1) unless noted.
enum class GeneratorKind { cosine, noisy_xor, noisy_and, step_function, circle_indicator };

std::string_view to_string(GeneratorKind kind) noexcept;
GeneratorKind parse_generator_kind(std::string_view name);

/// Jump locations of the step function.
inline constexpr std::array<double, 4> kStepJumps = {0.2, 0.4, 0.6, 0.8};

std::size_t default_feature_count(GeneratorKind kind) noexcept;
/// Smallest p for which the signal is defined.
std::size_t required_feature_count(GeneratorKind kind) noexcept;
double default_noise_sd(GeneratorKind kind) noexcept;

struct GeneratorSpec {
  GeneratorKind kind = GeneratorKind::cosine;
  std::size_t n = 0;
  std::size_t p = 0;                 ///< 0 means the generator default
  std::optional<double> noise_sd;    ///< unset means the generator default
  std::uint64_t seed = 0;

  std::size_t features() const noexcept { return p == 0 ? default_feature_count(kind) : p; }
  double noise() const noexcept { return noise_sd.value_or(default_noise_sd(kind)); }
  void validate() const;
};

/// Noise-free regression function.
double signal(GeneratorKind kind, std::span<const double> x);

/// Features only: n rows drawn from the generator's feature distribution.
QueryMatrix sample_features(GeneratorKind kind, std::size_t n, std::size_t p, std::uint64_t seed);

/// Deterministic in the spec (including its seed).
Dataset generate(const GeneratorSpec& spec);

}  // namespace bagvar
