#include "bagvar/generators.hpp"

#include "bagvar/error.hpp"
#include "bagvar/rng.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <string>

namespace bagvar {

std::string_view to_string(GeneratorKind kind) noexcept {
  switch (kind) {
    case GeneratorKind::cosine:
      return "cosine";
    case GeneratorKind::noisy_xor:
      return "noisy_xor";
    case GeneratorKind::noisy_and:
      return "noisy_and";
    case GeneratorKind::step_function:
      return "step_function";
    case GeneratorKind::circle_indicator:
      return "circle_indicator";
  }
  return "unknown";
}

GeneratorKind parse_generator_kind(std::string_view name) {
  if (name == "cosine") return GeneratorKind::cosine;
  if (name == "noisy_xor" || name == "xor") return GeneratorKind::noisy_xor;
  if (name == "noisy_and" || name == "and") return GeneratorKind::noisy_and;
  if (name == "step_function" || name == "step") return GeneratorKind::step_function;
  if (name == "circle_indicator" || name == "circle") return GeneratorKind::circle_indicator;
  throw ConfigError("unknown generator '" + std::string(name) + "'");
}

std::size_t default_feature_count(GeneratorKind kind) noexcept {
  switch (kind) {
    case GeneratorKind::cosine:
      return 2;
    case GeneratorKind::noisy_xor:
      return 50;
    case GeneratorKind::noisy_and:
      return 500;
    case GeneratorKind::step_function:
      return 1;
    case GeneratorKind::circle_indicator:
      return 2;
  }
  return 1;
}

std::size_t required_feature_count(GeneratorKind kind) noexcept {
  switch (kind) {
    case GeneratorKind::noisy_xor:
    case GeneratorKind::noisy_and:
      return 4;
    case GeneratorKind::cosine:
    case GeneratorKind::circle_indicator:
      return 2;
    case GeneratorKind::step_function:
      return 1;
  }
  return 1;
}

double default_noise_sd(GeneratorKind kind) noexcept {
  switch (kind) {
    case GeneratorKind::cosine:
    case GeneratorKind::circle_indicator:
      return 0.0;
    case GeneratorKind::noisy_xor:
    case GeneratorKind::noisy_and:
      return 1.0;
    case GeneratorKind::step_function:
      return 0.5;
  }
  return 0.0;
}

void GeneratorSpec::validate() const {
  if (n == 0) throw ConfigError("generator: n must be at least 1");
  if (features() < required_feature_count(kind)) {
    throw ConfigError("generator " + std::string(to_string(kind)) + " needs p >= " +
                      std::to_string(required_feature_count(kind)));
  }
  if (!(noise() >= 0.0)) throw ConfigError("generator: noise sd must be non-negative");
}

double signal(GeneratorKind kind, std::span<const double> x) {
  switch (kind) {
    case GeneratorKind::cosine:
      return 3.0 * std::cos(std::numbers::pi * (x[0] + x[1]));
    case GeneratorKind::noisy_xor: {
      const bool a = (x[0] > 0.6) != (x[1] > 0.6);
      const bool b = (x[2] > 0.6) != (x[3] > 0.6);
      return 5.0 * (static_cast<double>(a) + static_cast<double>(b));
    }
    case GeneratorKind::noisy_and:
      return (x[0] > 0.3 && x[1] > 0.3 && x[2] > 0.3 && x[3] > 0.3) ? 10.0 : 0.0;
    case GeneratorKind::step_function: {
      double level = 0.0;
      for (double jump : kStepJumps) level += x[0] > jump ? 1.0 : 0.0;
      return level;
    }
    case GeneratorKind::circle_indicator:
      return std::hypot(x[0], x[1]) >= 1.0 ? 1.0 : 0.0;
  }
  return 0.0;
}

namespace {

void fill_features(GeneratorKind kind, Engine& engine, Eigen::Ref<Matrix> out) {
  const bool symmetric = kind == GeneratorKind::circle_indicator;
  std::uniform_real_distribution<double> unit(symmetric ? -1.0 : 0.0, 1.0);
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    for (Eigen::Index j = 0; j < out.cols(); ++j) out(i, j) = unit(engine);
  }
}

}  // namespace

QueryMatrix sample_features(GeneratorKind kind, std::size_t n, std::size_t p, std::uint64_t seed) {
  Engine engine = make_engine(seed, StreamDomain::generator, 1);
  QueryMatrix x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
  fill_features(kind, engine, x);
  return x;
}

Dataset generate(const GeneratorSpec& spec) {
  spec.validate();
  const std::size_t p = spec.features();
  Engine engine = make_engine(spec.seed, StreamDomain::generator, 0);
  Matrix x(static_cast<Eigen::Index>(spec.n), static_cast<Eigen::Index>(p));
  fill_features(spec.kind, engine, x);

  std::normal_distribution<double> noise(0.0, 1.0);
  const double sd = spec.noise();
  Vector y(static_cast<Eigen::Index>(spec.n));
  std::vector<double> row(p);
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (std::size_t j = 0; j < p; ++j) row[j] = x(i, static_cast<Eigen::Index>(j));
    y(i) = signal(spec.kind, row);
    if (sd > 0.0) y(i) += sd * noise(engine);
  }
  return Dataset(std::move(x), std::move(y));
}

}  // namespace bagvar
