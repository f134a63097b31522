#include "bagvar/variance.hpp"

#include "bagvar/error.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace bagvar {

std::string_view to_string(Method method) noexcept {
  switch (method) {
    case Method::ij:
      return "IJ";
    case Method::jackknife:
      return "J";
    case Method::ij_unbiased:
      return "IJ_U";
    case Method::jackknife_unbiased:
      return "J_U";
    case Method::averaged:
      return "AVG";
  }
  return "?";
}

Method parse_method(std::string_view name) {
  std::string upper(name);
  std::transform(upper.begin(), upper.end(), upper.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  std::replace(upper.begin(), upper.end(), '-', '_');
  for (Method m : {Method::ij, Method::jackknife, Method::ij_unbiased, Method::jackknife_unbiased,
                   Method::averaged}) {
    if (upper == to_string(m)) return m;
  }
  throw ConfigError("unknown estimator '" + std::string(name) + "'");
}

double VarianceEstimate::standard_error() const { return std::sqrt(value); }

double jackknife_mc_factor() noexcept { return std::numbers::e - 1.0; }

namespace {

void require_replicates(std::size_t replicates) {
  if (replicates < 2) {
    throw EstimationError("variance estimate needs B >= 2, got B = " + std::to_string(replicates));
  }
}

void require_shape(const CountMatrix& counts, std::span<const double> predictions) {
  if (predictions.size() != counts.replicates()) {
    throw DataError("variance estimate: " + std::to_string(predictions.size()) +
                    " predictions for " + std::to_string(counts.replicates()) + " replicates");
  }
  require_replicates(counts.replicates());
}

double mean_of(std::span<const double> values) {
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

VarianceEstimate make_estimate(Method method, double raw, std::vector<double> components) {
  VarianceEstimate out;
  out.method = method;
  out.raw_value = raw;
  out.value = std::max(raw, 0.0);
  out.components = std::move(components);
  return out;
}

std::vector<double> ij_covariances(const CountMatrix& counts, std::span<const double> t) {
  const std::size_t replicates = counts.replicates();
  const std::size_t n = counts.observations();
  const double centre = static_cast<double>(counts.resample_size()) / static_cast<double>(n);
  const double tbar = mean_of(t);
  std::vector<double> cov(n, 0.0);
  for (std::size_t b = 0; b < replicates; ++b) {
    const double dt = t[b] - tbar;
    const auto row = counts.row(b);
    for (std::size_t i = 0; i < n; ++i) cov[i] += (static_cast<double>(row[i]) - centre) * dt;
  }
  for (double& c : cov) c /= static_cast<double>(replicates);
  return cov;
}

Vector column_of(const ResampleTrace& trace, std::size_t query) {
  if (query >= trace.queries()) {
    throw DataError("query index " + std::to_string(query) + " out of range");
  }
  return trace.column(query);
}

std::span<const double> as_span(const Vector& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

}  // namespace

double bootstrap_base_variance(std::span<const double> predictions) {
  require_replicates(predictions.size());
  const double tbar = mean_of(predictions);
  double ss = 0.0;
  for (double t : predictions) ss += (t - tbar) * (t - tbar);
  return ss / static_cast<double>(predictions.size());
}

double bootstrap_base_variance(const ResampleTrace& trace, std::size_t query) {
  const Vector t = column_of(trace, query);
  return bootstrap_base_variance(as_span(t));
}

VarianceEstimate ij_variance(const CountMatrix& counts, std::span<const double> predictions) {
  require_shape(counts, predictions);
  std::vector<double> cov = ij_covariances(counts, predictions);
  double total = 0.0;
  for (double c : cov) total += c * c;
  return make_estimate(Method::ij, total, std::move(cov));
}

VarianceEstimate jackknife_variance(const CountMatrix& counts, std::span<const double> predictions) {
  require_shape(counts, predictions);
  const std::size_t replicates = counts.replicates();
  const std::size_t n = counts.observations();
  const double tbar = mean_of(predictions);
  std::vector<double> out_sum(n, 0.0);
  std::vector<std::size_t> out_count(n, 0);
  for (std::size_t b = 0; b < replicates; ++b) {
    const auto row = counts.row(b);
    const double dt = predictions[b] - tbar;
    for (std::size_t i = 0; i < n; ++i) {
      if (row[i] == 0) {
        out_sum[i] += dt;
        ++out_count[i];
      }
    }
  }
  std::vector<double> delta(n, 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (out_count[i] == 0 || out_count[i] == replicates) continue;
    delta[i] = out_sum[i] / static_cast<double>(out_count[i]);
    total += delta[i] * delta[i];
  }
  const double nd = static_cast<double>(n);
  return make_estimate(Method::jackknife, (nd - 1.0) / nd * total, std::move(delta));
}

VarianceEstimate ij_unbiased(const CountMatrix& counts, std::span<const double> predictions) {
  VarianceEstimate base = ij_variance(counts, predictions);
  const double v_hat = bootstrap_base_variance(predictions);
  const double correction = static_cast<double>(counts.resample_size()) * v_hat /
                            static_cast<double>(counts.replicates());
  return make_estimate(Method::ij_unbiased, base.raw_value - correction, std::move(base.components));
}

VarianceEstimate jackknife_unbiased(const CountMatrix& counts, std::span<const double> predictions) {
  VarianceEstimate base = jackknife_variance(counts, predictions);
  const double v_hat = bootstrap_base_variance(predictions);
  const double correction = jackknife_mc_factor() * static_cast<double>(counts.observations()) *
                            v_hat / static_cast<double>(counts.replicates());
  return make_estimate(Method::jackknife_unbiased, base.raw_value - correction,
                       std::move(base.components));
}

VarianceEstimate ij_variance(const ResampleTrace& trace, std::size_t query) {
  const Vector t = column_of(trace, query);
  return ij_variance(trace.counts, as_span(t));
}

VarianceEstimate jackknife_variance(const ResampleTrace& trace, std::size_t query) {
  const Vector t = column_of(trace, query);
  return jackknife_variance(trace.counts, as_span(t));
}

VarianceEstimate ij_unbiased(const ResampleTrace& trace, std::size_t query) {
  const Vector t = column_of(trace, query);
  return ij_unbiased(trace.counts, as_span(t));
}

VarianceEstimate jackknife_unbiased(const ResampleTrace& trace, std::size_t query) {
  const Vector t = column_of(trace, query);
  return jackknife_unbiased(trace.counts, as_span(t));
}

VarianceEstimate averaged_estimator(const VarianceEstimate& ij_type, const VarianceEstimate& j_type) {
  const bool corrected = ij_type.method == Method::ij_unbiased && j_type.method == Method::jackknife_unbiased;
  const bool plain = ij_type.method == Method::ij && j_type.method == Method::jackknife;
  if (!corrected && !plain) {
    const bool swapped_corrected =
        ij_type.method == Method::jackknife_unbiased && j_type.method == Method::ij_unbiased;
    const bool swapped_plain = ij_type.method == Method::jackknife && j_type.method == Method::ij;
    if (swapped_corrected || swapped_plain) return averaged_estimator(j_type, ij_type);
    throw DataError("averaged estimator: cannot average " + std::string(to_string(ij_type.method)) +
                    " with " + std::string(to_string(j_type.method)));
  }
  if (ij_type.components.size() != j_type.components.size()) {
    throw DataError("averaged estimator: inputs come from different traces");
  }
  const std::size_t n = ij_type.components.size();
  const double jack_scale = n > 0 ? (static_cast<double>(n) - 1.0) / static_cast<double>(n) : 0.0;
  std::vector<double> components(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double c = ij_type.components[i];
    const double d = j_type.components[i];
    components[i] = 0.5 * (c * c + jack_scale * d * d);
  }
  return make_estimate(Method::averaged, 0.5 * (ij_type.raw_value + j_type.raw_value),
                       std::move(components));
}

VarianceEstimate estimate(Method method, const ResampleTrace& trace, std::size_t query) {
  switch (method) {
    case Method::ij:
      return ij_variance(trace, query);
    case Method::jackknife:
      return jackknife_variance(trace, query);
    case Method::ij_unbiased:
      return ij_unbiased(trace, query);
    case Method::jackknife_unbiased:
      return jackknife_unbiased(trace, query);
    case Method::averaged:
      return averaged_estimator(ij_unbiased(trace, query), jackknife_unbiased(trace, query));
  }
  throw ConfigError("unsupported estimator");
}

MCErrorPrediction predict_mc_moments(McEstimator estimator, std::size_t n, std::size_t replicates,
                                     std::size_t m_sub, double v_hat, double v_ref) {
  if (n == 0) throw ConfigError("mc moments: n must be at least 1");
  if (replicates == 0) throw ConfigError("mc moments: B must be at least 1");
  if (!(v_hat >= 0.0) || !(v_ref >= 0.0)) {
    throw ConfigError("mc moments: variances must be non-negative");
  }
  const std::size_t m = m_sub == 0 ? n : m_sub;
  const double nd = static_cast<double>(n);
  const double md = static_cast<double>(m);
  const double bd = static_cast<double>(replicates);

  MCErrorPrediction out;
  out.estimator = estimator;
  out.n = n;
  out.replicates = replicates;
  out.m_sub = m;
  out.v_hat = v_hat;
  out.v_ref = v_ref;
  if (estimator == McEstimator::ij) {
    out.bias = md * v_hat / bd;
    out.variance = 2.0 * md * md * v_hat * v_hat / (nd * bd * bd) + 4.0 * md * v_ref * v_hat / (nd * bd);
  } else {
    const double f = jackknife_mc_factor();
    out.bias = f * nd * v_hat / bd;
    out.variance = 2.0 * f * f * nd * v_hat * v_hat / (bd * bd) + 4.0 * f * v_ref * v_hat / bd;
  }
  return out;
}

VarOfVarEstimate var_of_var(const ResampleTrace& trace, std::size_t query) {
  const Vector t = column_of(trace, query);
  require_shape(trace.counts, as_span(t));
  VarOfVarEstimate out;
  out.c_star = ij_covariances(trace.counts, as_span(t));
  double mean_sq = 0.0;
  for (double c : out.c_star) mean_sq += c * c;
  mean_sq /= static_cast<double>(out.c_star.size());
  for (double c : out.c_star) {
    const double d = c * c - mean_sq;
    out.value += d * d;
  }
  return out;
}

DecompositionEstimate tree_decomposition(const ResampleTrace& trace, std::size_t query,
                                         const VarianceEstimate& variance_estimate) {
  DecompositionEstimate out;
  out.v_hat = bootstrap_base_variance(trace, query);
  if (!(out.v_hat > 0.0)) {
    throw EstimationError("tree correlation undefined: bootstrap variance is zero");
  }
  out.rho_hat = variance_estimate.value / out.v_hat;
  return out;
}

JackknifeDiagnostics jackknife_diagnostics(const ResampleTrace& trace, std::size_t query) {
  const Vector t = column_of(trace, query);
  require_shape(trace.counts, as_span(t));
  const std::size_t n = trace.observations();
  JackknifeDiagnostics out;
  out.v_hat = bootstrap_base_variance(as_span(t));
  out.v_out.assign(n, std::numeric_limits<double>::quiet_NaN());
  out.v_in.assign(n, std::numeric_limits<double>::quiet_NaN());
  for (std::size_t i = 0; i < n; ++i) {
    double sum[2] = {0.0, 0.0};
    double sum_sq[2] = {0.0, 0.0};
    std::size_t count[2] = {0, 0};
    for (std::size_t b = 0; b < trace.replicates(); ++b) {
      const int group = trace.counts(b, i) == 0 ? 0 : 1;
      sum[group] += t(static_cast<Eigen::Index>(b));
      ++count[group];
    }
    double mean[2] = {0.0, 0.0};
    for (int g = 0; g < 2; ++g) {
      if (count[g] > 0) mean[g] = sum[g] / static_cast<double>(count[g]);
    }
    for (std::size_t b = 0; b < trace.replicates(); ++b) {
      const int group = trace.counts(b, i) == 0 ? 0 : 1;
      const double d = t(static_cast<Eigen::Index>(b)) - mean[group];
      sum_sq[group] += d * d;
    }
    if (count[0] > 0) out.v_out[i] = sum_sq[0] / static_cast<double>(count[0]);
    if (count[1] > 0) out.v_in[i] = sum_sq[1] / static_cast<double>(count[1]);
  }
  return out;
}

const Vector& TraceEstimates::raw(Method method) const {
  switch (method) {
    case Method::ij:
      return ij;
    case Method::jackknife:
      return jackknife;
    case Method::ij_unbiased:
      return ij_unbiased;
    case Method::jackknife_unbiased:
      return jackknife_unbiased;
    case Method::averaged:
      return averaged;
  }
  throw ConfigError("unsupported estimator");
}

TraceEstimates estimate_all(const ResampleTrace& trace) {
  trace.validate();
  const std::size_t replicates = trace.replicates();
  require_replicates(replicates);
  const auto n = static_cast<Eigen::Index>(trace.observations());
  const double bd = static_cast<double>(replicates);
  const double nd = static_cast<double>(n);

  const Eigen::RowVectorXd tbar = trace.predictions.colwise().mean();
  const Matrix centred = trace.predictions.rowwise() - tbar;

  // sum_b centred = 0, so the m/n offset in Cov_i drops out of the product
  const Matrix counts = trace.counts.array().cast<double>();
  const Matrix cov = counts.transpose() * centred / bd;  // n x q

  const Matrix out_mask = (trace.counts.array().array() == 0).cast<double>();
  const Vector out_count = out_mask.colwise().sum().transpose();
  Matrix delta = out_mask.transpose() * centred;  // n x q
  for (Eigen::Index i = 0; i < n; ++i) {
    const double c = out_count(i);
    if (c == 0.0 || c == bd) {
      delta.row(i).setZero();
    } else {
      delta.row(i) /= c;
    }
  }

  TraceEstimates out;
  out.v_hat = centred.array().square().colwise().sum().transpose() / bd;
  out.ij = cov.array().square().colwise().sum().transpose();
  out.jackknife = (nd - 1.0) / nd * delta.array().square().colwise().sum().transpose();
  out.ij_unbiased = out.ij - static_cast<double>(trace.resample_size()) / bd * out.v_hat;
  out.jackknife_unbiased = out.jackknife - jackknife_mc_factor() * nd / bd * out.v_hat;
  out.averaged = 0.5 * (out.ij_unbiased + out.jackknife_unbiased);
  return out;
}

}  // namespace bagvar
