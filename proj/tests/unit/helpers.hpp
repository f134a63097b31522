#pragma once

#include "bagvar/bagging.hpp"
#include "bagvar/bootstrap.hpp"
#include "bagvar/dataset.hpp"

#include <random>
#include <vector>

namespace testing {

inline bagvar::Dataset column_data(const std::vector<double>& x, const std::vector<double>& y) {
  bagvar::Matrix xm(static_cast<Eigen::Index>(x.size()), 1);
  bagvar::Vector yv(static_cast<Eigen::Index>(y.size()));
  for (std::size_t i = 0; i < x.size(); ++i) xm(static_cast<Eigen::Index>(i), 0) = x[i];
  for (std::size_t i = 0; i < y.size(); ++i) yv(static_cast<Eigen::Index>(i)) = y[i];
  return bagvar::Dataset(xm, yv);
}

inline bagvar::Dataset responses_only(const std::vector<double>& y) {
  std::vector<double> x(y.size());
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = static_cast<double>(i);
  return column_data(x, y);
}

inline bagvar::Dataset normal_data(std::size_t n, std::size_t p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z;
  std::uniform_real_distribution<double> u;
  bagvar::Matrix x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
  bagvar::Vector y(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) x(i, j) = u(rng);
    y(i) = x(i, 0) + z(rng);
  }
  return bagvar::Dataset(x, y);
}

inline bagvar::CountMatrix counts_from(const std::vector<std::vector<int>>& rows, std::size_t m = 0) {
  bagvar::CountArray a(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows[0].size()));
  for (std::size_t b = 0; b < rows.size(); ++b) {
    for (std::size_t i = 0; i < rows[b].size(); ++i) a(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(i)) = rows[b][i];
  }
  return bagvar::CountMatrix(a, m == 0 ? rows[0].size() : m);
}

inline bagvar::ResampleTrace trace_from(const std::vector<std::vector<int>>& counts, const std::vector<double>& t,
                                        std::size_t m = 0) {
  bagvar::ResampleTrace trace;
  trace.counts = counts_from(counts, m);
  trace.predictions = bagvar::Matrix(static_cast<Eigen::Index>(t.size()), 1);
  for (std::size_t b = 0; b < t.size(); ++b) trace.predictions(static_cast<Eigen::Index>(b), 0) = t[b];
  return trace;
}

inline bagvar::ResamplePlan plan(std::size_t n, std::size_t b, std::uint64_t seed, std::size_t m_sub = 0) {
  bagvar::ResamplePlan p;
  p.n = n;
  p.replicates = b;
  p.m_sub = m_sub;
  p.seed = seed;
  return p;
}

/// Random trace with valid multinomial counts and Gaussian predictions.
inline bagvar::ResampleTrace random_trace(std::size_t n, std::size_t b, std::size_t q, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z;
  bagvar::CountArray a = bagvar::CountArray::Zero(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(n));
  for (Eigen::Index r = 0; r < a.rows(); ++r) {
    for (std::size_t k = 0; k < n; ++k) ++a(r, static_cast<Eigen::Index>(rng() % n));
  }
  bagvar::ResampleTrace trace;
  trace.counts = bagvar::CountMatrix(a, n);
  trace.predictions = bagvar::Matrix(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(q));
  for (Eigen::Index r = 0; r < trace.predictions.rows(); ++r) {
    for (Eigen::Index k = 0; k < trace.predictions.cols(); ++k) trace.predictions(r, k) = z(rng);
  }
  return trace;
}

}  // namespace testing
