#pragma once

// Small generators and reference helpers shared by the test executables.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "bcgnn/param_store.hpp"
#include "bcgnn/random.hpp"
#include "bcgnn/tensor.hpp"

namespace testing {

using Rng = std::mt19937_64;

inline std::vector<double> random_values(Rng& rng, std::size_t n, double lo = -1.0, double hi = 1.0) {
  std::vector<double> v(n);
  for (auto& x : v) x = bcgnn::uniform(rng, lo, hi);
  return v;
}

inline bcgnn::Tensor random_tensor(Rng& rng, bcgnn::Shape shape, double lo = -1.0, double hi = 1.0,
                                   bool requires_grad = false) {
  const std::size_t n = bcgnn::shape_numel(shape);
  return bcgnn::Tensor(std::move(shape), random_values(rng, n, lo, hi), requires_grad);
}

inline std::size_t random_size(Rng& rng, std::size_t lo, std::size_t hi) {
  return static_cast<std::size_t>(
      bcgnn::uniform_int(rng, static_cast<std::int64_t>(lo), static_cast<std::int64_t>(hi)));
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return INFINITY;
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline std::vector<double> to_vector(const bcgnn::Tensor& t) {
  return {t.values().begin(), t.values().end()};
}

// Row-major [rows x cols] view helpers for reference loops.
struct Mat {
  std::size_t rows = 0, cols = 0;
  std::vector<double> v;
  double& operator()(std::size_t r, std::size_t c) { return v[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return v[r * cols + c]; }
};

inline Mat mat_of(const bcgnn::Tensor& t) { return {t.dim(0), t.dim(1), to_vector(t)}; }

}  // namespace testing
