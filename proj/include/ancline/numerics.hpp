#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "ancline/errors.hpp"

namespace ancline {

// A x = rhs with A tridiagonal.  sub[i] = A(i+1, i), sup[i] = A(i, i+1).
struct Tridiagonal_system {
  std::vector<double> sub;
  std::vector<double> diag;
  std::vector<double> sup;
  std::vector<double> rhs;

  auto size() const -> std::size_t { return diag.size(); }

  // A x, for residual checks
  auto apply(std::span<const double> x) const -> std::vector<double> {
    auto n = diag.size();
    auto y = std::vector<double>(n, 0.0);
    for (auto i = std::size_t{0}; i < n; ++i) {
      y[i] = diag[i] * x[i];
      if (i > 0) { y[i] += sub[i - 1] * x[i - 1]; }
      if (i + 1 < n) { y[i] += sup[i] * x[i + 1]; }
    }
    return y;
  }
};

// Thomas algorithm.  No pivoting: the systems built in this library are diagonally dominant.
inline auto solve_tridiagonal(const Tridiagonal_system& sys) -> std::vector<double> {
  auto n = sys.diag.size();
  if (n == 0) { return {}; }
  if (sys.rhs.size() != n || sys.sub.size() + 1 != n || sys.sup.size() + 1 != n) {
    throw Singular_system{"inconsistent band lengths"};
  }

  auto c = std::vector<double>(n, 0.0);  // modified super-diagonal
  auto d = std::vector<double>(n, 0.0);  // modified rhs
  auto pivot = sys.diag[0];
  if (pivot == 0.0 || !std::isfinite(pivot)) {
    throw Singular_system{"zero pivot at row 0"};
  }
  if (n > 1) { c[0] = sys.sup[0] / pivot; }
  d[0] = sys.rhs[0] / pivot;
  for (auto i = std::size_t{1}; i < n; ++i) {
    pivot = sys.diag[i] - sys.sub[i - 1] * c[i - 1];
    if (pivot == 0.0 || !std::isfinite(pivot)) {
      throw Singular_system{"zero pivot at row " + std::to_string(i)};
    }
    if (i + 1 < n) { c[i] = sys.sup[i] / pivot; }
    d[i] = (sys.rhs[i] - sys.sub[i - 1] * d[i - 1]) / pivot;
  }

  auto x = std::vector<double>(n, 0.0);
  x[n - 1] = d[n - 1];
  for (auto i = n - 1; i-- > 0;) {
    x[i] = d[i] - c[i] * x[i + 1];
  }
  return x;
}

// k^(n falling) / N^(n falling) = prod_{i<n} (k-i)/(N-i), accumulated in log space.
inline auto falling_factorial_ratio(std::int64_t k, std::int64_t n, std::int64_t N) -> double {
  if (n == 0) { return 1.0; }
  if (n > k) { return 0.0; }
  auto log_ratio = 0.0;
  for (auto i = std::int64_t{0}; i < n; ++i) {
    log_ratio += std::log(static_cast<double>(k - i)) - std::log(static_cast<double>(N - i));
  }
  return std::exp(log_ratio);
}

// Normalizes exp(log_weights) to a probability vector without overflow.
inline auto normalize_log_weights(std::span<const double> log_weights) -> std::vector<double> {
  auto max_log = *std::ranges::max_element(log_weights);
  auto out = std::vector<double>(log_weights.size());
  auto total = 0.0;
  for (auto i = std::size_t{0}; i < log_weights.size(); ++i) {
    out[i] = std::exp(log_weights[i] - max_log);
    total += out[i];
  }
  for (auto& x : out) { x /= total; }
  return out;
}

// Truncation control for boundary-value recursions on an infinite index set.  A truncated solve
// of size M sets x_{M+1} = 0; M doubles until the head value x_1 is stable.
struct Truncation_policy {
  std::size_t initial = 128;
  std::size_t cap = std::size_t{1} << 20;
  double tol = 1e-12;
};

struct Truncated_sequence {
  std::vector<double> values;  // indices 0..M, taken from a solve of size 2M
  std::size_t M = 0;
  double change = 0.0;         // movement of x_1 at the last doubling
};

// solve(M) returns x_0..x_{M+1}.  On acceptance the coarse index range 0..M is returned from the
// finer solve, so entries near the artificial boundary are never exposed.  accept(fine, M) may
// impose further conditions on the finer solve.
inline auto solve_with_doubling(
    const std::function<std::vector<double>(std::size_t)>& solve, const Truncation_policy& policy,
    const std::function<bool(const std::vector<double>&, std::size_t)>& accept, const char* what)
    -> Truncated_sequence {
  auto M = policy.initial;
  auto coarse = solve(M);
  while (true) {
    if (2 * M > policy.cap) {
      throw No_convergence{std::string{what} + ": truncation index exceeded cap " +
                           std::to_string(policy.cap)};
    }
    auto fine = solve(2 * M);
    auto change = std::abs(fine[1] - coarse[1]);
    if (change < policy.tol && accept(fine, M)) {
      fine.resize(M + 1);
      return {std::move(fine), M, change};
    }
    coarse = std::move(fine);
    M *= 2;
  }
}

}  // namespace ancline
