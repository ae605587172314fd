#pragma once

// Exact stationary quantities of the finite-N Moran model and of the line-counting process of
// its pruned lookdown ancestral selection graph (pLD-ASG).
//
// Index conventions (all vectors are indexed by the natural index of the quantity):
//   pi[k], k = 0..N        stationary law of the number Y of type-1 individuals
//   a[n],  n = 0..N        tail probabilities P(L > n), a[0] = 1, a[N] = 0
//   b[n],  n = 0..N+1      sampling probabilities E[Y^(n)/N^(n)], b[0] = 1, b[N+1] = 0
//   w[n],  n = 0..N        stationary law of L, w[n] = a[n-1] - a[n], w[0] = 0 (unused)

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "ancline/errors.hpp"
#include "ancline/numerics.hpp"
#include "ancline/params.hpp"

namespace ancline {

inline auto moran_up_rate(const Finite_params& p, std::int64_t k) -> double {
  auto N = static_cast<double>(p.N);
  auto kd = static_cast<double>(k);
  return kd * (N - kd) / N + p.u * p.nu1 * (N - kd);
}

inline auto moran_down_rate(const Finite_params& p, std::int64_t k) -> double {
  auto N = static_cast<double>(p.N);
  auto kd = static_cast<double>(k);
  return (1.0 + p.s) * (N - kd) * kd / N + p.u * p.nu0 * kd;
}

// Reversible stationary law of the birth-death chain Y^N, from detailed balance in log space.
inline auto moran_stationary(const Finite_params& p) -> std::vector<double> {
  validate(p);
  auto log_w = std::vector<double>(static_cast<std::size_t>(p.N + 1), 0.0);
  for (auto k = std::int64_t{1}; k <= p.N; ++k) {
    log_w[k] = log_w[k - 1] + std::log(moran_up_rate(p, k - 1)) - std::log(moran_down_rate(p, k));
  }
  return normalize_log_weights(log_w);
}

// Rates of the pLD-ASG line-counting process L^N out of state n.
struct Line_counting_rates {
  double up;        // n -> n+1
  double down_one;  // n -> n-1
  double jump_each; // n -> j for each j in [1, n-2]
};

inline auto line_counting_rates(const Finite_params& p, std::int64_t n) -> Line_counting_rates {
  auto N = static_cast<double>(p.N);
  auto nd = static_cast<double>(n);
  return {
      p.s * nd * (N - nd) / N,
      nd * (nd - 1.0) / N + p.u * p.nu1 * (nd - 1.0) + (n > 1 ? p.u * p.nu0 : 0.0),
      p.u * p.nu0,
  };
}

// System for a[1..N-1] of the tail recursion
//   ((n+1)/N + s(N-n)/N + u) a_n = ((n+1)/N + u nu1) a_{n+1} + s(N-n)/N a_{n-1}
inline auto tail_system(const Finite_params& p) -> Tridiagonal_system {
  auto N = static_cast<double>(p.N);
  auto m = static_cast<std::size_t>(p.N - 1);
  auto sys = Tridiagonal_system{};
  sys.diag.resize(m);
  sys.rhs.assign(m, 0.0);
  sys.sub.resize(m > 0 ? m - 1 : 0);
  sys.sup.resize(m > 0 ? m - 1 : 0);
  for (auto i = std::size_t{0}; i < m; ++i) {
    auto n = static_cast<double>(i + 1);
    auto branch = p.s * (N - n) / N;
    sys.diag[i] = (n + 1.0) / N + branch + p.u;
    if (i + 1 < m) { sys.sup[i] = -((n + 1.0) / N + p.u * p.nu1); }
    if (i > 0) { sys.sub[i - 1] = -branch; }
  }
  if (m > 0) { sys.rhs[0] = p.s * (N - 1.0) / N; }  // a_0 = 1
  return sys;
}

inline auto tail_probs(const Finite_params& p) -> std::vector<double> {
  validate(p);
  auto a = std::vector<double>(static_cast<std::size_t>(p.N + 1), 0.0);
  a[0] = 1.0;
  auto inner = solve_tridiagonal(tail_system(p));
  std::ranges::copy(inner, a.begin() + 1);
  return a;
}

// System for b[1..N] of the sampling recursion
//   ((n-1)/N + s(N-n)/N + u) b_n = ((n-1)/N + u nu1) b_{n-1} + s(N-n)/N b_{n+1}
inline auto sampling_system(const Finite_params& p) -> Tridiagonal_system {
  auto N = static_cast<double>(p.N);
  auto m = static_cast<std::size_t>(p.N);
  auto sys = Tridiagonal_system{};
  sys.diag.resize(m);
  sys.rhs.assign(m, 0.0);
  sys.sub.resize(m - 1);
  sys.sup.resize(m - 1);
  for (auto i = std::size_t{0}; i < m; ++i) {
    auto n = static_cast<double>(i + 1);
    auto branch = p.s * (N - n) / N;
    sys.diag[i] = (n - 1.0) / N + branch + p.u;
    if (i + 1 < m) { sys.sup[i] = -branch; }
    if (i > 0) { sys.sub[i - 1] = -((n - 1.0) / N + p.u * p.nu1); }
  }
  sys.rhs[0] = p.u * p.nu1;  // b_0 = 1
  return sys;
}

enum class Sampling_method { recursion, moments };

inline constexpr std::int64_t k_default_moments_cap = 5000;

// b_n = sum_k pi_k k^(n)/N^(n).  O(N^2); a cross-check for the recursion route.
inline auto sampling_probs_from_moments(std::int64_t N, std::span<const double> pi)
    -> std::vector<double> {
  auto Nu = static_cast<std::size_t>(N);
  auto b = std::vector<double>(Nu + 2, 0.0);
  auto ratio = std::vector<double>(Nu + 1, 1.0);  // k^(n)/N^(n) for the current n
  b[0] = 1.0;
  for (auto n = std::size_t{1}; n <= Nu; ++n) {
    auto denom = static_cast<double>(Nu - n + 1);
    auto sum = 0.0;
    for (auto k = std::size_t{0}; k <= Nu; ++k) {
      ratio[k] = k + 1 >= n ? ratio[k] * static_cast<double>(k + 1 - n) / denom : 0.0;
      sum += pi[k] * ratio[k];
    }
    b[n] = sum;
  }
  return b;
}

inline auto sampling_probs(const Finite_params& p, Sampling_method method = Sampling_method::recursion,
                           std::int64_t moments_cap = k_default_moments_cap) -> std::vector<double> {
  validate(p);
  if (method == Sampling_method::moments) {
    if (p.N > moments_cap) {
      throw Invalid_parameter{"moments route is capped at N <= " + std::to_string(moments_cap)};
    }
    return sampling_probs_from_moments(p.N, moran_stationary(p));
  }
  auto b = std::vector<double>(static_cast<std::size_t>(p.N + 2), 0.0);
  b[0] = 1.0;
  auto inner = solve_tridiagonal(sampling_system(p));
  std::ranges::copy(inner, b.begin() + 1);
  return b;
}

// Complementary tails c[n] = 1 - a[n] = P(L <= n), n = 0..N, from the same system with
// right-hand side u nu0 and c_N = 1.  Accurate where a is close to one.
inline auto tail_complements(const Finite_params& p) -> std::vector<double> {
  validate(p);
  auto c = std::vector<double>(static_cast<std::size_t>(p.N + 1), 0.0);
  c[p.N] = 1.0;
  auto sys = tail_system(p);
  std::ranges::fill(sys.rhs, p.u * p.nu0);
  if (!sys.rhs.empty()) { sys.rhs.back() += 1.0 + p.u * p.nu1; }
  auto inner = solve_tridiagonal(sys);
  std::ranges::copy(inner, c.begin() + 1);
  return c;
}

struct Finite_solution {
  Finite_params params;
  std::vector<double> pi;
  std::vector<double> a;
  std::vector<double> b;
  std::vector<double> w;

  auto N() const -> std::int64_t { return params.N; }
  // b_{n-1} - b_n: probability that the lowest type-0 line among the first n is line n
  auto delta(std::int64_t n) const -> double { return b[n - 1] - b[n]; }
};

inline auto solve_finite(const Finite_params& p) -> Finite_solution {
  auto sol = Finite_solution{p, moran_stationary(p), tail_probs(p), sampling_probs(p), {}};
  auto c = tail_complements(p);
  sol.w.assign(sol.a.size(), 0.0);
  for (auto n = std::size_t{1}; n < sol.a.size(); ++n) {
    sol.w[n] = c[n] <= sol.a[n] ? c[n] - c[n - 1] : sol.a[n - 1] - sol.a[n];
  }
  return sol;
}

struct Ancestral_type_probs {
  double p1;  // P(A = 1)
  double p0;  // P(A = 0)
};

inline auto ancestral_type_probs(const Finite_solution& sol) -> Ancestral_type_probs {
  auto p1 = 0.0;
  auto p0 = 0.0;
  for (auto n = std::int64_t{1}; n <= sol.N(); ++n) {
    p1 += sol.w[n] * sol.b[n];
    p0 += sol.a[n - 1] * sol.delta(n);
  }
  return {p1, p0};
}

struct Ancestral_summary {
  double p1 = 0.0;
  double p0 = 0.0;
  std::vector<double> gamma;      // P(A = 1 | Y = k), k = 0..N
  std::vector<double> per_type1;  // gamma_k / k; NaN at k = 0
  std::vector<double> per_type0;  // (1 - gamma_k) / (N - k); NaN at k = N
};

// Conditional ancestral-type probabilities given the present composition.  Terms with
// a[n-1] == 0 contribute nothing, so the n-loop stops at the support of L.
inline auto ancestral_type_distribution(const Finite_solution& sol) -> Ancestral_summary {
  auto N = sol.N();
  auto Nu = static_cast<std::size_t>(N);
  auto [p1, p0] = ancestral_type_probs(sol);
  auto out = Ancestral_summary{p1, p0, std::vector<double>(Nu + 1, 0.0),
                               std::vector<double>(Nu + 1, std::numeric_limits<double>::quiet_NaN()),
                               std::vector<double>(Nu + 1, std::numeric_limits<double>::quiet_NaN())};
  auto n_max = std::int64_t{1};
  while (n_max < N && sol.a[n_max] > 0.0) { ++n_max; }

  for (auto k = std::int64_t{0}; k <= N; ++k) {
    auto r = 1.0;   // k^(n-1) / N^(n-1)
    auto r1 = 1.0;  // (k-1)^(n-1) / N^(n-1)
    auto gamma = 0.0;
    auto type1 = 0.0;
    auto type0 = 0.0;
    for (auto n = std::int64_t{1}; n <= n_max; ++n) {
      auto Nn = static_cast<double>(N - n + 1);
      auto base = r / Nn;
      type0 += sol.a[n - 1] * base;
      if (k >= 1) { type1 += sol.w[n] * r1 / Nn; }
      r *= static_cast<double>(k - n + 1) / Nn;
      if (k >= 1) { r1 *= static_cast<double>(k - n) / Nn; }
      gamma += sol.w[n] * r;
      if (r == 0.0 && r1 == 0.0 && base == 0.0) { break; }
    }
    out.gamma[k] = gamma;
    if (k >= 1) { out.per_type1[k] = type1; }
    if (k < N) { out.per_type0[k] = type0; }
  }
  return out;
}

// Rates of the joint process (L, A) (lines of the time-reversed pLD-ASG, ancestral type) for
// transitions carrying a mutation on the ancestral line.
class Joint_line_type_rates {
 public:
  explicit Joint_line_type_rates(const Finite_solution& sol) : sol_{&sol} {
    prefix_delta_.assign(static_cast<std::size_t>(sol.N() + 1), 0.0);
    for (auto j = std::int64_t{1}; j <= sol.N(); ++j) {
      prefix_delta_[j] = prefix_delta_[j - 1] + sol.delta(j);
    }
  }

  // (l, 1) -> (l + k, 0)
  auto beneficial(std::int64_t l, std::int64_t k) const -> double {
    check_level(l);
    if (k < 0 || l + k > sol_->N()) {
      throw Invalid_parameter{"beneficial jump target out of range"};
    }
    const auto& p = sol_->params;
    return p.u * p.nu0 * sol_->w[l + k] / sol_->w[l];
  }

  // (l, 0) -> (l, 1)
  auto deleterious(std::int64_t l) const -> double {
    check_level(l);
    const auto& p = sol_->params;
    return p.u * p.nu1 * sol_->delta(l) / prefix_delta_[l];
  }

  // P(L = l, A = 1) and P(L = l, A = 0)
  auto weight_type1(std::int64_t l) const -> double { return sol_->w[l] * sol_->b[l]; }
  auto weight_type0(std::int64_t l) const -> double { return sol_->w[l] * prefix_delta_[l]; }

 private:
  auto check_level(std::int64_t l) const -> void {
    if (l < 1 || l > sol_->N()) {
      throw Invalid_parameter{"level out of range: " + std::to_string(l)};
    }
    if (sol_->w[l] == 0.0) {
      throw Undefined_conditional{"P(L = " + std::to_string(l) + ") is zero; conditional rate undefined"};
    }
  }

  const Finite_solution* sol_;
  std::vector<double> prefix_delta_;
};

inline auto joint_line_type_rates(const Finite_solution& sol) -> Joint_line_type_rates {
  return Joint_line_type_rates{sol};
}

struct Mutation_fluxes {
  double f10 = 0.0;
  double f01 = 0.0;
  std::vector<double> per_level10;  // index n = 1..N, [0] unused
  std::vector<double> per_level01;
};

inline auto mutation_fluxes(const Finite_solution& sol) -> Mutation_fluxes {
  const auto& p = sol.params;
  auto out = Mutation_fluxes{0.0, 0.0, std::vector<double>(sol.a.size(), 0.0),
                             std::vector<double>(sol.a.size(), 0.0)};
  for (auto n = std::int64_t{1}; n <= sol.N(); ++n) {
    out.per_level10[n] = p.u * p.nu0 * sol.a[n - 1] * sol.b[n];
    out.per_level01[n] = p.u * p.nu1 * sol.w[n] * sol.delta(n);
    out.f10 += out.per_level10[n];
    out.f01 += out.per_level01[n];
  }
  return out;
}

struct Mutation_rates {
  double q10 = 0.0;
  double q01 = 0.0;
};

inline auto mutation_rates(const Finite_solution& sol) -> Mutation_rates {
  auto fluxes = mutation_fluxes(sol);
  auto [p1, p0] = ancestral_type_probs(sol);
  if (!(p1 > 0.0) || !(p0 > 0.0)) {
    throw Degenerate_denominator{"ancestral type probability is zero"};
  }
  return {fluxes.f10 / p1, fluxes.f01 / p0};
}

// Per-level flux identity
//   f10(n) + (1/N) sum_{i>n} w_i d_i = f01(n) + ((n-1)/N) w_n d_n,   d_i = b_{i-1} - b_i.
// Returns lhs - rhs for n = 1..N (index 0 unused).
inline auto flux_identity_residuals(const Finite_solution& sol) -> std::vector<double> {
  auto fluxes = mutation_fluxes(sol);
  auto N = sol.N();
  auto Nd = static_cast<double>(N);
  auto residual = std::vector<double>(sol.a.size(), 0.0);
  auto tail = 0.0;  // sum_{i>n} w_i d_i
  for (auto n = N; n >= 1; --n) {
    auto wd = sol.w[n] * sol.delta(n);
    residual[n] = fluxes.per_level10[n] + tail / Nd - fluxes.per_level01[n] -
                  static_cast<double>(n - 1) / Nd * wd;
    tail += wd;
  }
  return residual;
}

struct Flux_report {
  double f10 = 0.0;
  double f01 = 0.0;
  double q10 = 0.0;
  double q01 = 0.0;
  std::vector<double> per_level10;
  std::vector<double> per_level01;
  std::vector<double> identity_residual;
};

inline auto flux_report(const Finite_solution& sol) -> Flux_report {
  auto fluxes = mutation_fluxes(sol);
  auto rates = mutation_rates(sol);
  return {fluxes.f10, fluxes.f01, rates.q10, rates.q01, std::move(fluxes.per_level10),
          std::move(fluxes.per_level01), flux_identity_residuals(sol)};
}

}  // namespace ancline
