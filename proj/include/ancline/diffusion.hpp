#pragma once

// Diffusion limit: Wright's stationary distribution and its moments beta_n, the tail
// probabilities alpha_n of the limiting line-counting process, ancestral mutation fluxes and
// rates, and their derivatives in the selection strength sigma.
//
// beta_n  = E[Y^n] under Wright's density
//           pi(x) ~ x^(theta nu1 - 1) (1-x)^(theta nu0 - 1) exp(-sigma x)
// alpha_n = P(L > n), omega_n = alpha_{n-1} - alpha_n, delta_n = beta_{n-1} - beta_n.
//
// Both sequences solve second-order recursions whose wanted solution is the minimal one, so the
// truncated boundary-value solves converge from the head regardless of how slowly beta decays.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "ancline/errors.hpp"
#include "ancline/finite.hpp"
#include "ancline/numerics.hpp"
#include "ancline/params.hpp"

namespace ancline {

inline constexpr double k_quadrature_abs_tol = 1e-10;

// ---------------------------------------------------------------------------------------------
// Wright moments by quadrature

namespace detail {

template <typename F>
auto integrate_gk(F f, double upper) -> double {
  auto error = 0.0;
  auto value = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, upper, 20, 1e-12,
                                                                             &error);
  if (!std::isfinite(value) || error > k_quadrature_abs_tol * std::max(1.0, std::abs(value))) {
    throw Quadrature_failure{"error estimate " + std::to_string(error) + " for integral " +
                             std::to_string(value)};
  }
  return value;
}

// int_0^(1/2) x^(e-1) g(x) dx.  With e = m + f, m integer and f in (0, 1], the substitution
// x = t^(1/f) turns x^(e-1) dx into x^m dt / f, leaving a smooth integrand.
template <typename G>
auto integrate_endpoint(double e, G g) -> double {
  auto m = std::ceil(e) - 1.0;
  auto f = e - m;
  if (f == 1.0) {
    return integrate_gk([&](double x) { return std::pow(x, m) * g(x); }, 0.5);
  }
  return integrate_gk(
             [&](double t) {
               auto x = std::pow(t, 1.0 / f);
               return std::pow(x, m) * g(x);
             },
             std::pow(0.5, f)) /
         f;
}

}  // namespace detail

// d_n = int_0^1 x^(n + a - 1) (1-x)^(c - 1) exp(-sigma x) dx with a = theta nu1, c = theta nu0,
// split at 1/2 so each half carries one endpoint singularity.
inline auto wright_unnormalized_moment(const Diffusion_params& p, double n) -> double {
  auto a = p.theta * p.nu1;
  auto c = p.theta * p.nu0;
  auto left = detail::integrate_endpoint(
      n + a, [&](double x) { return std::pow(1.0 - x, c - 1.0) * std::exp(-p.sigma * x); });
  auto right = detail::integrate_endpoint(
      c, [&](double y) { return std::pow(1.0 - y, n + a - 1.0) * std::exp(-p.sigma * (1.0 - y)); });
  return left + right;
}

// beta_0..beta_M by quadrature
inline auto wright_moments(const Diffusion_params& p, std::size_t M) -> std::vector<double> {
  validate(p);
  auto d0 = wright_unnormalized_moment(p, 0.0);
  auto beta = std::vector<double>(M + 1, 1.0);
  for (auto n = std::size_t{1}; n <= M; ++n) {
    beta[n] = wright_unnormalized_moment(p, static_cast<double>(n)) / d0;
  }
  return beta;
}

// 1 / int of the unnormalized Wright density
inline auto wright_normalizer(const Diffusion_params& p) -> double {
  validate(p);
  return 1.0 / wright_unnormalized_moment(p, 0.0);
}

// ---------------------------------------------------------------------------------------------
// Recursions

// (n-1+sigma+theta) beta_n = sigma beta_{n+1} + (n-1+theta nu1) beta_{n-1},  n >= 1
inline auto beta_system(const Diffusion_params& p, std::size_t M) -> Tridiagonal_system {
  auto sys = Tridiagonal_system{};
  sys.diag.resize(M);
  sys.sub.resize(M - 1);
  sys.sup.assign(M - 1, -p.sigma);
  sys.rhs.assign(M, 0.0);
  for (auto i = std::size_t{0}; i < M; ++i) {
    auto n = static_cast<double>(i + 1);
    sys.diag[i] = n - 1.0 + p.sigma + p.theta;
    if (i > 0) { sys.sub[i - 1] = -(n - 1.0 + p.theta * p.nu1); }
  }
  sys.rhs[0] = p.theta * p.nu1;  // beta_0 = 1
  return sys;
}

// (n+1+sigma+theta) alpha_n = (n+1+theta nu1) alpha_{n+1} + sigma alpha_{n-1},  n >= 1
inline auto alpha_system(const Diffusion_params& p, std::size_t M) -> Tridiagonal_system {
  auto sys = Tridiagonal_system{};
  sys.diag.resize(M);
  sys.sub.assign(M - 1, -p.sigma);
  sys.sup.resize(M - 1);
  sys.rhs.assign(M, 0.0);
  for (auto i = std::size_t{0}; i < M; ++i) {
    auto n = static_cast<double>(i + 1);
    sys.diag[i] = n + 1.0 + p.sigma + p.theta;
    if (i + 1 < M) { sys.sup[i] = -(n + 1.0 + p.theta * p.nu1); }
  }
  sys.rhs[0] = p.sigma;  // alpha_0 = 1
  return sys;
}

namespace detail {

inline auto solve_truncated(const Tridiagonal_system& sys) -> std::vector<double> {
  auto x = std::vector<double>(sys.size() + 2, 0.0);
  x[0] = 1.0;
  auto inner = solve_tridiagonal(sys);
  std::ranges::copy(inner, x.begin() + 1);
  return x;
}

}  // namespace detail

// beta_0..beta_M.  beta itself may decay only polynomially (slowly when theta nu0 is small), so
// no smallness of beta_M is required; convergence is judged on beta_1.
inline auto beta_recursion(const Diffusion_params& p, const Truncation_policy& policy = {})
    -> Truncated_sequence {
  validate(p);
  return solve_with_doubling(
      [&](std::size_t M) { return detail::solve_truncated(beta_system(p, M)); }, policy,
      [](const std::vector<double>&, std::size_t) { return true; }, "beta recursion");
}

inline constexpr double k_alpha_floor = 1e-30;

// alpha_0..alpha_M with alpha_M below k_alpha_floor, so every series weighted by alpha or omega
// is complete to far below double precision.
inline auto alpha_tail(const Diffusion_params& p, const Truncation_policy& policy = {})
    -> Truncated_sequence {
  validate(p);
  return solve_with_doubling(
      [&](std::size_t M) { return detail::solve_truncated(alpha_system(p, M)); }, policy,
      [](const std::vector<double>& fine, std::size_t M) { return fine[M] <= k_alpha_floor; },
      "alpha recursion");
}

// alpha_n = sigma^n / prod_{j<=n}(j + theta nu1) * (beta_{n+1} - beta_{n+2}) / (beta_1 - beta_2)
// for n = 0..beta.size()-3.
inline auto alpha_from_beta(const Diffusion_params& p, std::span<const double> beta)
    -> std::vector<double> {
  validate(p);
  if (beta.size() < 3) {
    throw Invalid_parameter{"alpha_from_beta needs beta_0..beta_2 at least"};
  }
  auto scale = beta[1] - beta[2];
  if (!(scale > 0.0)) {
    throw Degenerate_beta{"beta_1 - beta_2 must be positive"};
  }
  auto out = std::vector<double>(beta.size() - 2, 0.0);
  out[0] = 1.0;
  if (p.sigma == 0.0) { return out; }
  auto log_prefactor = 0.0;  // log(sigma^n / F_n)
  auto log_sigma = std::log(p.sigma);
  for (auto n = std::size_t{1}; n < out.size(); ++n) {
    log_prefactor += log_sigma - std::log(static_cast<double>(n) + p.theta * p.nu1);
    out[n] = std::exp(log_prefactor) * (beta[n + 1] - beta[n + 2]) / scale;
  }
  return out;
}

// ---------------------------------------------------------------------------------------------
// Solution bundle

struct Diffusion_solution {
  Diffusion_params params;
  std::vector<double> alpha;  // 0..M
  std::vector<double> beta;   // 0..M+2
  std::size_t M = 0;
  double tol = 0.0;           // largest of: alpha_M, head movements at the last doubling
  double normalizer = 0.0;    // 1 / int of the unnormalized Wright density

  auto omega(std::size_t n) const -> double { return alpha[n - 1] - alpha[n]; }
  auto delta(std::size_t n) const -> double { return beta[n - 1] - beta[n]; }
};

inline auto solve_diffusion(const Diffusion_params& p, const Truncation_policy& policy = {},
                            bool with_normalizer = true) -> Diffusion_solution {
  auto alpha = alpha_tail(p, policy);
  auto beta_policy = policy;
  beta_policy.initial = std::max(policy.initial, alpha.M + 2);
  auto beta = beta_recursion(p, beta_policy);
  auto sol = Diffusion_solution{};
  sol.params = p;
  sol.M = alpha.M;
  sol.alpha = std::move(alpha.values);
  sol.beta.assign(beta.values.begin(), beta.values.begin() + static_cast<std::ptrdiff_t>(sol.M + 3));
  sol.tol = std::max({sol.alpha[sol.M], alpha.change, beta.change});
  sol.normalizer = with_normalizer ? wright_normalizer(p) : 0.0;
  return sol;
}

inline auto ancestral_type1_prob(const Diffusion_solution& sol) -> double {
  auto p1 = 0.0;
  for (auto n = std::size_t{1}; n <= sol.M; ++n) { p1 += sol.omega(n) * sol.beta[n]; }
  return p1;
}

// Fluxes, rates, per-level fluxes and the per-level identity
//   theta nu0 alpha_{n-1} beta_n + sum_{i>n} omega_i delta_i = (theta nu1 + n - 1) omega_n delta_n
inline auto diffusion_fluxes_rates(const Diffusion_solution& sol) -> Flux_report {
  const auto& p = sol.params;
  auto M = sol.M;
  auto out = Flux_report{};
  out.per_level10.assign(M + 2, 0.0);
  out.per_level01.assign(M + 2, 0.0);
  out.identity_residual.assign(M + 2, 0.0);
  auto type1 = 0.0;  // sum omega_m beta_m
  auto type0 = 0.0;  // sum alpha_{m-1} delta_m
  for (auto n = std::size_t{1}; n <= M + 1; ++n) {
    auto alpha_n = n <= M ? sol.alpha[n] : 0.0;
    auto omega_n = sol.alpha[n - 1] - alpha_n;
    out.per_level10[n] = p.theta * p.nu0 * sol.alpha[n - 1] * sol.beta[n];
    out.per_level01[n] = p.theta * p.nu1 * omega_n * sol.delta(n);
    out.f10 += out.per_level10[n];
    out.f01 += out.per_level01[n];
    type1 += omega_n * sol.beta[n];
    type0 += sol.alpha[n - 1] * sol.delta(n);
  }
  out.q10 = out.f10 / type1;
  out.q01 = out.f01 / type0;

  auto tail = 0.0;
  for (auto n = M + 1; n >= 1; --n) {
    auto alpha_n = n <= M ? sol.alpha[n] : 0.0;
    auto wd = (sol.alpha[n - 1] - alpha_n) * sol.delta(n);
    out.identity_residual[n] =
        out.per_level10[n] + tail - (p.theta * p.nu1 + static_cast<double>(n - 1)) * wd;
    tail += wd;
  }
  return out;
}

struct Derivative_bundle {
  std::vector<double> alpha_prime;  // 0..M, alpha'_0 = 0
  std::vector<double> beta_prime;   // 0..M+1
  double K = 0.0;
  double q10_prime = 0.0;
  double q01_prime = 0.0;
};

// d/dsigma of alpha_n, beta_n and the ancestral mutation rates:
//   alpha'_n = alpha_{n-1} - K alpha_n,  K = [(1 + theta nu1)(alpha_0 - alpha_1) + sigma + theta nu0] / sigma
//   beta'_n  = beta_1 beta_n - beta_{n+1}
inline auto diffusion_derivatives(const Diffusion_solution& sol) -> Derivative_bundle {
  const auto& p = sol.params;
  if (p.sigma == 0.0) { throw Sigma_zero{}; }
  auto M = sol.M;
  auto out = Derivative_bundle{};
  out.K = ((1.0 + p.theta * p.nu1) * (sol.alpha[0] - sol.alpha[1]) + p.sigma + p.theta * p.nu0) / p.sigma;
  out.alpha_prime.assign(M + 1, 0.0);
  for (auto n = std::size_t{1}; n <= M; ++n) {
    out.alpha_prime[n] = sol.alpha[n - 1] - out.K * sol.alpha[n];
  }
  out.beta_prime.assign(M + 2, 0.0);
  for (auto n = std::size_t{0}; n <= M + 1; ++n) {
    out.beta_prime[n] = sol.beta[1] * sol.beta[n] - sol.beta[n + 1];
  }

  auto num10 = 0.0;  // sum alpha'_n beta_n
  auto num01 = 0.0;  // sum alpha'_n delta_n
  auto den10 = 0.0;  // sum omega_n beta_n
  auto den01 = 0.0;  // sum alpha_{n-1} delta_n
  for (auto n = std::size_t{1}; n <= M; ++n) {
    num10 += out.alpha_prime[n] * sol.beta[n];
    num01 += out.alpha_prime[n] * sol.delta(n);
    den10 += sol.omega(n) * sol.beta[n];
    den01 += sol.alpha[n - 1] * sol.delta(n);
  }
  out.q10_prime = p.theta * p.nu0 * sol.beta[1] * num10 / (den10 * den10);
  out.q01_prime = -p.theta * p.nu1 * (sol.beta[0] - sol.beta[1]) * num01 / (den01 * den01);
  return out;
}

}  // namespace ancline
