#pragma once

// Deterministic limit (N -> infinity without rescaling).  The line-counting process has no
// coalescences, so its stationary law is geometric and everything is in closed form.

#include <cmath>

#include "ancline/params.hpp"

namespace ancline {

namespace detail {

// sqrt((u+s)^2 - 4 s u nu1), shared by the equilibrium and the geometric parameter
inline auto det_discriminant_root(const Det_params& p) -> double {
  auto us = p.u + p.s;
  return std::sqrt(us * us - 4.0 * p.s * p.u * p.nu1);
}

}  // namespace detail

// Equilibrium type-1 frequency: the smaller root of s y^2 - (s+u) y + u nu1 = 0, written in the
// cancellation-free form 2 u nu1 / ((u+s) + root).  At s = 0 this is exactly nu1.
inline auto det_equilibrium(const Det_params& p) -> double {
  validate(p);
  if (p.s == 0.0) { return p.nu1; }
  return 2.0 * p.u * p.nu1 / ((p.u + p.s) + detail::det_discriminant_root(p));
}

struct Det_geometric {
  double p = 0.0;        // L ~ Geo(1 - p): w_n = p^(n-1) (1-p), a_n = p^n
  double p_prime = 0.0;  // dp/ds
  double one_minus_p = 1.0;

  auto w(int n) const -> double { return std::pow(p, n - 1) * one_minus_p; }
  auto a(int n) const -> double { return std::pow(p, n); }
};

// p is the smaller root of u nu1 p^2 - (u+s) p + s = 0.  Both branches (nu1 > 0 and nu1 = 0)
// are covered by 2 s / ((u+s) + root).
inline auto det_geometric(const Det_params& p) -> Det_geometric {
  validate(p);
  auto root = detail::det_discriminant_root(p);
  auto x = p.u + p.s - 2.0 * p.u * p.nu1;
  auto denom = (p.u + p.s) + root;
  // 1 - p = (u - s + root) / denom, with root^2 - (s-u)^2 = 4 s u nu0
  auto gap = p.s >= p.u ? 4.0 * p.s * p.u * p.nu0 / (root + (p.s - p.u)) : (p.u - p.s) + root;
  // p' = (1 - x/root) / (2 u nu1) = 2 u nu0 / (root (root + x))
  return {2.0 * p.s / denom, 2.0 * p.u * p.nu0 / (root * (root + x)), gap / denom};
}

namespace detail {

// 1 - y_inf = (x + root) / ((u+s) + root) with x = u + s - 2 u nu1 and root^2 - x^2 = 4 u^2 nu1 nu0
inline auto det_one_minus_equilibrium(const Det_params& p) -> double {
  if (p.s == 0.0) { return p.nu0; }
  auto root = det_discriminant_root(p);
  auto x = p.u + p.s - 2.0 * p.u * p.nu1;
  auto num = x >= 0.0 ? x + root : 4.0 * p.u * p.u * p.nu1 * p.nu0 / (root - x);
  return num / ((p.u + p.s) + root);
}

}  // namespace detail

struct Det_solution {
  Det_params params;
  double y_inf = 0.0;
  double one_minus_y = 1.0;
  double p = 0.0;
  double p_prime = 0.0;
  double one_minus_p = 1.0;
  double q10 = 0.0;
  double q01 = 0.0;
  double q10_prime = 0.0;
  double q01_prime = 0.0;
  double pA1 = 0.0;
  double f10 = 0.0;
  double f01 = 0.0;

  // b_n = y_inf^n
  auto b(int n) const -> double { return std::pow(y_inf, n); }
};

inline auto det_rates_and_flux(const Det_params& params) -> Det_solution {
  auto y = det_equilibrium(params);
  auto geo = det_geometric(params);
  auto p = geo.p;
  auto one_minus_p = geo.one_minus_p;
  auto one_minus_y = detail::det_one_minus_equilibrium(params);
  auto sol = Det_solution{};
  sol.params = params;
  sol.y_inf = y;
  sol.one_minus_y = one_minus_y;
  sol.p = p;
  sol.one_minus_p = one_minus_p;
  sol.p_prime = geo.p_prime;
  sol.q10 = params.u * params.nu0 / one_minus_p;
  sol.q01 = params.u * params.nu1 * one_minus_p;
  sol.q10_prime = params.u * params.nu0 * geo.p_prime / (one_minus_p * one_minus_p);
  sol.q01_prime = -params.u * params.nu1 * geo.p_prime;
  // sum_n p^(n-1) (1-p) y^n
  sol.pA1 = one_minus_p * y / (1.0 - p * y);
  // u nu0 sum_n a_{n-1} b_n  and  u nu1 sum_n w_n (b_{n-1} - b_n)
  sol.f10 = params.u * params.nu0 * y / (1.0 - p * y);
  sol.f01 = params.u * params.nu1 * one_minus_p * one_minus_y / (1.0 - p * y);
  return sol;
}

// Both sides of the per-line balance u nu0 a_{n-1} b_n = u nu1 w_n (b_{n-1} - b_n).
struct Det_line_balance {
  double beneficial;
  double deleterious;
};

inline auto det_line_balance(const Det_solution& sol, int n) -> Det_line_balance {
  const auto& q = sol.params;
  auto geo = Det_geometric{sol.p, sol.p_prime, sol.one_minus_p};
  return {q.u * q.nu0 * geo.a(n - 1) * sol.b(n), q.u * q.nu1 * geo.w(n) * sol.b(n - 1) * sol.one_minus_y};
}

}  // namespace ancline
