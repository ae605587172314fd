#pragma once

// Parameter records for the finite Moran model and its diffusion and deterministic limits.

#include <cmath>
#include <cstdint>
#include <string>

#include "ancline/errors.hpp"

namespace ancline {

inline constexpr double k_nu_sum_tolerance = 1e-12;

// Finite population of size N.  Type 0 reproduces at rate 1 + s, type 1 at rate 1; every
// individual mutates at rate u, the new type being j with probability nu_j.
struct Finite_params {
  std::int64_t N = 1;
  double s = 0.0;
  double u = 0.0;
  double nu0 = 0.5;
  double nu1 = 0.5;

  static auto make(std::int64_t N, double s, double u, double nu1) -> Finite_params {
    return {N, s, u, 1.0 - nu1, nu1};
  }
};

// Diffusion limit: sigma = lim N s^N, theta = lim N u^N.
struct Diffusion_params {
  double sigma = 0.0;
  double theta = 0.0;
  double nu0 = 0.5;
  double nu1 = 0.5;

  static auto make(double sigma, double theta, double nu1) -> Diffusion_params {
    return {sigma, theta, 1.0 - nu1, nu1};
  }
};

// Deterministic limit: s and u kept fixed as N grows.
struct Det_params {
  double s = 0.0;
  double u = 0.0;
  double nu0 = 0.5;
  double nu1 = 0.5;

  static auto make(double s, double u, double nu1) -> Det_params {
    return {s, u, 1.0 - nu1, nu1};
  }
};

namespace detail {

inline auto check_nu(double nu0, double nu1) -> void {
  if (!(nu0 > 0.0 && nu0 < 1.0)) {
    throw Invalid_parameter{"nu0 must lie in (0,1), got " + std::to_string(nu0)};
  }
  if (!(nu1 > 0.0 && nu1 < 1.0)) {
    throw Invalid_parameter{"nu1 must lie in (0,1), got " + std::to_string(nu1)};
  }
  if (std::abs(nu0 + nu1 - 1.0) > k_nu_sum_tolerance) {
    throw Invalid_parameter{"nu0 + nu1 must equal 1, got " + std::to_string(nu0 + nu1)};
  }
}

inline auto check_rate(const char* name, double value, bool allow_zero) -> void {
  if (!std::isfinite(value) || value < 0.0 || (!allow_zero && value == 0.0)) {
    throw Invalid_parameter{std::string{name} + (allow_zero ? " must be >= 0" : " must be > 0") +
                            ", got " + std::to_string(value)};
  }
}

}  // namespace detail

inline auto validate(const Finite_params& p) -> const Finite_params& {
  if (p.N < 1) {
    throw Invalid_parameter{"N must be >= 1, got " + std::to_string(p.N)};
  }
  detail::check_rate("s", p.s, true);
  detail::check_rate("u", p.u, false);
  detail::check_nu(p.nu0, p.nu1);
  return p;
}

inline auto validate(const Diffusion_params& p) -> const Diffusion_params& {
  detail::check_rate("sigma", p.sigma, true);
  detail::check_rate("theta", p.theta, false);
  detail::check_nu(p.nu0, p.nu1);
  return p;
}

inline auto validate(const Det_params& p) -> const Det_params& {
  detail::check_rate("s", p.s, true);
  detail::check_rate("u", p.u, false);
  detail::check_nu(p.nu0, p.nu1);
  return p;
}

}  // namespace ancline
