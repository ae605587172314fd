#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "ancline/deterministic.hpp"
#include "ancline/finite.hpp"

namespace {

using namespace ancline;

auto rel(double x, double y) -> double { return std::abs(x - y) / std::abs(y); }

// Root of -s y (1-y) - u nu0 y + u nu1 (1-y) on [0, 1] by bisection
auto riccati_root(double s, double u, double nu1) -> double {
  auto f = [&](double y) { return -s * y * (1.0 - y) - u * (1.0 - nu1) * y + u * nu1 * (1.0 - y); };
  auto lo = 0.0;
  auto hi = 1.0;
  for (auto i = 0; i < 200; ++i) {
    auto mid = 0.5 * (lo + hi);
    (f(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST(Equilibrium, Neutral) {
  EXPECT_EQ(det_equilibrium(Det_params::make(0.0, 0.3, 0.37)), 0.37);
}

TEST(Equilibrium, MatchesRiccatiBisection) {
  for (auto [s, u, nu1] : std::vector<std::tuple<double, double, double>>{
           {2.0, 1.0, 0.5}, {0.01, 8e-4, 0.99}, {1.0, 1.0, 0.5}, {0.5, 0.01, 0.1}}) {
    EXPECT_NEAR(det_equilibrium(Det_params::make(s, u, nu1)), riccati_root(s, u, nu1), 1e-12) << s;
  }
}

TEST(Equilibrium, NearlyOneWayMutation) {
  // nu0 -> 0 with s > u: y -> u / s
  auto p = Det_params{0.5, 0.1, 1e-13, 1.0 - 1e-13};
  EXPECT_NEAR(det_equilibrium(p), 0.2, 1e-10);
}

TEST(Geometric, NeutralAndQuadratic) {
  EXPECT_EQ(det_geometric(Det_params::make(0.0, 0.2, 0.5)).p, 0.0);
  auto g = det_geometric(Det_params::make(1.0, 1.0, 0.5));
  EXPECT_NEAR(0.5 * g.p * g.p - 2.0 * g.p + 1.0, 0.0, 1e-12);
  // nu1 -> 1 closed form
  auto s = 0.3;
  auto u = 0.1;
  auto q = det_geometric(Det_params{s, u, 1e-15, 1.0 - 1e-15});
  auto closed = 0.5 * ((u + s) / u - std::sqrt((u + s) * (u + s) / (u * u) - 4.0 * s / u));
  EXPECT_NEAR(q.p, closed, 1e-12);
  // nu1 -> 0 limit: p = s / (u + s)
  auto z = det_geometric(Det_params{s, u, 1.0 - 1e-13, 1e-13});
  EXPECT_NEAR(z.p, s / (u + s), 1e-12);
}

TEST(Geometric, DerivativeMatchesFiniteDifference) {
  for (auto [s, u, nu1] : std::vector<std::tuple<double, double, double>>{
           {1.0, 1.0, 0.5}, {0.008, 8e-4, 0.99}, {0.3, 0.05, 0.2}}) {
    auto g = det_geometric(Det_params::make(s, u, nu1));
    auto h = 1e-5 * s;
    auto fd = (det_geometric(Det_params::make(s + h, u, nu1)).p - det_geometric(Det_params::make(s - h, u, nu1)).p) /
              (2.0 * h);
    EXPECT_GT(g.p_prime, 0.0);
    EXPECT_LE(rel(g.p_prime, fd), 1e-8) << s;
  }
}

TEST(Geometric, LawNormalized) {
  auto g = det_geometric(Det_params::make(0.5, 0.2, 0.6));
  auto total = 0.0;
  for (auto n = 1; n < 2000; ++n) { total += g.w(n); }
  EXPECT_NEAR(total, 1.0, 1e-12);
}

TEST(DetRates, NeutralCollapse) {
  auto sol = det_rates_and_flux(Det_params::make(0.0, 0.02, 0.9));
  EXPECT_NEAR(sol.q10, 0.02 * 0.1, 1e-14 * 0.002);
  EXPECT_NEAR(sol.q01, 0.02 * 0.9, 1e-14 * 0.018);
}

TEST(DetRates, ClosedFormsAgainstSeries) {
  auto sol = det_rates_and_flux(Det_params::make(0.4, 0.1, 0.7));
  auto geo = det_geometric(sol.params);
  auto pA1 = 0.0;
  auto f10 = 0.0;
  auto f01 = 0.0;
  for (auto n = 1; n < 5000; ++n) {
    pA1 += geo.w(n) * sol.b(n);
    f10 += 0.1 * 0.3 * geo.a(n - 1) * sol.b(n);
    f01 += 0.1 * 0.7 * geo.w(n) * (sol.b(n - 1) - sol.b(n));
  }
  EXPECT_LE(rel(sol.pA1, pA1), 1e-12);
  EXPECT_LE(rel(sol.f10, f10), 1e-12);
  EXPECT_LE(rel(sol.f01, f01), 1e-12);
  EXPECT_LE(rel(sol.q10 * (1.0 - sol.p), 0.03), 1e-14);
  EXPECT_LE(rel(sol.f10, sol.f01), 1e-12);
}

TEST(DetRates, PerLineBalance) {
  for (auto [s, u, nu1] : std::vector<std::tuple<double, double, double>>{
           {1.0, 1.0, 0.5}, {0.008, 8e-4, 0.99}, {0.01, 8e-4, 0.01}}) {
    auto sol = det_rates_and_flux(Det_params::make(s, u, nu1));
    for (auto n = 1; n < 10'000; ++n) {
      auto bal = det_line_balance(sol, n);
      if (bal.beneficial < 1e-300) { break; }
      ASSERT_LE(rel(bal.beneficial, bal.deleterious), 1e-12) << n;
    }
  }
}

TEST(DetRates, MonotoneInSelection) {
  auto prev = det_rates_and_flux(Det_params::make(0.0, 0.01, 0.5));
  for (auto s : {0.001, 0.01, 0.1, 1.0, 10.0}) {
    auto cur = det_rates_and_flux(Det_params::make(s, 0.01, 0.5));
    EXPECT_GT(cur.q10, prev.q10);
    EXPECT_LT(cur.q01, prev.q01);
    EXPECT_LT(cur.pA1, prev.pA1);
    EXPECT_GT(cur.q10_prime, 0.0);
    EXPECT_LT(cur.q01_prime, 0.0);
    prev = cur;
  }
}

TEST(DetRates, ContinuousAtNeutrality) {
  auto at0 = det_rates_and_flux(Det_params::make(0.0, 0.05, 0.3));
  auto near0 = det_rates_and_flux(Det_params::make(1e-12, 0.05, 0.3));
  EXPECT_NEAR(near0.y_inf, at0.y_inf, 1e-10);
  EXPECT_NEAR(near0.q10, at0.q10, 1e-10);
}

TEST(DetRates, FiniteSystemApproaches) {
  auto s = 0.05;
  auto u = 0.02;
  auto nu1 = 0.7;
  auto det = det_rates_and_flux(Det_params::make(s, u, nu1));
  auto prev = 1e300;
  for (auto N : {100, 1000, 10'000}) {
    auto q = mutation_rates(solve_finite(Finite_params::make(N, s, u, nu1)));
    auto err = rel(q.q10, det.q10) + rel(q.q01, det.q01);
    EXPECT_LT(err, prev) << N;
    prev = err;
  }
}

TEST(DetRates, ComplementsUnderStrongSelection) {
  auto sol = det_rates_and_flux(Det_params::make(1.0, 1e-3, 0.99));
  EXPECT_LE(rel(sol.one_minus_p, 1.0 - sol.p), 1e-10);
  EXPECT_LE(rel(sol.one_minus_y, 1.0 - sol.y_inf), 1e-14);
  EXPECT_LE(rel(sol.f10, sol.f01), 1e-14);
  auto weak = det_rates_and_flux(Det_params::make(1e-4, 0.5, 0.999));
  EXPECT_LE(rel(weak.one_minus_y, 1.0 - weak.y_inf), 1e-10);
  EXPECT_LE(rel(weak.f10, weak.f01), 1e-13);
}
