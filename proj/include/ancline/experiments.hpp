#pragma once

// Figure tables, the pedigree versus phylogeny flux comparison, the selection strength matching
// a target type-1 frequency, and the simulation-versus-solver validation suite.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <map>
#include <string>
#include <thread>
#include <vector>

#include "ancline/ancestral_line.hpp"
#include "ancline/errors.hpp"
#include "ancline/finite.hpp"
#include "ancline/params.hpp"
#include "ancline/simulate.hpp"

namespace ancline {

// ---------------------------------------------------------------------------------------------
// Tables

struct Table {
  std::string title;
  std::vector<std::string> columns;  // first column is the abscissa
  std::vector<std::vector<double>> rows;
  bool log_y = false;
};

// Runs f(0..count-1) on a pool of threads; results must be written by index.
inline auto parallel_for(std::size_t count, const std::function<void(std::size_t)>& f) -> void {
  auto workers = std::max(1u, std::min(std::thread::hardware_concurrency(), 16u));
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, count));
  if (workers <= 1) {
    for (auto i = std::size_t{0}; i < count; ++i) { f(i); }
    return;
  }
  auto errors = std::vector<std::exception_ptr>(workers);
  {
    auto pool = std::vector<std::jthread>{};
    for (auto w = 0u; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (auto i = std::size_t{w}; i < count; i += workers) { f(i); }
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (const auto& e : errors) {
    if (e) { std::rethrow_exception(e); }
  }
}

// 0 followed by points-1 log-spaced values from s_min to s_max
inline auto selection_grid(double s_max, std::int64_t points, double s_min = 1e-5) -> std::vector<double> {
  if (points < 2 || !(s_max > s_min) || !(s_min > 0.0)) {
    throw Invalid_override{"grid needs points >= 2 and 0 < s_min < s_max"};
  }
  auto grid = std::vector<double>{0.0};
  auto lo = std::log(s_min);
  auto hi = std::log(s_max);
  for (auto i = std::int64_t{0}; i < points - 1; ++i) {
    if (i == 0) {
      grid.push_back(s_min);
    } else if (i == points - 2) {
      grid.push_back(s_max);
    } else {
      grid.push_back(std::exp(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 2)));
    }
  }
  return grid;
}

// ---------------------------------------------------------------------------------------------
// Figures

struct Figure_defaults {
  std::int64_t N = 10'000;
  double u = 8e-4;
  double nu1 = 0.99;
  double s = 1.5e-3;          // partial-fluxes
  double s_max = 0.0175;      // sweeps
  double s_min = 1e-5;
  std::int64_t points = 60;
  std::vector<double> nu1_series{0.99, 0.01};  // mut-rates, mut-fluxes
};

inline const std::vector<std::string> k_figure_names{"anc-dist", "partial-fluxes", "mut-rates", "mut-fluxes"};

// Applies key = value overrides (N, u, nu1, s, s_max, s_min, points).
inline auto apply_overrides(Figure_defaults d, const std::map<std::string, double>& overrides)
    -> Figure_defaults {
  for (const auto& [key, value] : overrides) {
    if (!std::isfinite(value)) { throw Invalid_override{key + " must be finite"}; }
    if (key == "N") {
      if (value < 1 || value != std::floor(value)) { throw Invalid_override{"N must be a positive integer"}; }
      d.N = static_cast<std::int64_t>(value);
    } else if (key == "u") {
      d.u = value;
    } else if (key == "nu1") {
      d.nu1 = value;
      d.nu1_series = {value};
    } else if (key == "s") {
      d.s = value;
    } else if (key == "s_max") {
      d.s_max = value;
    } else if (key == "s_min") {
      d.s_min = value;
    } else if (key == "points") {
      if (value < 2 || value != std::floor(value)) { throw Invalid_override{"points must be an integer >= 2"}; }
      d.points = static_cast<std::int64_t>(value);
    } else {
      throw Invalid_override{"unknown override key '" + key + "'"};
    }
  }
  return d;
}

inline auto format_nu(double nu1) -> std::string {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", nu1);
  return buf;
}

// s, b1, P(A = 1)
inline auto figure_anc_dist(const Figure_defaults& d) -> Table {
  auto grid = selection_grid(d.s_max, d.points, d.s_min);
  auto table = Table{"type-1 frequency and ancestral type-1 probability", {"s", "b1", "pA1"}, {}, true};
  table.rows.assign(grid.size(), {});
  parallel_for(grid.size(), [&](std::size_t i) {
    auto sol = solve_finite(validate(Finite_params::make(d.N, grid[i], d.u, d.nu1)));
    table.rows[i] = {grid[i], sol.b[1], ancestral_type_probs(sol).p1};
  });
  return table;
}

// n, per-level fluxes f10(n), f01(n), up to the last level with a_{n-1} > 0
inline auto figure_partial_fluxes(const Figure_defaults& d) -> Table {
  auto sol = solve_finite(validate(Finite_params::make(d.N, d.s, d.u, d.nu1)));
  auto fluxes = mutation_fluxes(sol);
  auto table = Table{"per-level mutation fluxes", {"n", "f10_n", "f01_n"}, {}, true};
  for (auto n = std::int64_t{1}; n <= sol.N() && sol.a[n - 1] > 0.0; ++n) {
    table.rows.push_back({static_cast<double>(n), fluxes.per_level10[n], fluxes.per_level01[n]});
  }
  return table;
}

// s, then (q10, q01) or f10 for each nu1 of the series
inline auto figure_sweep(const Figure_defaults& d, bool rates) -> Table {
  auto grid = selection_grid(d.s_max, d.points, d.s_min);
  auto table = Table{rates ? "ancestral mutation rates" : "ancestral mutation fluxes", {"s"}, {}, rates};
  for (auto nu1 : d.nu1_series) {
    if (rates) {
      table.columns.push_back("q10_nu1=" + format_nu(nu1));
      table.columns.push_back("q01_nu1=" + format_nu(nu1));
    } else {
      table.columns.push_back("f_nu1=" + format_nu(nu1));
    }
  }
  table.rows.assign(grid.size(), {});
  parallel_for(grid.size(), [&](std::size_t i) {
    auto row = std::vector<double>{grid[i]};
    for (auto nu1 : d.nu1_series) {
      auto sol = solve_finite(validate(Finite_params::make(d.N, grid[i], d.u, nu1)));
      if (rates) {
        auto q = mutation_rates(sol);
        row.push_back(q.q10);
        row.push_back(q.q01);
      } else {
        row.push_back(mutation_fluxes(sol).f10);
      }
    }
    table.rows[i] = std::move(row);
  });
  return table;
}

inline auto run_figure(const std::string& name, const std::map<std::string, double>& overrides = {})
    -> Table {
  if (std::ranges::find(k_figure_names, name) == k_figure_names.end()) {
    throw Unknown_figure{name};
  }
  auto d = apply_overrides(Figure_defaults{}, overrides);
  if (name == "anc-dist") { return figure_anc_dist(d); }
  if (name == "partial-fluxes") { return figure_partial_fluxes(d); }
  return figure_sweep(d, name == "mut-rates");
}

// ---------------------------------------------------------------------------------------------
// Flux comparison

struct Flux_comparison {
  double total_rate = 0.0;
  double v0 = 0.0;  // neutral rate within type 0
  double v1 = 0.0;  // neutral rate within type 1
  double b1 = 0.0;
  double pA0 = 0.0;
  double pA1 = 0.0;
  double q10 = 0.0;
  double q01 = 0.0;
  double pedigree_flux = 0.0;
  double phylo_flux = 0.0;
  double ratio = 0.0;
};

// Every individual mutates at total_rate; v0 + u nu1 = total_rate = v1 + u nu0.
inline auto compare_fluxes(const Finite_params& p, double total_rate) -> Flux_comparison {
  validate(p);
  auto out = Flux_comparison{};
  out.total_rate = total_rate;
  out.v0 = total_rate - p.u * p.nu1;
  out.v1 = total_rate - p.u * p.nu0;
  if (!(out.v0 > 0.0) || !(out.v1 > 0.0)) {
    throw Negative_neutral_rate{"total rate must exceed max(u nu0, u nu1)"};
  }
  auto sol = solve_finite(p);
  auto probs = ancestral_type_probs(sol);
  auto rates = mutation_rates(sol);
  out.b1 = sol.b[1];
  out.pA0 = probs.p0;
  out.pA1 = probs.p1;
  out.q10 = rates.q10;
  out.q01 = rates.q01;
  out.pedigree_flux = (1.0 - out.b1) * (out.v0 + p.u * p.nu1) + out.b1 * (out.v1 + p.u * p.nu0);
  out.phylo_flux = out.pA0 * (out.v0 + out.q01) + out.pA1 * (out.v1 + out.q10);
  out.ratio = out.pedigree_flux / out.phylo_flux;
  return out;
}

// ---------------------------------------------------------------------------------------------
// Selection strength for a target type-1 frequency

inline constexpr double k_find_s_tol = 1e-9;
inline constexpr double k_find_s_max = 1e3;

inline auto type1_frequency(std::int64_t N, double s, double u, double nu1) -> double {
  return sampling_probs(validate(Finite_params::make(N, s, u, nu1)))[1];
}

// Bisection on the decreasing map s -> b1(s) until |b1(s) - target| <= k_find_s_tol.
inline auto find_s_for_b1(std::int64_t N, double u, double nu1, double target) -> double {
  auto b0 = type1_frequency(N, 0.0, u, nu1);
  if (std::abs(b0 - target) <= k_find_s_tol) { return 0.0; }
  if (!(target < b0) || !(target > 0.0)) {
    throw Target_unreachable{"target must lie in (0, b1(0)) with b1(0) = " + std::to_string(b0)};
  }
  auto lo = 0.0;
  auto hi = 1e-3;
  while (type1_frequency(N, hi, u, nu1) > target) {
    lo = hi;
    hi *= 2.0;
    if (hi > k_find_s_max) { throw Target_unreachable{"target not reached for s <= 1e3"}; }
  }
  for (auto iter = 0; iter < 200; ++iter) {
    auto mid = 0.5 * (lo + hi);
    auto b = type1_frequency(N, mid, u, nu1);
    if (std::abs(b - target) <= k_find_s_tol) { return mid; }
    (b > target ? lo : hi) = mid;
  }
  throw No_convergence{"bisection for s did not reach the tolerance"};
}

// ---------------------------------------------------------------------------------------------
// Validation suite

struct Validation_check {
  std::string name;
  double analytic = 0.0;
  double simulated = 0.0;
  double std_error = 0.0;
  bool pass = false;
};

struct Validation_report {
  Finite_params params;
  std::vector<Validation_check> checks;

  auto all_pass() const -> bool {
    return std::ranges::all_of(checks, [](const auto& c) { return c.pass; });
  }
};

struct Validation_config {
  std::uint64_t seed = 1;
  std::int64_t moran_events = 1'000'000;
  std::int64_t line_events = 2'000'000;
  std::int64_t killed_replicates = 100'000;
  std::int64_t killed_n0 = 3;
  double tracer_horizon = 20'000.0;
  std::int64_t tracer_replicates = 64;
  double tv_bound = 0.02;
  double tail_floor = 1e-3;  // tail levels checked: a_n above this
  double k_se = 3.0;
};

inline auto within_se(const std::string& name, double analytic, const Sim_estimate& e, double k)
    -> Validation_check {
  return {name, analytic, e.value, e.std_error, std::abs(e.value - analytic) <= k * e.std_error};
}

inline auto run_validation(const Finite_params& p, const Validation_config& vc) -> Validation_report {
  validate(p);
  auto report = Validation_report{p, {}};
  auto sol = solve_finite(p);
  auto& checks = report.checks;

  auto cfg = Sim_config{};
  cfg.seed = vc.seed;
  cfg.events = vc.moran_events;
  auto moran = simulate_moran(p, cfg);
  auto tv = total_variation(moran.pi, sol.pi);
  checks.push_back({"moran_occupancy_tv", 0.0, tv, 0.0, tv <= vc.tv_bound});

  cfg.events = vc.line_events;
  auto lines = simulate_line_counting(p, cfg);
  for (auto n = std::int64_t{1}; n < sol.N() && sol.a[n] > vc.tail_floor; ++n) {
    checks.push_back(within_se("line_tail_" + std::to_string(n), sol.a[n], lines.tail[n], vc.k_se));
  }
  if (p.s == 0.0) {
    checks.push_back({"line_point_mass_at_one", 1.0, lines.w[1].value, 0.0, lines.w[1].value == 1.0});
  }

  auto n0 = std::min(vc.killed_n0, p.N);
  cfg.replicates = vc.killed_replicates;
  auto killed = simulate_killed_asg(p, n0, cfg);
  checks.push_back(within_se("killed_asg_b" + std::to_string(n0), sol.b[n0], killed, vc.k_se));

  cfg.replicates = vc.tracer_replicates;
  cfg.horizon = vc.tracer_horizon;
  auto traced = simulate_ancestral_line(p, cfg);
  auto report_flux = flux_report(sol);
  auto probs = ancestral_type_probs(sol);
  checks.push_back(within_se("tracer_pA1", probs.p1, traced.pA1, vc.k_se));
  checks.push_back(within_se("tracer_f10", report_flux.f10, traced.f10, vc.k_se));
  checks.push_back(within_se("tracer_f01", report_flux.f01, traced.f01, vc.k_se));
  checks.push_back(within_se("tracer_q10", report_flux.q10, traced.q10, vc.k_se));
  checks.push_back(within_se("tracer_q01", report_flux.q01, traced.q01, vc.k_se));
  auto combined = std::hypot(traced.f10.std_error, traced.f01.std_error);
  auto gap = traced.f10.value - traced.f01.value;
  checks.push_back({"tracer_flux_balance", 0.0, gap, combined, std::abs(gap) <= vc.k_se * combined});
  return report;
}

}  // namespace ancline
