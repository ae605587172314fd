// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any criterion fails.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "ancline/ancestral_line.hpp"
#include "ancline/deterministic.hpp"
#include "ancline/diffusion.hpp"
#include "ancline/experiments.hpp"
#include "ancline/finite.hpp"
#include "ancline/output.hpp"
#include "ancline/simulate.hpp"

namespace {

using namespace ancline;

auto rel(double x, double y) -> double { return std::abs(x - y) / std::abs(y); }

auto fmt(const char* f, auto... args) -> std::string {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

struct Outcome {
  bool pass = true;
  std::vector<std::string> notes;

  auto check(bool ok, const std::string& what) -> void {
    pass = pass && ok;
    if (!ok) { notes.push_back("failed: " + what); }
  }
  auto note(const std::string& what) -> void { notes.push_back(what); }
};

// 20 (s, u, nu1) triples for the finite and deterministic regimes
auto selection_mutation_grid() -> std::vector<std::tuple<double, double, double>> {
  auto out = std::vector<std::tuple<double, double, double>>{};
  for (auto s : {0.0, 1e-3, 0.01, 0.1, 1.0}) {
    for (auto [u, nu1] : {std::pair{1e-3, 0.99}, std::pair{0.01, 0.5}, std::pair{0.05, 0.1}, std::pair{0.2, 0.7}}) {
      out.emplace_back(s, u, nu1);
    }
  }
  return out;
}

// 20 (sigma, theta, nu1) triples for the diffusion regime
auto diffusion_grid() -> std::vector<std::tuple<double, double, double>> {
  auto out = std::vector<std::tuple<double, double, double>>{};
  for (auto sigma : {0.0, 0.5, 2.0, 10.0, 25.0}) {
    for (auto [theta, nu1] : {std::pair{0.3, 0.5}, std::pair{1.0, 0.9}, std::pair{8.0, 0.99}, std::pair{4.0, 0.2}}) {
      out.emplace_back(sigma, theta, nu1);
    }
  }
  return out;
}

const std::vector<std::tuple<double, double, double>> k_cross_points{
    {1.0, 1.0, 0.5}, {10.0, 8.0, 0.99}, {0.5, 2.0, 0.9}, {5.0, 2.0, 0.8}, {15.0, 8.0, 0.99}};

auto criterion_flux_comparison() -> Outcome {
  auto o = Outcome{};
  auto s = find_s_for_b1(10'000, 8e-4, 0.99, 0.1);
  auto p = Finite_params::make(10'000, s, 8e-4, 0.99);
  auto c = compare_fluxes(p, 1.6e-3);
  o.check(rel(s, 0.008) <= 0.10, "s* within 10% of 0.008");
  o.check(rel(c.pA1, 1.3e-4) <= 0.10, "P(A=1) within 10% of 1.3e-4");
  o.check(rel(c.q01, 9e-7) <= 0.15, "q01 within 15% of 9e-7");
  o.check(rel(c.q10, 0.007) <= 0.10, "q10 within 10% of 0.007");
  o.check(rel(c.phylo_flux, 8.1e-4) <= 0.05, "phylogenetic flux within 5% of 8.1e-4");
  o.check(std::abs(c.pedigree_flux - 1.6e-3) <= 1e-12, "pedigree flux equals 1.6e-3");
  o.note(fmt("target b1=0.1 (type-0 share 0.9): s*=%.6g pA1=%.4g q01=%.4g q10=%.4g phylo=%.5g pedigree=%.17g", s,
             c.pA1, c.q01, c.q10, c.phylo_flux, c.pedigree_flux));
  return o;
}

auto criterion_flux_balance() -> Outcome {
  auto o = Outcome{};
  auto worst = std::array<double, 3>{};
  for (auto [s, u, nu1] : selection_mutation_grid()) {
    auto f = mutation_fluxes(solve_finite(Finite_params::make(1000, s, u, nu1)));
    worst[0] = std::max(worst[0], rel(f.f10, f.f01));
    auto d = det_rates_and_flux(Det_params::make(s, u, nu1));
    worst[2] = std::max(worst[2], rel(d.f10, d.f01));
  }
  for (auto [sigma, theta, nu1] : diffusion_grid()) {
    auto r = diffusion_fluxes_rates(solve_diffusion(Diffusion_params::make(sigma, theta, nu1)));
    worst[1] = std::max(worst[1], rel(r.f10, r.f01));
  }
  o.check(worst[0] <= 1e-12, "finite f10 = f01");
  o.check(worst[1] <= 1e-12, "diffusion f10 = f01");
  o.check(worst[2] <= 1e-12, "deterministic f10 = f01");
  o.note(fmt("max relative gap: finite %.2e, diffusion %.2e, deterministic %.2e", worst[0], worst[1], worst[2]));
  return o;
}

auto criterion_flux_identities() -> Outcome {
  auto o = Outcome{};
  auto report = flux_report(solve_finite(Finite_params::make(10'000, 1.5e-3, 8e-4, 0.99)));
  auto finite_max = 0.0;
  for (auto x : report.identity_residual) { finite_max = std::max(finite_max, std::abs(x)); }
  auto diff_max = 0.0;
  for (auto [sigma, theta, nu1] : k_cross_points) {
    auto r = diffusion_fluxes_rates(solve_diffusion(Diffusion_params::make(sigma, theta, nu1)));
    for (auto x : r.identity_residual) { diff_max = std::max(diff_max, std::abs(x)); }
  }
  auto det_max = 0.0;
  for (auto [s, u, nu1] : selection_mutation_grid()) {
    auto sol = det_rates_and_flux(Det_params::make(s, u, nu1));
    for (auto n = 1; n < 100'000; ++n) {
      auto bal = det_line_balance(sol, n);
      if (bal.beneficial < 1e-300) { break; }
      det_max = std::max(det_max, rel(bal.beneficial, bal.deleterious));
    }
  }
  o.check(finite_max <= 1e-10, "finite per-level residuals <= 1e-10");
  o.check(diff_max <= 1e-10, "diffusion per-level residuals <= 1e-10");
  o.check(det_max <= 1e-12, "deterministic per-line balance <= 1e-12 relative");
  o.note(fmt("max residual: finite %.2e, diffusion %.2e, deterministic %.2e (relative)", finite_max, diff_max,
             det_max));
  return o;
}

auto criterion_cross_routes() -> Outcome {
  auto o = Outcome{};
  auto b_gap = 0.0;
  for (auto [N, s, u, nu1] : std::vector<std::tuple<int, double, double, double>>{{2000, 1.5e-3, 8e-4, 0.99},
                                                                                  {2000, 0.01, 8e-4, 0.01},
                                                                                  {500, 0.1, 0.01, 0.5},
                                                                                  {100, 0.5, 0.1, 0.7},
                                                                                  {1000, 0.0, 1e-3, 0.3}}) {
    auto p = Finite_params::make(N, s, u, nu1);
    auto rec = sampling_probs(p, Sampling_method::recursion);
    auto mom = sampling_probs(p, Sampling_method::moments);
    for (auto n = std::size_t{0}; n < rec.size(); ++n) { b_gap = std::max(b_gap, std::abs(rec[n] - mom[n])); }
  }
  auto beta_gap = 0.0;
  auto alpha_gap = 0.0;
  for (auto [sigma, theta, nu1] : k_cross_points) {
    auto p = Diffusion_params::make(sigma, theta, nu1);
    auto sol = solve_diffusion(p);
    auto quad = wright_moments(p, 100);
    for (auto n = 0; n <= 100; ++n) { beta_gap = std::max(beta_gap, std::abs(quad[n] - sol.beta[n])); }
    auto via_beta = alpha_from_beta(p, sol.beta);
    for (auto n = std::size_t{0}; n <= sol.M; ++n) { alpha_gap = std::max(alpha_gap, std::abs(via_beta[n] - sol.alpha[n])); }
  }
  o.check(b_gap <= 1e-8, "b recursion vs moments <= 1e-8");
  o.check(beta_gap <= 1e-6, "beta quadrature vs recursion <= 1e-6");
  o.check(alpha_gap <= 1e-8, "alpha recursion vs alpha from beta <= 1e-8");
  o.note(fmt("max gap: b %.2e, beta %.2e, alpha %.2e", b_gap, beta_gap, alpha_gap));
  return o;
}

auto criterion_derivatives() -> Outcome {
  auto o = Outcome{};
  auto worst_q = 0.0;
  auto worst_beta = 0.0;
  for (auto [sigma, theta, nu1] : std::vector<std::tuple<double, double, double>>{
           {1.0, 1.0, 0.5}, {10.0, 8.0, 0.99}, {0.5, 2.0, 0.9}}) {
    auto d = diffusion_derivatives(solve_diffusion(Diffusion_params::make(sigma, theta, nu1)));
    auto h = 1e-4 * std::max(sigma, 1.0);
    auto up = diffusion_fluxes_rates(solve_diffusion(Diffusion_params::make(sigma + h, theta, nu1)));
    auto down = diffusion_fluxes_rates(solve_diffusion(Diffusion_params::make(sigma - h, theta, nu1)));
    auto fd10 = (up.q10 - down.q10) / (2.0 * h);
    auto fd01 = (up.q01 - down.q01) / (2.0 * h);
    o.check(d.q10_prime > 0.0 && d.q01_prime < 0.0, fmt("signs at sigma=%g", sigma));
    worst_q = std::max({worst_q, rel(d.q10_prime, fd10), rel(d.q01_prime, fd01)});
    auto m_up = wright_moments(Diffusion_params::make(sigma + h, theta, nu1), 20);
    auto m_down = wright_moments(Diffusion_params::make(sigma - h, theta, nu1), 20);
    for (auto n = 1; n <= 20; ++n) {
      worst_beta = std::max(worst_beta, rel(d.beta_prime[n], (m_up[n] - m_down[n]) / (2.0 * h)));
    }
  }
  o.check(worst_q <= 1e-4, "rate derivatives vs central differences <= 1e-4");
  o.check(worst_beta <= 1e-4, "beta' vs central differences of quadrature moments <= 1e-4");
  o.note(fmt("max relative error: rates %.2e, beta' %.2e", worst_q, worst_beta));
  return o;
}

auto criterion_monotonicity() -> Outcome {
  auto o = Outcome{};
  auto checked = 0;
  auto s_grid = std::vector<double>{1e-3, 0.01, 0.05, 0.2, 1.0};
  for (auto [N, u, nu1] : std::vector<std::tuple<int, double, double>>{{200, 0.01, 0.5}, {1000, 8e-4, 0.99}}) {
    auto sols = std::vector<Finite_solution>{};
    for (auto s : s_grid) { sols.push_back(solve_finite(Finite_params::make(N, s, u, nu1))); }
    for (auto i = std::size_t{1}; i < sols.size(); ++i) {
      for (auto n = 1; n < N; ++n) {
        if (sols[i - 1].a[n] > 1e-12) {
          o.check(sols[i].a[n] > sols[i - 1].a[n], fmt("a_%d increasing", n));
          ++checked;
        }
        if (sols[i].b[n] > 1e-12) {
          o.check(sols[i].b[n] < sols[i - 1].b[n], fmt("b_%d decreasing", n));
          ++checked;
        }
      }
      o.check(ancestral_type_probs(sols[i]).p1 < ancestral_type_probs(sols[i - 1]).p1, "finite P(A=1) decreasing");
      ++checked;
    }
  }
  auto sigma_grid = std::vector<double>{0.5, 1.0, 2.0, 5.0, 10.0};
  for (auto [theta, nu1] : {std::pair{2.0, 0.5}, std::pair{8.0, 0.99}}) {
    auto sols = std::vector<Diffusion_solution>{};
    for (auto sigma : sigma_grid) { sols.push_back(solve_diffusion(Diffusion_params::make(sigma, theta, nu1))); }
    for (auto i = std::size_t{1}; i < sols.size(); ++i) {
      auto M = std::min(sols[i].M, sols[i - 1].M);
      for (auto n = std::size_t{1}; n <= M; ++n) {
        if (sols[i - 1].alpha[n] > 1e-12) {
          o.check(sols[i].alpha[n] > sols[i - 1].alpha[n], "alpha increasing");
          ++checked;
        }
        if (sols[i].beta[n] > 1e-12) {
          o.check(sols[i].beta[n] < sols[i - 1].beta[n], "beta decreasing");
          ++checked;
        }
      }
      o.check(ancestral_type1_prob(sols[i]) < ancestral_type1_prob(sols[i - 1]), "diffusion P(A=1) decreasing");
      ++checked;
    }
  }
  auto prev = det_rates_and_flux(Det_params::make(s_grid[0], 0.01, 0.5));
  for (auto i = std::size_t{1}; i < s_grid.size(); ++i) {
    auto cur = det_rates_and_flux(Det_params::make(s_grid[i], 0.01, 0.5));
    o.check(cur.p > prev.p && cur.y_inf < prev.y_inf && cur.pA1 < prev.pA1, "deterministic monotone");
    ++checked;
    prev = cur;
  }
  if (o.notes.size() > 3) { o.notes.resize(3); }
  o.note(fmt("%d pointwise comparisons", checked));
  return o;
}

auto criterion_neutral_collapse() -> Outcome {
  auto o = Outcome{};
  auto worst = 0.0;
  for (auto [u, nu1] : {std::pair{8e-4, 0.99}, std::pair{0.05, 0.3}, std::pair{0.2, 0.5}}) {
    auto q = mutation_rates(solve_finite(Finite_params::make(1000, 0.0, u, nu1)));
    auto d = det_rates_and_flux(Det_params::make(0.0, u, nu1));
    worst = std::max({worst, rel(q.q10, u * (1.0 - nu1)), rel(q.q01, u * nu1), rel(d.q10, u * (1.0 - nu1)),
                      rel(d.q01, u * nu1)});
  }
  for (auto [theta, nu1] : {std::pair{8.0, 0.99}, std::pair{1.0, 0.5}, std::pair{0.3, 0.2}}) {
    auto r = diffusion_fluxes_rates(solve_diffusion(Diffusion_params::make(0.0, theta, nu1)));
    worst = std::max({worst, rel(r.q10, theta * (1.0 - nu1)), rel(r.q01, theta * nu1)});
  }
  o.check(worst <= 1e-14, "neutral rates equal the mutation rates");
  o.note(fmt("max relative deviation %.2e", worst));
  return o;
}

auto criterion_regime_convergence() -> Outcome {
  auto o = Outcome{};
  auto N = 10'000.0;
  auto diff = diffusion_fluxes_rates(solve_diffusion(Diffusion_params::make(10.0, 8.0, 0.99)));
  auto q = mutation_rates(solve_finite(Finite_params::make(10'000, 10.0 / N, 8.0 / N, 0.99)));
  auto e10 = rel(N * q.q10, diff.q10);
  auto e01 = rel(N * q.q01, diff.q01);
  o.check(e10 <= 0.05 && e01 <= 0.05, "scaled finite rates within 5% of the diffusion rates");
  o.note(fmt("relative error q10 %.2e, q01 %.2e", e10, e01));
  return o;
}

auto criterion_simulation() -> Outcome {
  auto o = Outcome{};
  auto cfg = Sim_config{};
  cfg.seed = 1;
  cfg.events = 1'111'112;  // 10^6 events after the 10% burn-in
  auto pm = Finite_params::make(100, 0.05, 0.02, 0.99);
  auto occ = simulate_moran(pm, cfg);
  auto tv = total_variation(occ.pi, moran_stationary(pm));
  o.check(tv <= 0.02 && occ.events >= 1'000'000, "Moran occupancy TV <= 0.02");

  auto pl = Finite_params::make(50, 0.5, 0.1, 0.5);
  cfg.events = 2'000'000;
  auto lines = simulate_line_counting(pl, cfg);
  auto a = tail_probs(pl);
  auto tails_ok = 0;
  auto tails = 0;
  for (auto n = 1; n < 50 && a[n] > 1e-3; ++n) {
    ++tails;
    tails_ok += lines.tail[n].within(a[n]);
  }
  o.check(tails_ok == tails, "line-counting tails within 3 SE");

  auto pk = Finite_params::make(50, 0.5, 0.2, 0.7);
  cfg.replicates = 100'000;
  auto killed = simulate_killed_asg(pk, 3, cfg);
  auto b3 = sampling_probs(pk)[3];
  o.check(killed.within(b3), "killed-ASG absorption within 3 SE of b_3");

  auto pt = Finite_params::make(50, 0.05, 0.02, 0.9);
  cfg.replicates = 64;
  cfg.horizon = 20'000.0;
  auto traced = simulate_ancestral_line(pt, cfg);
  auto sol = solve_finite(pt);
  auto rep = flux_report(sol);
  auto pA1 = ancestral_type_probs(sol).p1;
  o.check(traced.pA1.within(pA1), "tracer P(A=1) within 3 SE");
  o.check(traced.f10.within(rep.f10), "tracer f10 within 3 SE");
  o.check(traced.f01.within(rep.f01), "tracer f01 within 3 SE");
  o.note(fmt("seed 1: TV %.4f; tails %d/%d; b_3 %.5f vs %.5f (SE %.5f)", tv, tails_ok, tails, killed.value, b3,
             killed.std_error));
  o.note(fmt("tracer z-scores: P(A=1) %.2f, f10 %.2f, f01 %.2f", (traced.pA1.value - pA1) / traced.pA1.std_error,
             (traced.f10.value - rep.f10) / traced.f10.std_error, (traced.f01.value - rep.f01) / traced.f01.std_error));
  return o;
}

auto criterion_figures() -> Outcome {
  auto o = Outcome{};
  auto csv = [](const Table& t) {
    auto os = std::ostringstream{};
    write_csv(os, t);
    return os.str();
  };
  auto tables = std::vector<Table>{};
  for (const auto& name : k_figure_names) {
    auto first = run_figure(name);
    o.check(csv(first) == csv(run_figure(name)), name + " CSV byte-stable");
    tables.push_back(std::move(first));
  }
  const auto& anc = tables[0];
  for (const auto& row : anc.rows) {
    if (row[0] > 0.0) { o.check(row[2] < row[1], "P(A=1) < b1 for s > 0"); }
  }
  const auto& rates = tables[2];
  for (auto i = std::size_t{1}; i < rates.rows.size(); ++i) {
    const auto& r = rates.rows[i];
    const auto& q = rates.rows[i - 1];
    o.check(r[1] > q[1] && r[3] > q[3], "q10 increasing in s");
    o.check(r[2] < q[2] && r[4] < q[4], "q01 decreasing in s");
  }
  const auto& fl = tables[3];
  auto sign_changes = 0;
  auto rising = true;
  for (auto i = std::size_t{1}; i < fl.rows.size(); ++i) {
    auto up = fl.rows[i][1] > fl.rows[i - 1][1];
    if (up != rising) {
      ++sign_changes;
      rising = up;
    }
    o.check(fl.rows[i][2] < fl.rows[i - 1][2], "flux for nu1=0.01 declining");
  }
  o.check(sign_changes == 1 && !rising, "flux for nu1=0.99 rises then falls");
  if (o.notes.size() > 3) { o.notes.resize(3); }
  o.note(fmt("%zu-point sweeps; one sign change in successive differences for nu1=0.99: %s", fl.rows.size(),
             sign_changes == 1 ? "yes" : "no"));
  return o;
}

}  // namespace

auto main() -> int {
  auto criteria = std::vector<std::pair<std::string, std::function<Outcome()>>>{
      {"pedigree versus phylogeny reproduction", criterion_flux_comparison},
      {"flux balance in three regimes", criterion_flux_balance},
      {"flux identities", criterion_flux_identities},
      {"cross-route agreement", criterion_cross_routes},
      {"derivatives", criterion_derivatives},
      {"monotonicity", criterion_monotonicity},
      {"neutral collapse", criterion_neutral_collapse},
      {"regime convergence", criterion_regime_convergence},
      {"simulation oracles", criterion_simulation},
      {"figure pipelines", criterion_figures},
  };
  auto failures = 0;
  for (auto i = std::size_t{0}; i < criteria.size(); ++i) {
    auto outcome = Outcome{};
    try {
      outcome = criteria[i].second();
    } catch (const std::exception& e) {
      outcome.pass = false;
      outcome.note(std::string{"exception: "} + e.what());
    }
    failures += !outcome.pass;
    std::printf("[%s] %2zu %s\n", outcome.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str());
    for (const auto& n : outcome.notes) { std::printf("         %s\n", n.c_str()); }
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
