// Command-line front end for the ancestral-line solvers, figure tables and simulation oracles.
//
// Exit codes: 0 success, 1 invalid input, 2 numeric failure, 3 validation-suite failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "ancline/ancestral_line.hpp"
#include "ancline/deterministic.hpp"
#include "ancline/diffusion.hpp"
#include "ancline/experiments.hpp"
#include "ancline/finite.hpp"
#include "ancline/output.hpp"
#include "ancline/simulate.hpp"

namespace {

using json = nlohmann::ordered_json;
using namespace ancline;

constexpr int k_exit_invalid = 1;
constexpr int k_exit_numeric = 2;
constexpr int k_exit_validation = 3;

struct Options {
  std::int64_t N = 10'000;
  double s = 0.0;
  double u = 8e-4;
  double nu1 = 0.99;
  double sigma = 10.0;
  double theta = 8.0;
  std::uint64_t seed = 1;
  std::string out;
  std::string format = "json";
  double total_rate = 1.6e-3;
  double target = 0.1;
  std::string figure;
  std::vector<std::string> sets;
  std::string which;
  std::int64_t events = 1'000'000;
  double horizon = 20'000.0;
  std::int64_t replicates = 0;
  double burn_in = 0.1;
  std::int64_t n0 = 3;
  std::string log_path;
};

auto table_json(const Table& table) -> json {
  auto rows = json::array();
  for (const auto& row : table.rows) {
    auto obj = json::object();
    for (auto i = std::size_t{0}; i < row.size(); ++i) { obj[table.columns[i]] = row[i]; }
    rows.push_back(std::move(obj));
  }
  return {{"title", table.title}, {"rows", std::move(rows)}};
}

auto emit(const Options& o, const json& summary, const std::optional<Table>& table) -> void {
  auto file = std::ofstream{};
  if (!o.out.empty()) {
    file.open(o.out, std::ios::binary);
    if (!file) { throw Invalid_parameter{"cannot open output file " + o.out}; }
  }
  std::ostream& os = o.out.empty() ? std::cout : file;
  if (o.format == "json") {
    auto doc = summary;
    if (table) { doc["table"] = table_json(*table); }
    os << doc.dump(2) << '\n';
  } else if (!table) {
    throw Invalid_parameter{"format " + o.format + " needs a tabular result; use json"};
  } else if (o.format == "csv") {
    write_csv(os, *table);
  } else {
    write_svg(os, *table);
  }
}

auto finite_params(const Options& o) -> Finite_params {
  return validate(Finite_params::make(o.N, o.s, o.u, o.nu1));
}

auto report_json(const Flux_report& r) -> json {
  return {{"f10", r.f10}, {"f01", r.f01}, {"q10", r.q10}, {"q01", r.q01}};
}

auto max_abs(const std::vector<double>& xs) -> double {
  auto m = 0.0;
  for (auto x : xs) { m = std::max(m, std::abs(x)); }
  return m;
}

auto estimate_json(const Sim_estimate& e) -> json {
  return {{"value", e.value}, {"std_error", e.std_error}, {"n", e.n}};
}

auto run_finite(const Options& o) -> int {
  auto p = finite_params(o);
  auto sol = solve_finite(p);
  auto report = flux_report(sol);
  auto probs = ancestral_type_probs(sol);
  auto summary = json{{"N", p.N}, {"s", p.s}, {"u", p.u}, {"nu1", p.nu1}, {"b1", sol.b[1]},
                      {"pA1", probs.p1}, {"pA0", probs.p0}};
  summary.update(report_json(report));
  summary["max_identity_residual"] = max_abs(report.identity_residual);
  auto table = Table{"finite solution", {"n", "a_n", "b_n", "w_n", "f10_n", "f01_n"}, {}, true};
  for (auto n = std::int64_t{1}; n <= p.N; ++n) {
    table.rows.push_back({static_cast<double>(n), sol.a[n], sol.b[n], sol.w[n], report.per_level10[n],
                          report.per_level01[n]});
  }
  emit(o, summary, o.format == "json" ? std::nullopt : std::optional{table});
  return 0;
}

auto run_diffusion(const Options& o) -> int {
  auto p = validate(Diffusion_params::make(o.sigma, o.theta, o.nu1));
  auto sol = solve_diffusion(p);
  auto report = diffusion_fluxes_rates(sol);
  auto summary = json{{"sigma", p.sigma}, {"theta", p.theta}, {"nu1", p.nu1}, {"M", sol.M},
                      {"beta1", sol.beta[1]}, {"pA1", ancestral_type1_prob(sol)}};
  summary.update(report_json(report));
  summary["max_identity_residual"] = max_abs(report.identity_residual);
  if (p.sigma > 0.0) {
    auto d = diffusion_derivatives(sol);
    summary["q10_prime"] = d.q10_prime;
    summary["q01_prime"] = d.q01_prime;
  }
  auto table = Table{"diffusion solution", {"n", "alpha_n", "beta_n", "omega_n"}, {}, true};
  for (auto n = std::size_t{1}; n <= sol.M; ++n) {
    table.rows.push_back({static_cast<double>(n), sol.alpha[n], sol.beta[n], sol.omega(n)});
  }
  emit(o, summary, o.format == "json" ? std::nullopt : std::optional{table});
  return 0;
}

auto run_det(const Options& o) -> int {
  auto sol = det_rates_and_flux(validate(Det_params::make(o.s, o.u, o.nu1)));
  auto summary = json{{"s", o.s},       {"u", o.u},         {"nu1", o.nu1},     {"y_inf", sol.y_inf},
                      {"p", sol.p},     {"pA1", sol.pA1},   {"f10", sol.f10},   {"f01", sol.f01},
                      {"q10", sol.q10}, {"q01", sol.q01},   {"p_prime", sol.p_prime},
                      {"q10_prime", sol.q10_prime},         {"q01_prime", sol.q01_prime}};
  emit(o, summary, std::nullopt);
  return 0;
}

auto parse_sets(const Options& o, const CLI::App& cmd) -> std::map<std::string, double> {
  auto overrides = std::map<std::string, double>{};
  for (const auto& kv : o.sets) {
    auto eq = kv.find('=');
    if (eq == std::string::npos) { throw Invalid_override{"expected key=value, got '" + kv + "'"}; }
    auto key = kv.substr(0, eq);
    auto text = kv.substr(eq + 1);
    auto pos = std::size_t{0};
    auto value = 0.0;
    try {
      value = std::stod(text, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos == 0 || pos != text.size()) { throw Invalid_override{"not a number: '" + text + "'"}; }
    overrides[key] = value;
  }
  auto flag = [&](const char* name, const char* key, double value) {
    if (cmd.count(name) > 0) { overrides[key] = value; }
  };
  flag("--N", "N", static_cast<double>(o.N));
  flag("--u", "u", o.u);
  flag("--nu1", "nu1", o.nu1);
  flag("--s", "s", o.s);
  return overrides;
}

auto run_figure_cmd(const Options& o, const CLI::App& cmd) -> int {
  auto table = run_figure(o.figure, parse_sets(o, cmd));
  emit(o, json{{"figure", o.figure}}, table);
  return 0;
}

auto comparison_json(const Flux_comparison& c) -> json {
  return {{"total_rate", c.total_rate}, {"v0", c.v0},   {"v1", c.v1},
          {"b1", c.b1},                 {"pA0", c.pA0}, {"pA1", c.pA1},
          {"q10", c.q10},               {"q01", c.q01}, {"pedigree_flux", c.pedigree_flux},
          {"phylo_flux", c.phylo_flux}, {"ratio", c.ratio}};
}

auto run_compare(const Options& o, const CLI::App& cmd) -> int {
  auto s = cmd.count("--s") > 0 ? o.s : find_s_for_b1(o.N, o.u, o.nu1, o.target);
  auto p = validate(Finite_params::make(o.N, s, o.u, o.nu1));
  auto c = compare_fluxes(p, o.total_rate);
  auto summary = json{{"N", p.N}, {"s", s}, {"u", p.u}, {"nu1", p.nu1}};
  summary.update(comparison_json(c));
  auto table = Table{"flux comparison", {"s", "pedigree_flux", "phylo_flux", "ratio"},
                     {{s, c.pedigree_flux, c.phylo_flux, c.ratio}}, false};
  emit(o, summary, o.format == "json" ? std::nullopt : std::optional{table});
  return 0;
}

auto run_find_s(const Options& o) -> int {
  auto s = find_s_for_b1(o.N, o.u, o.nu1, o.target);
  auto b1 = type1_frequency(o.N, s, o.u, o.nu1);
  emit(o, json{{"N", o.N}, {"u", o.u}, {"nu1", o.nu1}, {"target_b1", o.target}, {"s", s}, {"b1", b1}},
       std::nullopt);
  return 0;
}

auto run_validate(const Options& o) -> int {
  auto vc = Validation_config{};
  vc.seed = o.seed;
  if (o.replicates > 0) { vc.tracer_replicates = o.replicates; }
  auto report = run_validation(finite_params(o), vc);
  auto checks = json::array();
  auto table = Table{"validation", {"check", "analytic", "simulated", "std_error", "pass"}, {}, false};
  auto i = 0.0;
  for (const auto& c : report.checks) {
    checks.push_back({{"name", c.name}, {"analytic", c.analytic}, {"simulated", c.simulated},
                      {"std_error", c.std_error}, {"pass", c.pass}});
    table.rows.push_back({i++, c.analytic, c.simulated, c.std_error, c.pass ? 1.0 : 0.0});
  }
  auto summary = json{{"N", o.N}, {"s", o.s}, {"u", o.u}, {"nu1", o.nu1}, {"seed", o.seed},
                      {"all_pass", report.all_pass()}, {"checks", checks}};
  emit(o, summary, o.format == "json" ? std::nullopt : std::optional{table});
  return report.all_pass() ? 0 : k_exit_validation;
}

auto run_simulate(const Options& o) -> int {
  auto p = finite_params(o);
  auto cfg = Sim_config{};
  cfg.seed = o.seed;
  cfg.events = o.events;
  cfg.horizon = o.horizon;
  cfg.burn_in = o.burn_in;
  cfg.replicates = o.replicates > 0 ? o.replicates : 1;
  auto summary = json{{"which", o.which}, {"N", p.N}, {"s", p.s}, {"u", p.u}, {"nu1", p.nu1}, {"seed", o.seed}};
  auto table = std::optional<Table>{};

  if (o.which == "moran") {
    auto occ = simulate_moran(p, cfg);
    auto pi = moran_stationary(p);
    summary["total_variation"] = total_variation(occ.pi, pi);
    summary["events"] = occ.events;
    table = Table{"Moran occupancy", {"k", "empirical", "std_error", "exact"}, {}, false};
    for (auto k = std::size_t{0}; k < pi.size(); ++k) {
      table->rows.push_back({static_cast<double>(k), occ.pi[k].value, occ.pi[k].std_error, pi[k]});
    }
  } else if (o.which == "lines") {
    auto occ = simulate_line_counting(p, cfg);
    auto a = tail_probs(p);
    table = Table{"line-counting tails", {"n", "empirical_tail", "std_error", "exact_tail"}, {}, true};
    for (auto n = std::size_t{0}; n < a.size(); ++n) {
      table->rows.push_back({static_cast<double>(n), occ.tail[n].value, occ.tail[n].std_error, a[n]});
    }
  } else if (o.which == "killed") {
    if (o.replicates <= 0) { cfg.replicates = 100'000; }
    auto est = simulate_killed_asg(p, o.n0, cfg);
    summary["n0"] = o.n0;
    summary["absorbed_at_zero"] = estimate_json(est);
    summary["exact"] = sampling_probs(p)[static_cast<std::size_t>(o.n0)];
  } else if (o.which == "ancestral-line") {
    auto est = simulate_ancestral_line(p, cfg);
    for (auto [name, e] : {std::pair{"pA1", est.pA1}, std::pair{"f10", est.f10}, std::pair{"f01", est.f01},
                           std::pair{"q10", est.q10}, std::pair{"q01", est.q01}}) {
      summary[name] = estimate_json(e);
    }
    auto sol = solve_finite(p);
    auto exact = report_json(flux_report(sol));
    exact["pA1"] = ancestral_type_probs(sol).p1;
    summary["exact"] = exact;
    if (!o.log_path.empty()) {
      auto rng = Rng{cfg.seed, 0};
      auto types = sample_initial_types(p, moran_stationary(p), rng);
      auto log = simulate_ips(p, cfg.horizon, std::move(types), rng);
      auto file = std::ofstream{o.log_path, std::ios::binary};
      if (!file) { throw Invalid_parameter{"cannot open log file " + o.log_path}; }
      write_event_log(file, log);
    }
  } else {
    throw Invalid_parameter{"unknown simulator '" + o.which + "'"};
  }
  emit(o, summary, o.format == "json" ? std::nullopt : table);
  return 0;
}

auto add_model_flags(CLI::App* cmd, Options& o) -> void {
  cmd->add_option("--N", o.N, "population size")->capture_default_str();
  cmd->add_option("--s", o.s, "selective advantage of type 0")->capture_default_str();
  cmd->add_option("--u", o.u, "mutation rate")->capture_default_str();
  cmd->add_option("--nu1", o.nu1, "probability that a mutation produces type 1")->capture_default_str();
}

auto add_output_flags(CLI::App* cmd, Options& o, std::vector<std::string> formats) -> void {
  cmd->add_option("--out", o.out, "output file (default stdout)");
  cmd->add_option("--format", o.format, "output format")
      ->check(CLI::IsMember(std::move(formats)))
      ->capture_default_str();
}

}  // namespace

auto main(int argc, char** argv) -> int {
  auto app = CLI::App{"Mutations on the ancestral line of the two-type Moran model with selection"};
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML or INI file; sections name subcommands, flags override it");
  auto o = Options{};

  auto* finite = app.add_subcommand("finite", "finite-population solution");
  add_model_flags(finite, o);
  add_output_flags(finite, o, {"json", "csv", "svg"});

  auto* diffusion = app.add_subcommand("diffusion", "diffusion-limit solution");
  diffusion->add_option("--sigma", o.sigma, "scaled selection strength")->capture_default_str();
  diffusion->add_option("--theta", o.theta, "scaled mutation rate")->capture_default_str();
  diffusion->add_option("--nu1", o.nu1, "probability that a mutation produces type 1")->capture_default_str();
  add_output_flags(diffusion, o, {"json", "csv", "svg"});

  auto* det = app.add_subcommand("det", "deterministic-limit solution");
  det->add_option("--s", o.s, "selective advantage of type 0")->capture_default_str();
  det->add_option("--u", o.u, "mutation rate")->capture_default_str();
  det->add_option("--nu1", o.nu1, "probability that a mutation produces type 1")->capture_default_str();
  add_output_flags(det, o, {"json"});

  auto* figure = app.add_subcommand("figure", "figure data: anc-dist, partial-fluxes, mut-rates, mut-fluxes");
  figure->add_option("name", o.figure, "figure name")->required();
  figure->add_option("--N", o.N, "population size");
  figure->add_option("--s", o.s, "selective advantage (partial-fluxes)");
  figure->add_option("--u", o.u, "mutation rate");
  figure->add_option("--nu1", o.nu1, "single nu1 series");
  figure->add_option("--set", o.sets, "override key=value (N, u, nu1, s, s_max, s_min, points)");
  o.format = "csv";
  add_output_flags(figure, o, {"csv", "json", "svg"});

  auto* compare = app.add_subcommand("compare-fluxes", "pedigree versus phylogenetic mutation flux");
  add_model_flags(compare, o);
  compare->add_option("--total", o.total_rate, "total mutation rate per individual")->capture_default_str();
  compare->add_option("--target", o.target, "type-1 frequency fixing s when --s is absent")->capture_default_str();
  add_output_flags(compare, o, {"json", "csv"});

  auto* find_s = app.add_subcommand("find-s", "selection strength giving a target type-1 frequency");
  find_s->add_option("--N", o.N, "population size")->capture_default_str();
  find_s->add_option("--u", o.u, "mutation rate")->capture_default_str();
  find_s->add_option("--nu1", o.nu1, "probability that a mutation produces type 1")->capture_default_str();
  find_s->add_option("--target", o.target, "target type-1 frequency b1")->capture_default_str();
  add_output_flags(find_s, o, {"json"});

  auto* valid = app.add_subcommand("validate", "simulation oracles against the finite solver");
  add_model_flags(valid, o);
  valid->add_option("--seed", o.seed, "random seed")->capture_default_str();
  valid->add_option("--replicates", o.replicates, "tracer replicates");
  add_output_flags(valid, o, {"json", "csv"});

  auto* simulate = app.add_subcommand("simulate", "run one simulator: moran, lines, killed, ancestral-line");
  simulate->add_option("which", o.which, "simulator")
      ->required()
      ->check(CLI::IsMember({"moran", "lines", "killed", "ancestral-line"}));
  add_model_flags(simulate, o);
  simulate->add_option("--seed", o.seed, "random seed")->capture_default_str();
  simulate->add_option("--events", o.events, "jump-chain steps per replicate")->capture_default_str();
  simulate->add_option("--horizon", o.horizon, "particle-system time per replicate")->capture_default_str();
  simulate->add_option("--replicates", o.replicates, "independent replicates");
  simulate->add_option("--burn-in", o.burn_in, "discarded fraction")->capture_default_str();
  simulate->add_option("--n0", o.n0, "initial lines (killed)")->capture_default_str();
  simulate->add_option("--log", o.log_path, "write the event log of replicate 0 (ancestral-line)");
  add_output_flags(simulate, o, {"json", "csv", "svg"});

  // per-command defaults before parsing
  o.format = "json";
  auto defaults_for = [&](std::int64_t N, double s, double u, double nu1) {
    o.N = N;
    o.s = s;
    o.u = u;
    o.nu1 = nu1;
  };
  for (auto* cmd : {valid, simulate}) {
    cmd->preparse_callback([&](std::size_t) { defaults_for(50, 0.05, 0.02, 0.9); });
  }
  figure->preparse_callback([&](std::size_t) { o.format = "csv"; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    auto code = app.exit(e);
    return code == 0 ? 0 : k_exit_invalid;
  }

  try {
    if (*finite) { return run_finite(o); }
    if (*diffusion) { return run_diffusion(o); }
    if (*det) { return run_det(o); }
    if (*figure) { return run_figure_cmd(o, *figure); }
    if (*compare) { return run_compare(o, *compare); }
    if (*find_s) { return run_find_s(o); }
    if (*valid) { return run_validate(o); }
    if (*simulate) { return run_simulate(o); }
  } catch (const Invalid_input& e) {
    std::cerr << "error: " << e.what() << '\n';
    return k_exit_invalid;
  } catch (const Numeric_failure& e) {
    std::cerr << "error: " << e.what() << '\n';
    return k_exit_numeric;
  }
  return 0;
}
