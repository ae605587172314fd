#pragma once

// Exact stochastic simulation oracles.
//
//   simulate_moran           Gillespie simulation of the birth-death chain Y^N
//   simulate_line_counting   Gillespie simulation of the pLD-ASG line-counting chain L^N
//   simulate_killed_asg      absorption of the killed-ASG line-counting chain R^N
//
// The typed particle system and the ancestral-line tracer live in ancestral_line.hpp.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "ancline/errors.hpp"
#include "ancline/finite.hpp"
#include "ancline/params.hpp"
#include "ancline/rng.hpp"

namespace ancline {

struct Sim_config {
  std::uint64_t seed = 1;
  std::int64_t events = 1'000'000;  // jump-chain steps per replicate (chain simulators)
  double horizon = 20'000.0;        // model time per replicate (particle system)
  double burn_in = 0.1;             // discarded initial fraction (and trailing, for the tracer)
  std::int64_t replicates = 1;
  std::int64_t batches = 32;        // batch means per replicate
  std::int64_t min_events = 10;     // ancestral mutations required by the tracer
};

inline auto validate(const Sim_config& cfg) -> const Sim_config& {
  if (cfg.replicates < 1) { throw Invalid_parameter{"replicates must be >= 1"}; }
  if (!(cfg.burn_in >= 0.0 && cfg.burn_in <= 0.9)) {
    throw Invalid_parameter{"burn-in fraction must lie in [0, 0.9]"};
  }
  if (cfg.events < 1) { throw Invalid_parameter{"events must be >= 1"}; }
  if (!(cfg.horizon > 0.0)) { throw Invalid_parameter{"horizon must be > 0"}; }
  if (cfg.batches < 2) { throw Invalid_parameter{"batches must be >= 2"}; }
  return cfg;
}

struct Sim_estimate {
  double value = 0.0;
  double std_error = 0.0;
  double n = 0.0;  // events, replicates or batches behind the estimate

  // |value - target| within k standard errors
  auto within(double target, double k = 3.0) const -> bool {
    return std::abs(value - target) <= k * std_error;
  }
};

namespace detail {

// Mean and standard error of the mean over batch (or replicate) values.
inline auto mean_and_error(const std::vector<double>& xs) -> Sim_estimate {
  auto n = static_cast<double>(xs.size());
  auto mean = 0.0;
  for (auto x : xs) { mean += x; }
  mean /= n;
  auto ss = 0.0;
  for (auto x : xs) { ss += (x - mean) * (x - mean); }
  auto var = xs.size() > 1 ? ss / (n - 1.0) : 0.0;
  return {mean, std::sqrt(var / n), n};
}

// Time-weighted occupation of states 0..max_state, with batch means over equal event counts.
class Occupation_recorder {
 public:
  Occupation_recorder(std::size_t states, std::int64_t events_per_batch)
      : events_per_batch_{events_per_batch}, current_(states, 0.0), total_(states, 0.0) {}

  auto add(std::size_t state, double dt) -> void {
    current_[state] += dt;
    total_[state] += dt;
    current_time_ += dt;
    if (++events_in_batch_ == events_per_batch_) { close_batch(); }
  }

  // Occupation fractions and batch-means standard errors
  auto estimates() const -> std::vector<Sim_estimate> {
    auto total_time = 0.0;
    for (auto t : total_) { total_time += t; }
    auto out = std::vector<Sim_estimate>(total_.size());
    for (auto k = std::size_t{0}; k < total_.size(); ++k) {
      auto xs = std::vector<double>{};
      xs.reserve(batches_.size());
      for (const auto& b : batches_) { xs.push_back(b[k]); }
      auto est = mean_and_error(xs);
      out[k] = {total_[k] / total_time, est.std_error, static_cast<double>(batches_.size())};
    }
    return out;
  }

  // Same for P(state > n), n = 0..states-1
  auto tail_estimates() const -> std::vector<Sim_estimate> {
    auto total_time = 0.0;
    for (auto t : total_) { total_time += t; }
    auto out = std::vector<Sim_estimate>(total_.size());
    for (auto n = std::size_t{0}; n < total_.size(); ++n) {
      auto xs = std::vector<double>{};
      for (const auto& b : batches_) {
        auto tail = 0.0;
        for (auto k = n + 1; k < b.size(); ++k) { tail += b[k]; }
        xs.push_back(tail);
      }
      auto tail_time = 0.0;
      for (auto k = n + 1; k < total_.size(); ++k) { tail_time += total_[k]; }
      out[n] = {tail_time / total_time, mean_and_error(xs).std_error, static_cast<double>(batches_.size())};
    }
    return out;
  }

  auto total_time() const -> double {
    auto t = 0.0;
    for (auto x : total_) { t += x; }
    return t;
  }

 private:
  auto close_batch() -> void {
    for (auto& x : current_) { x /= current_time_; }
    batches_.push_back(current_);
    std::fill(current_.begin(), current_.end(), 0.0);
    current_time_ = 0.0;
    events_in_batch_ = 0;
  }

  std::int64_t events_per_batch_;
  std::int64_t events_in_batch_ = 0;
  double current_time_ = 0.0;
  std::vector<double> current_;
  std::vector<double> total_;
  std::vector<std::vector<double>> batches_;
};

inline auto sample_discrete(Rng& rng, const std::vector<double>& probs) -> std::size_t {
  auto x = rng.uniform();
  auto acc = 0.0;
  for (auto k = std::size_t{0}; k < probs.size(); ++k) {
    acc += probs[k];
    if (x < acc) { return k; }
  }
  return probs.size() - 1;
}

}  // namespace detail

// ---------------------------------------------------------------------------------------------

struct Moran_occupancy {
  std::vector<Sim_estimate> pi;  // k = 0..N
  double time = 0.0;             // post-burn-in model time
  std::int64_t events = 0;       // post-burn-in events
};

// The chain starts at round(N nu1) and the first burn_in fraction of the events is discarded.
inline auto simulate_moran(const Finite_params& p, const Sim_config& cfg) -> Moran_occupancy {
  validate(p);
  validate(cfg);
  auto burn = static_cast<std::int64_t>(cfg.burn_in * static_cast<double>(cfg.events));
  auto kept = cfg.events - burn;
  auto per_batch = std::max<std::int64_t>(1, kept / cfg.batches);
  auto rec = detail::Occupation_recorder{static_cast<std::size_t>(p.N + 1), per_batch};

  for (auto r = std::int64_t{0}; r < cfg.replicates; ++r) {
    auto rng = Rng{cfg.seed, static_cast<std::uint64_t>(r)};
    auto k = static_cast<std::int64_t>(std::lround(static_cast<double>(p.N) * p.nu1));
    for (auto e = std::int64_t{0}; e < cfg.events; ++e) {
      auto up = moran_up_rate(p, k);
      auto down = moran_down_rate(p, k);
      auto total = up + down;
      auto dt = rng.exponential(total);
      if (e >= burn) { rec.add(static_cast<std::size_t>(k), dt); }
      k += rng.uniform() * total < up ? 1 : -1;
    }
  }
  return {rec.estimates(), rec.total_time(), kept * cfg.replicates};
}

// Total variation distance between an empirical and an exact law
inline auto total_variation(const std::vector<Sim_estimate>& empirical, const std::vector<double>& exact)
    -> double {
  auto tv = 0.0;
  for (auto k = std::size_t{0}; k < exact.size(); ++k) { tv += std::abs(empirical[k].value - exact[k]); }
  return 0.5 * tv;
}

// ---------------------------------------------------------------------------------------------

struct Transition_counts {
  std::int64_t up = 0;
  std::int64_t down_one = 0;
  std::int64_t jump_lower = 0;  // to some j <= n-2

  auto total() const -> std::int64_t { return up + down_one + jump_lower; }
};

struct Line_occupancy {
  std::vector<Sim_estimate> w;     // n = 0..N (w[0] unused)
  std::vector<Sim_estimate> tail;  // P(L > n), n = 0..N
  std::vector<Transition_counts> transitions;  // jump-chain counts out of each state
  std::int64_t first_return_to_one = -1;       // event index of the first visit back to L = 1
};

inline auto simulate_line_counting(const Finite_params& p, const Sim_config& cfg) -> Line_occupancy {
  validate(p);
  validate(cfg);
  auto burn = static_cast<std::int64_t>(cfg.burn_in * static_cast<double>(cfg.events));
  auto kept = cfg.events - burn;
  auto per_batch = std::max<std::int64_t>(1, kept / cfg.batches);
  auto states = static_cast<std::size_t>(p.N + 1);
  auto rec = detail::Occupation_recorder{states, per_batch};
  auto out = Line_occupancy{};
  out.transitions.assign(states, {});

  for (auto r = std::int64_t{0}; r < cfg.replicates; ++r) {
    auto rng = Rng{cfg.seed, static_cast<std::uint64_t>(r)};
    auto n = std::int64_t{1};
    for (auto e = std::int64_t{0}; e < cfg.events; ++e) {
      auto rates = line_counting_rates(p, n);
      auto jumps = n >= 3 ? static_cast<double>(n - 2) * rates.jump_each : 0.0;
      auto total = rates.up + rates.down_one + jumps;
      if (total == 0.0) {  // s = 0 and L = 1: the chain stays put
        if (e >= burn) { rec.add(static_cast<std::size_t>(n), 1.0); }
        continue;
      }
      auto dt = rng.exponential(total);
      if (e >= burn) { rec.add(static_cast<std::size_t>(n), dt); }
      auto x = rng.uniform() * total;
      auto& counts = out.transitions[static_cast<std::size_t>(n)];
      if (x < rates.up) {
        ++counts.up;
        ++n;
      } else if (x < rates.up + rates.down_one) {
        ++counts.down_one;
        --n;
      } else {
        ++counts.jump_lower;
        n = 1 + static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(n - 2)));
      }
      if (n == 1 && out.first_return_to_one < 0) { out.first_return_to_one = e; }
    }
  }
  out.w = rec.estimates();
  out.tail = rec.tail_estimates();
  return out;
}

// ---------------------------------------------------------------------------------------------

// Fraction of killed-ASG chains started from n0 lines that are absorbed in 0 rather than in the
// cemetery; one independent stream per replicate.
inline auto simulate_killed_asg(const Finite_params& p, std::int64_t n0, const Sim_config& cfg)
    -> Sim_estimate {
  validate(p);
  validate(cfg);
  if (n0 < 1 || n0 > p.N) { throw Invalid_parameter{"n0 must lie in [1, N]"}; }
  auto N = static_cast<double>(p.N);
  auto absorbed_at_zero = std::int64_t{0};
  for (auto r = std::int64_t{0}; r < cfg.replicates; ++r) {
    auto rng = Rng{cfg.seed, static_cast<std::uint64_t>(r)};
    auto n = n0;
    while (true) {
      auto nd = static_cast<double>(n);
      auto up = p.s * nd * (N - nd) / N;
      auto down = nd * (nd - 1.0) / N + p.u * p.nu1 * nd;
      auto kill = p.u * p.nu0 * nd;
      auto x = rng.uniform() * (up + down + kill);
      if (x < up) {
        ++n;
      } else if (x < up + down) {
        if (--n == 0) {
          ++absorbed_at_zero;
          break;
        }
      } else {
        break;
      }
    }
  }
  auto R = static_cast<double>(cfg.replicates);
  auto frac = static_cast<double>(absorbed_at_zero) / R;
  return {frac, std::sqrt(frac * (1.0 - frac) / R), R};
}

}  // namespace ancline
