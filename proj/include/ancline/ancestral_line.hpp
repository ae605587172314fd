#pragma once

// Forward typed Moran particle system with a recorded event log, and backward tracing of the
// true ancestral line of a sampled individual through the effective reproduction events.
//
// Event semantics (lines are 0-based in memory, 1-based in the text dump):
//   neutral      every ordered pair (source, target) at rate 1/N; target takes the source type
//   selective    every ordered pair at rate s/N; used only when the source has type 0
//   beneficial   every line at rate u nu0; the line becomes type 0
//   deleterious  every line at rate u nu1; the line becomes type 1
// Arrows pointing to their own tails have no effect and are not logged.  For arrows the flag
// records whether the event was used; for marks it records whether the type changed.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "ancline/errors.hpp"
#include "ancline/finite.hpp"
#include "ancline/params.hpp"
#include "ancline/rng.hpp"
#include "ancline/simulate.hpp"

namespace ancline {

enum class Event_kind : std::uint8_t { neutral, selective, beneficial, deleterious };

inline auto to_string(Event_kind kind) -> const char* {
  switch (kind) {
    case Event_kind::neutral: return "neutral";
    case Event_kind::selective: return "selective";
    case Event_kind::beneficial: return "beneficial";
    case Event_kind::deleterious: return "deleterious";
  }
  return "?";
}

struct Ips_event {
  double time;
  std::uint32_t source;  // equals target for marks
  std::uint32_t target;
  Event_kind kind;
  bool flag;

  auto is_arrow() const -> bool { return kind == Event_kind::neutral || kind == Event_kind::selective; }
};

struct Event_log {
  std::int64_t N = 0;
  double horizon = 0.0;
  std::vector<std::uint8_t> initial_types;
  std::vector<std::uint8_t> final_types;
  std::vector<Ips_event> events;
};

// Samples Y from pi and assigns type 1 to a uniformly chosen Y-subset of the lines.
inline auto sample_initial_types(const Finite_params& p, const std::vector<double>& pi, Rng& rng)
    -> std::vector<std::uint8_t> {
  auto y = detail::sample_discrete(rng, pi);
  auto types = std::vector<std::uint8_t>(static_cast<std::size_t>(p.N), 0);
  std::fill_n(types.begin(), y, std::uint8_t{1});
  for (auto i = types.size(); i > 1; --i) {
    std::swap(types[i - 1], types[rng.below(i)]);
  }
  return types;
}

inline auto simulate_ips(const Finite_params& p, double horizon, std::vector<std::uint8_t> types, Rng& rng)
    -> Event_log {
  validate(p);
  auto N = static_cast<std::uint64_t>(p.N);
  auto Nd = static_cast<double>(p.N);
  auto log = Event_log{p.N, horizon, types, {}, {}};
  auto r_neutral = Nd;
  auto r_selective = Nd * p.s;
  auto r_beneficial = Nd * p.u * p.nu0;
  auto r_total = r_neutral + r_selective + Nd * p.u;
  log.events.reserve(static_cast<std::size_t>(1.05 * horizon * r_total) + 16);

  auto t = 0.0;
  while (true) {
    t += rng.exponential(r_total);
    if (t >= horizon) { break; }
    auto x = rng.uniform() * r_total;
    if (x < r_neutral + r_selective) {
      auto source = static_cast<std::uint32_t>(rng.below(N));
      auto target = static_cast<std::uint32_t>(rng.below(N));
      if (source == target) { continue; }
      auto kind = x < r_neutral ? Event_kind::neutral : Event_kind::selective;
      auto used = kind == Event_kind::neutral || types[source] == 0;
      if (used) { types[target] = types[source]; }
      log.events.push_back({t, source, target, kind, used});
    } else {
      auto line = static_cast<std::uint32_t>(rng.below(N));
      auto beneficial = x < r_neutral + r_selective + r_beneficial;
      auto new_type = static_cast<std::uint8_t>(beneficial ? 0 : 1);
      auto changed = types[line] != new_type;
      types[line] = new_type;
      log.events.push_back(
          {t, line, line, beneficial ? Event_kind::beneficial : Event_kind::deleterious, changed});
    }
  }
  log.final_types = std::move(types);
  return log;
}

// Replays the log forward from its initial configuration and checks every flag and the final
// configuration.  Returns the index of the first inconsistent event, or -1 if the log is
// consistent (events.size() flags a final-configuration mismatch).
inline auto replay_check(const Event_log& log) -> std::int64_t {
  auto types = log.initial_types;
  auto prev_time = 0.0;
  for (auto i = std::size_t{0}; i < log.events.size(); ++i) {
    const auto& e = log.events[i];
    if (!(e.time > prev_time) || e.source >= types.size() || e.target >= types.size()) {
      return static_cast<std::int64_t>(i);
    }
    prev_time = e.time;
    switch (e.kind) {
      case Event_kind::neutral:
        if (!e.flag || e.source == e.target) { return static_cast<std::int64_t>(i); }
        types[e.target] = types[e.source];
        break;
      case Event_kind::selective:
        if (e.flag != (types[e.source] == 0) || e.source == e.target) { return static_cast<std::int64_t>(i); }
        if (e.flag) { types[e.target] = types[e.source]; }
        break;
      case Event_kind::beneficial:
      case Event_kind::deleterious: {
        auto new_type = static_cast<std::uint8_t>(e.kind == Event_kind::beneficial ? 0 : 1);
        if (e.flag != (types[e.target] != new_type)) { return static_cast<std::int64_t>(i); }
        types[e.target] = new_type;
        break;
      }
    }
  }
  return types == log.final_types ? -1 : static_cast<std::int64_t>(log.events.size());
}

// One event per line: time, kind, source, target (1-based), flag.
inline auto write_event_log(std::ostream& os, const Event_log& log) -> void {
  char buf[64];
  os << "# N " << log.N << '\n';
  std::snprintf(buf, sizeof buf, "%.17g", log.horizon);
  os << "# horizon " << buf << '\n';
  os << "# initial";
  for (auto t : log.initial_types) { os << ' ' << static_cast<int>(t); }
  os << '\n';
  for (const auto& e : log.events) {
    std::snprintf(buf, sizeof buf, "%.17g", e.time);
    os << buf << ' ' << to_string(e.kind) << ' ' << e.source + 1 << ' ' << e.target + 1 << ' '
       << (e.flag ? 1 : 0) << '\n';
  }
}

// Piecewise-constant state of the ancestral line: points[i] holds on [points[i].time,
// points[i+1].time), the last point up to the horizon.
struct Lineage_point {
  double time;
  std::uint32_t line;
  std::uint8_t type;

  auto operator==(const Lineage_point&) const -> bool = default;
};

struct Ancestral_path {
  double horizon = 0.0;
  std::vector<Lineage_point> points;

  auto operator==(const Ancestral_path&) const -> bool = default;
};

// Follows the individual on `line` at the horizon back to time 0: an effective arrow onto the
// current line moves the lineage to the arrow's source, an effective mark flips the type.
inline auto trace_ancestral_line(const Event_log& log, std::uint32_t line) -> Ancestral_path {
  auto path = Ancestral_path{log.horizon, {}};
  auto current = line;
  auto type = log.final_types.at(line);
  for (auto i = log.events.size(); i-- > 0;) {
    const auto& e = log.events[i];
    if (e.target != current || !e.flag) { continue; }
    if (e.is_arrow()) {
      path.points.push_back({e.time, current, type});
      current = e.source;
    } else {
      path.points.push_back({e.time, current, type});
      type = static_cast<std::uint8_t>(1 - type);
    }
  }
  path.points.push_back({0.0, current, type});
  std::ranges::reverse(path.points);
  return path;
}

struct Window_counts {
  double length = 0.0;
  double time_type1 = 0.0;
  std::int64_t changes10 = 0;  // 1 -> 0 (beneficial) on the ancestral line
  std::int64_t changes01 = 0;  // 0 -> 1 (deleterious)
};

inline auto count_in_window(const Ancestral_path& path, double lo, double hi) -> Window_counts {
  auto out = Window_counts{hi - lo, 0.0, 0, 0};
  for (auto i = std::size_t{0}; i < path.points.size(); ++i) {
    const auto& pt = path.points[i];
    auto end = i + 1 < path.points.size() ? path.points[i + 1].time : path.horizon;
    auto a = std::max(pt.time, lo);
    auto b = std::min(end, hi);
    if (pt.type == 1 && b > a) { out.time_type1 += b - a; }
    if (i > 0 && pt.time >= lo && pt.time < hi && pt.type != path.points[i - 1].type) {
      (pt.type == 0 ? out.changes10 : out.changes01) += 1;
    }
  }
  return out;
}

struct Ancestral_line_estimates {
  Sim_estimate pA1;
  Sim_estimate f10;
  Sim_estimate f01;
  Sim_estimate q10;
  Sim_estimate q01;
  std::int64_t changes10 = 0;
  std::int64_t changes01 = 0;
  double window_time = 0.0;
};

namespace detail {

// Ratio estimator sum(c)/sum(t) with its linearization standard error
inline auto ratio_estimate(const std::vector<double>& c, const std::vector<double>& t) -> Sim_estimate {
  auto R = static_cast<double>(c.size());
  auto sc = 0.0;
  auto st = 0.0;
  for (auto i = std::size_t{0}; i < c.size(); ++i) {
    sc += c[i];
    st += t[i];
  }
  if (!(st > 0.0)) { return {0.0, 0.0, R}; }
  auto ratio = sc / st;
  auto ss = 0.0;
  for (auto i = std::size_t{0}; i < c.size(); ++i) {
    auto d = c[i] - ratio * t[i];
    ss += d * d;
  }
  auto mean_t = st / R;
  auto se = c.size() > 1 ? std::sqrt(ss / (R * (R - 1.0))) / mean_t : 0.0;
  return {ratio, se, R};
}

}  // namespace detail

// Each replicate: stationary initial types, a particle system run over [0, horizon], a uniformly
// sampled individual at the horizon, and its ancestral line counted on the central window
// [burn_in * horizon, (1 - burn_in) * horizon].
inline auto simulate_ancestral_line(const Finite_params& p, const Sim_config& cfg)
    -> Ancestral_line_estimates {
  validate(p);
  validate(cfg);
  auto pi = moran_stationary(p);
  auto lo = cfg.burn_in * cfg.horizon;
  auto hi = (1.0 - cfg.burn_in) * cfg.horizon;
  if (!(hi > lo)) { throw Invalid_parameter{"burn-in leaves an empty window"}; }

  auto R = static_cast<std::size_t>(cfg.replicates);
  auto frac1 = std::vector<double>(R);
  auto rate10 = std::vector<double>(R);
  auto rate01 = std::vector<double>(R);
  auto c10 = std::vector<double>(R);
  auto c01 = std::vector<double>(R);
  auto t1 = std::vector<double>(R);
  auto t0 = std::vector<double>(R);
  auto out = Ancestral_line_estimates{};

  for (auto r = std::size_t{0}; r < R; ++r) {
    auto rng = Rng{cfg.seed, r};
    auto types = sample_initial_types(p, pi, rng);
    auto log = simulate_ips(p, cfg.horizon, std::move(types), rng);
    auto sampled = static_cast<std::uint32_t>(rng.below(static_cast<std::uint64_t>(p.N)));
    auto counts = count_in_window(trace_ancestral_line(log, sampled), lo, hi);
    frac1[r] = counts.time_type1 / counts.length;
    rate10[r] = static_cast<double>(counts.changes10) / counts.length;
    rate01[r] = static_cast<double>(counts.changes01) / counts.length;
    c10[r] = static_cast<double>(counts.changes10);
    c01[r] = static_cast<double>(counts.changes01);
    t1[r] = counts.time_type1;
    t0[r] = counts.length - counts.time_type1;
    out.changes10 += counts.changes10;
    out.changes01 += counts.changes01;
    out.window_time += counts.length;
  }
  if (out.changes10 + out.changes01 < cfg.min_events) {
    throw Window_too_short{"only " + std::to_string(out.changes10 + out.changes01) +
                           " ancestral mutations observed; lengthen the horizon or add replicates"};
  }
  out.pA1 = detail::mean_and_error(frac1);
  out.f10 = detail::mean_and_error(rate10);
  out.f01 = detail::mean_and_error(rate01);
  out.q10 = detail::ratio_estimate(c10, t1);
  out.q01 = detail::ratio_estimate(c01, t0);
  return out;
}

}  // namespace ancline
