// Copyright 2026 The ndsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Attack search over relay scenarios.
//
// Every candidate is the same two-victim setup: initiator A at the origin,
// responder B at distance d along the x axis, and the direct A-B link blocked
// in one or both directions. The adversary is placed on the A-B segment (or as
// a wormhole with one end at each victim), relays with a given strategy and a
// minimum relay delay, and the run is checked for correctness violations.
//
// On-segment relays are snapped to the picosecond lattice at the protocol
// speed, so the relayed path rounds to exactly the same flight time as the
// direct path. Without that, per-leg rounding could make a relay path 1 ps
// shorter than the direct one.

#ifndef NDSIM_SEARCH_HPP
#define NDSIM_SEARCH_HPP

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "ndsim/adversary.hpp"
#include "ndsim/checkers.hpp"
#include "ndsim/engine.hpp"
#include "ndsim/scenario.hpp"
#include "ndsim/toml.hpp"

namespace ndsim {

class SearchError : public Error {
 public:
  using Error::Error;
};

enum class Placement { Midpoint, NearA, NearB, Wormhole };
enum class LinkMode { Symmetric, ForwardOnly, ReverseOnly };
enum class StrategyKind { RelayAll, MinDelay, OneDirection, Selective, Wormhole };

inline std::string_view to_string(Placement p) {
  switch (p) {
    case Placement::Midpoint: return "midpoint";
    case Placement::NearA: return "near_a";
    case Placement::NearB: return "near_b";
    case Placement::Wormhole: return "wormhole";
  }
  return "?";
}

inline std::string_view to_string(LinkMode m) {
  switch (m) {
    case LinkMode::Symmetric: return "symmetric";
    case LinkMode::ForwardOnly: return "forward_only";
    case LinkMode::ReverseOnly: return "reverse_only";
  }
  return "?";
}

inline std::string_view to_string(StrategyKind k) {
  static constexpr std::string_view names[] = {"relay_all", "min_delay", "one_direction", "selective", "wormhole"};
  return names[static_cast<int>(k)];
}

struct SearchSpace {
  ProtocolConfig protocol;
  std::vector<ChannelParams> channels{ChannelParams{}};
  double d_min_m = 1.0;
  double d_max_m = 99.0;
  double d_step_m = 1.0;
  std::vector<Placement> placements{Placement::Midpoint};
  std::vector<StrategyKind> strategies{StrategyKind::MinDelay};
  /// Also try victim pairs where exactly one direction is up.
  bool asymmetric_links = false;
  Picoseconds delta_min = 0;
  Picoseconds delta_max = 400'000;
  Picoseconds delta_step = 1'000;
  std::vector<Picoseconds> extra_deltas;
  Picoseconds tunnel_extra = 0;
  /// Let the adversary wait past delta_r when arriving early would give it
  /// away (location protocols).
  bool adaptive_hold = true;
  unsigned threads = 0;  // 0: hardware concurrency

  std::vector<double> distances() const {
    std::vector<double> out;
    if (d_step_m <= 0 || d_max_m <= d_min_m) {
      out.push_back(d_min_m);
      if (d_max_m > d_min_m) out.push_back(d_max_m);
      return out;
    }
    for (std::size_t k = 0;; ++k) {
      double const d = d_min_m + static_cast<double>(k) * d_step_m;
      if (d > d_max_m + 1e-9) break;
      out.push_back(d);
    }
    if (out.back() < d_max_m - 1e-9) out.push_back(d_max_m);
    return out;
  }

  std::vector<Picoseconds> deltas() const {
    std::vector<Picoseconds> out = extra_deltas;
    if (delta_step > 0) {
      for (Picoseconds d = delta_min; d <= delta_max; d += delta_step) out.push_back(d);
    } else {
      out.push_back(delta_min);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }
};

inline void validate_space(SearchSpace const& s) {
  validate_protocol(s.protocol);
  if (!(s.d_min_m > 0)) throw ConfigError("space.d_min_m must be > 0");
  if (s.d_max_m < s.d_min_m) throw ConfigError("space.d_max_m must be >= space.d_min_m");
  if (s.channels.empty()) throw ConfigError("space.channels must not be empty");
  for (auto const& c : s.channels) {
    if (!(c.v > 0) || !(c.v_adv > 0)) throw ConfigError("space.channels speeds must be > 0");
  }
  if (s.placements.empty()) throw ConfigError("space.placements must not be empty");
  if (s.strategies.empty()) throw ConfigError("space.strategies must not be empty");
  if (s.delta_max < s.delta_min) throw ConfigError("space.delta_max_ps must be >= space.delta_min_ps");
  if (s.tunnel_extra < 0) throw ConfigError("space.tunnel_extra_ps must be >= 0");
}

/// One adversary configuration, independent of distance and delay.
struct CandidateTemplate {
  std::size_t channel = 0;
  Placement placement = Placement::Midpoint;
  StrategyKind strategy = StrategyKind::MinDelay;
  LinkMode links = LinkMode::Symmetric;
  bool relay_from_responder = false;   // one_direction: relay what B originated
  MessageKind selected = MessageKind::Beacon;  // selective: the kind relayed

  std::string label() const {
    std::string s = std::string(to_string(placement)) + "/" + std::string(to_string(strategy));
    if (strategy == StrategyKind::OneDirection) s += relay_from_responder ? "(B->A)" : "(A->B)";
    if (strategy == StrategyKind::Selective) s += "(" + std::string(to_string(selected)) + ")";
    return s + "/" + std::string(to_string(links));
  }
};

inline std::vector<CandidateTemplate> enumerate_templates(SearchSpace const& s) {
  std::vector<LinkMode> modes{LinkMode::Symmetric};
  if (s.asymmetric_links) {
    modes.push_back(LinkMode::ForwardOnly);
    modes.push_back(LinkMode::ReverseOnly);
  }
  std::vector<MessageKind> kinds;
  if (is_beacon(s.protocol.kind)) {
    kinds = {MessageKind::Beacon};
  } else {
    kinds = {MessageKind::Challenge, MessageKind::Response};
  }
  std::vector<CandidateTemplate> out;
  for (std::size_t c = 0; c < s.channels.size(); ++c) {
    for (Placement p : s.placements) {
      for (StrategyKind k : s.strategies) {
        // A wormhole needs both ends; on-segment placements have one node.
        if ((p == Placement::Wormhole) != (k == StrategyKind::Wormhole)) continue;
        for (LinkMode m : modes) {
          CandidateTemplate t{c, p, k, m};
          if (k == StrategyKind::OneDirection) {
            for (bool from_b : {false, true}) {
              t.relay_from_responder = from_b;
              out.push_back(t);
            }
          } else if (k == StrategyKind::Selective) {
            for (MessageKind kind : kinds) {
              t.selected = kind;
              out.push_back(t);
            }
          } else {
            out.push_back(t);
          }
        }
      }
    }
  }
  return out;
}

/// Point on segment A-B, near `fraction` of the way, whose flight time from A
/// at `speed` is a whole number of ps.
inline Position lattice_point(double d, double fraction, double speed) {
  Picoseconds const ps = flight_time_ps(d * fraction, speed);
  double x = static_cast<double>(ps) * speed / kPsPerSecond;
  x = std::clamp(x, 0.0, d);
  return {x, 0.0};
}

/// Builds the finalized scenario for one candidate.
inline Scenario make_attack_scenario(SearchSpace const& s, CandidateTemplate const& t, double d, Picoseconds delta,
                                     Picoseconds hold = 0) {
  ChannelParams const ch = s.channels.at(t.channel);
  Scenario sc;
  WorldSource& w = sc.source;
  w.channel = ch;
  w.radio_range = std::max(1000.0, 4.0 * d);
  NodeId const a{0}, b{1};
  w.nodes.push_back(NodeSpec{a, "A", {0.0, 0.0}, Role::Correct, 0});
  w.nodes.push_back(NodeSpec{b, "B", {d, 0.0}, Role::Correct, 0});
  std::vector<NodeId> members;
  if (t.placement == Placement::Wormhole) {
    w.nodes.push_back(NodeSpec{NodeId{2}, "E1", {0.0, 0.0}, Role::Adversarial, 0});
    w.nodes.push_back(NodeSpec{NodeId{3}, "E2", {d, 0.0}, Role::Adversarial, 0});
    members = {NodeId{2}, NodeId{3}};
  } else {
    Position pos{0.0, 0.0};
    if (t.placement == Placement::Midpoint) pos = lattice_point(d, 0.5, ch.v);
    if (t.placement == Placement::NearB) pos = {d, 0.0};
    w.nodes.push_back(NodeSpec{NodeId{2}, "E", pos, Role::Adversarial, 0});
    members = {NodeId{2}};
  }
  // Every ordered pair gets an explicit schedule.
  auto link = [&](NodeId x, NodeId y, bool up) {
    w.links.push_back(LinkOverride{x, y, up ? std::vector<Interval>{Interval{0, kForever}} : std::vector<Interval>{}});
  };
  for (auto const& x : w.nodes) {
    for (auto const& y : w.nodes) {
      if (x.id == y.id) continue;
      bool up = false;
      bool const xa = x.id == a, xb = x.id == b, ya = y.id == a, yb = y.id == b;
      if (xa && yb) {
        up = t.links == LinkMode::ForwardOnly;
      } else if (xb && ya) {
        up = t.links == LinkMode::ReverseOnly;
      } else if (t.placement == Placement::Wormhole) {
        // E1 sits with A, E2 with B; the ends only talk through the tunnel.
        bool const x1 = x.name == "E1", y1 = y.name == "E1";
        up = (x1 && ya) || (y1 && xa) || (!x1 && !y1 && (xb || yb));
      } else {
        up = (xa || xb || ya || yb);
      }
      link(x.id, y.id, up);
    }
  }

  sc.protocol = s.protocol;
  sc.protocol.v = ch.v;
  AdversaryConfig adv;
  adv.members = members;
  adv.delta_r = delta;
  adv.hold = hold;
  adv.tunnel_extra = s.tunnel_extra;
  switch (t.strategy) {
    case StrategyKind::RelayAll: adv.strategy = RelayAll{}; break;
    case StrategyKind::MinDelay: adv.strategy = MinDelay{}; break;
    case StrategyKind::OneDirection:
      adv.strategy = t.relay_from_responder ? OneDirection{b, a} : OneDirection{a, b};
      break;
    case StrategyKind::Selective: adv.strategy = Selective{{t.selected}}; break;
    case StrategyKind::Wormhole: adv.strategy = Wormhole{NodeId{2}, NodeId{3}}; break;
  }
  sc.adversary = adv;
  sc.sessions.push_back(SessionSpec{a, b, 0, false});

  Picoseconds const flight = flight_time_ps(d, ch.v);
  Picoseconds const tunnel = flight_time_ps(d, ch.v_adv) + s.tunnel_extra;
  Picoseconds const per_relay = flight + tunnel + std::llabs(delta) + hold;
  sc.t_end = response_deadline_ps(sc.protocol, d) + s.protocol.proc_delay + 4 * per_relay + 1'000'000;
  sc.id = std::string(to_string(s.protocol.kind)) + "-" + t.label() + "-d" + toml::format_float(d) + "-delta" +
          std::to_string(delta);
  sc.finalize();
  return sc;
}

struct AttackWitness {
  Scenario scenario;
  std::uint64_t trace_digest = 0;
  Violation violation;
  std::uint64_t seed = 0;
  std::string label;
  double distance_m = 0.0;
  Picoseconds delta_r = 0;
};

namespace detail {

inline std::optional<Violation> first_correctness_violation(Trace const& trace, Scenario const& sc) {
  auto dist = check_distance_correctness(trace, sc.world, sc.protocol);
  if (!dist.violations.empty()) return dist.violations.front();
  auto link = check_link_correctness(trace, sc.world, sc.protocol);
  if (!link.violations.empty()) return link.violations.front();
  return std::nullopt;
}

inline std::optional<AttackWitness> try_scenario(Scenario sc, std::string const& label, double d, Picoseconds delta,
                                                 std::uint64_t seed, Trace* out_trace = nullptr) {
  sc.seed = seed;
  Simulation sim(sc);
  Trace trace = sim.run_until(sc.t_end);
  auto v = first_correctness_violation(trace, sc);
  if (out_trace) *out_trace = trace;
  if (!v) return std::nullopt;
  std::uint64_t const digest = trace_digest(trace, sc.world);
  return AttackWitness{std::move(sc), digest, *v, seed, label, d, delta};
}

}  // namespace detail

/// Simulates one candidate; with adaptive hold, a location-protocol relay that
/// arrives too early is retried with the adversary waiting out the deficit.
inline std::optional<AttackWitness> evaluate_candidate(SearchSpace const& s, CandidateTemplate const& t, double d,
                                                       Picoseconds delta, std::uint64_t seed = 0) {
  Trace trace;
  auto w = detail::try_scenario(make_attack_scenario(s, t, d, delta), t.label(), d, delta, seed, &trace);
  if (w || !s.adaptive_hold || !uses_location(s.protocol.kind)) return w;
  for (auto const& dec : trace.decisions) {
    if (dec.reason != DecisionReason::LocationMismatch || !dec.measured.elapsed_ps || !dec.measured.expected_ps) {
      continue;
    }
    Picoseconds const deficit = *dec.measured.expected_ps - *dec.measured.elapsed_ps;
    if (deficit <= 0) continue;
    // One relay on the evidence path absorbs all of it; two share it.
    for (Picoseconds hold : {deficit, deficit / 2}) {
      if (hold <= 0) continue;
      auto retry = detail::try_scenario(make_attack_scenario(s, t, d, delta, hold), t.label() + "+hold", d, delta, seed);
      if (retry) return retry;
    }
  }
  return std::nullopt;
}

/// Runs fn(i) for i in [0, n) on a small thread pool. fn must be thread-safe.
inline void parallel_for(std::size_t n, unsigned threads, std::function<void(std::size_t)> const& fn) {
  unsigned const hw = std::max(1u, std::thread::hardware_concurrency());
  unsigned const k = static_cast<unsigned>(std::min<std::size_t>(threads == 0 ? hw : threads, n));
  if (k <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < k; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < n;) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mu);
          if (!error) error = std::current_exception();
          next.store(n);
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

/// Exhaustive evaluation at one relay delay. Returns the witness with the
/// lowest candidate index, so the result does not depend on thread timing.
inline std::optional<AttackWitness> probe_delta(SearchSpace const& s, Picoseconds delta) {
  auto const templates = enumerate_templates(s);
  auto const dists = s.distances();
  std::size_t const n = templates.size() * dists.size();
  std::atomic<std::size_t> best{n};
  std::vector<std::optional<AttackWitness>> found(n);
  parallel_for(n, s.threads, [&](std::size_t i) {
    if (i > best.load()) return;
    auto w = evaluate_candidate(s, templates[i / dists.size()], dists[i % dists.size()], delta);
    if (!w) return;
    found[i] = std::move(w);
    std::size_t cur = best.load();
    while (i < cur && !best.compare_exchange_weak(cur, i)) {
    }
  });
  std::size_t const b = best.load();
  if (b == n) return std::nullopt;
  return found[b];
}

/// Random sampling: up to `budget` scenarios drawn deterministically from seed.
inline std::optional<AttackWitness> find_attack(SearchSpace const& s, std::size_t budget, std::uint64_t seed) {
  if (budget < 1) throw ConfigError("find_attack: budget must be >= 1");
  validate_space(s);
  auto const templates = enumerate_templates(s);
  if (templates.empty()) return std::nullopt;
  auto const deltas = s.deltas();
  std::mt19937_64 rng(seed);
  for (std::size_t trial = 0; trial < budget; ++trial) {
    auto const& t = templates[std::uniform_int_distribution<std::size_t>(0, templates.size() - 1)(rng)];
    double const d = s.d_max_m > s.d_min_m ? std::uniform_real_distribution<double>(s.d_min_m, s.d_max_m)(rng)
                                           : s.d_min_m;
    Picoseconds const delta = deltas[std::uniform_int_distribution<std::size_t>(0, deltas.size() - 1)(rng)];
    if (auto w = evaluate_candidate(s, t, d, delta, seed)) return w;
  }
  return std::nullopt;
}

inline constexpr std::size_t kExhaustiveCap = 1'000'000;

/// Every candidate at every grid delay; all witnesses in (delta, template,
/// distance) order.
inline std::vector<AttackWitness> exhaustive_scan(SearchSpace const& s) {
  validate_space(s);
  auto const templates = enumerate_templates(s);
  auto const dists = s.distances();
  auto const deltas = s.deltas();
  std::size_t const per_delta = templates.size() * dists.size();
  std::size_t const n = per_delta * deltas.size();
  if (n > kExhaustiveCap) {
    throw SearchError("exhaustive scan of " + std::to_string(n) + " scenarios exceeds the cap of " +
                      std::to_string(kExhaustiveCap));
  }
  std::vector<std::optional<AttackWitness>> found(n);
  parallel_for(n, s.threads, [&](std::size_t i) {
    std::size_t const di = i / per_delta;
    std::size_t const rest = i % per_delta;
    found[i] = evaluate_candidate(s, templates[rest / dists.size()], dists[rest % dists.size()], deltas[di]);
  });
  std::vector<AttackWitness> out;
  for (auto& w : found) {
    if (w) out.push_back(std::move(*w));
  }
  return out;
}

struct Probe {
  Picoseconds delta = 0;
  bool attack = false;
  std::string label;
};

struct ThresholdResult {
  ProtocolKind protocol = ProtocolKind::BT;
  Picoseconds min_safe_ps = 0;     // smallest probed delay with no attack
  Picoseconds last_attack_ps = 0;  // largest probed delay with an attack
  Picoseconds tol_ps = 0;
  std::string achieved_by;  // candidate that attacked at last_attack_ps
  std::optional<Picoseconds> analytic_target_ps;
  std::vector<Probe> probes;
  std::optional<AttackWitness> boundary_witness;
};

/// Idealized boundary (victims arbitrarily close) when the adversary medium
/// is no faster than the protocol's; nullopt otherwise.
inline std::optional<Picoseconds> analytic_target(SearchSpace const& s) {
  for (auto const& c : s.channels) {
    if (c.v_adv > c.v || c.v != s.channels.front().v) return std::nullopt;
  }
  ProtocolConfig cfg = s.protocol;
  cfg.v = s.channels.front().v;
  Picoseconds const thr = range_flight_ps(cfg);
  switch (cfg.kind) {
    case ProtocolKind::BT: return thr + cfg.eps_t;
    case ProtocolKind::CRT: return s.asymmetric_links ? 2 * thr + cfg.eps_t : thr + cfg.eps_t / 2;
    case ProtocolKind::BTL: return location_budget_ps(cfg);
    case ProtocolKind::CRTL: return s.asymmetric_links ? location_budget_ps(cfg) : location_budget_ps(cfg) / 2;
  }
  return std::nullopt;
}

/// Bisection on delta_r between a delay that admits an attack and one that
/// does not, each probe an exhaustive grid evaluation. Returns 0 when no
/// attack exists even at delta_r = 0.
inline ThresholdResult min_safe_relay_delay(SearchSpace const& s, Picoseconds tol) {
  validate_space(s);
  if (tol < 1) throw ConfigError("min_safe_relay_delay: tol must be >= 1 ps");
  ThresholdResult r;
  r.protocol = s.protocol.kind;
  r.tol_ps = tol;
  r.analytic_target_ps = analytic_target(s);

  Picoseconds max_attack = std::numeric_limits<Picoseconds>::min();
  Picoseconds min_safe = std::numeric_limits<Picoseconds>::max();
  auto probe = [&](Picoseconds delta) {
    auto w = probe_delta(s, delta);
    r.probes.push_back(Probe{delta, w.has_value(), w ? w->label : ""});
    if (w) {
      max_attack = std::max(max_attack, delta);
    } else {
      min_safe = std::min(min_safe, delta);
    }
    if (max_attack >= min_safe) {
      throw SearchError("non-monotone attack feasibility: attack at " + std::to_string(max_attack) +
                        " ps but none at " + std::to_string(min_safe) + " ps");
    }
    return w;
  };

  auto base = probe(0);
  if (!base) return r;
  Picoseconds lo = 0;
  std::optional<AttackWitness> lo_witness = std::move(base);
  Picoseconds hi = std::max<Picoseconds>(s.delta_max, tol);
  while (true) {
    auto w = probe(hi);
    if (!w) break;
    lo = hi;
    lo_witness = std::move(w);
    if (hi > kForever / 4) throw SearchError("no safe relay delay found below " + std::to_string(hi) + " ps");
    hi *= 2;
  }
  while (hi - lo > tol) {
    Picoseconds const mid = lo + (hi - lo) / 2;
    if (auto w = probe(mid)) {
      lo = mid;
      lo_witness = std::move(w);
    } else {
      hi = mid;
    }
  }
  r.min_safe_ps = hi;
  r.last_attack_ps = lo;
  r.achieved_by = lo_witness->label;
  r.boundary_witness = std::move(lo_witness);
  return r;
}

/// Re-simulates a witness; true iff the same violation and trace come back.
inline bool replay_witness(AttackWitness const& w) {
  Simulation sim(w.scenario);
  Trace const trace = sim.run_until(w.scenario.t_end);
  auto v = detail::first_correctness_violation(trace, w.scenario);
  return v && *v == w.violation && trace_digest(trace, w.scenario.world) == w.trace_digest;
}

}  // namespace ndsim

#endif  // NDSIM_SEARCH_HPP
