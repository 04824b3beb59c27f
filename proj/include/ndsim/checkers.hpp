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

// Post-hoc trace properties.
//
//   distance correctness  every accepted neighbor lies within R (+ tolerance)
//   link correctness      every accept is backed by at least one delivery
//                         that was not relayed
//   availability          declared neighbor pairs whose preconditions hold
//                         (links up over the exchange window, in range,
//                         clocks within sync bound) get accepted in time
//
// Availability preconditions are read from scenario ground truth, never from
// the trace.

#ifndef NDSIM_CHECKERS_HPP
#define NDSIM_CHECKERS_HPP

#include <optional>
#include <string>
#include <vector>

#include "ndsim/core_model.hpp"
#include "ndsim/protocols.hpp"
#include "ndsim/scenario.hpp"
#include "ndsim/trace.hpp"

namespace ndsim {

enum class ViolationKind { DistanceCorrectness, LinkCorrectness, Availability };

inline std::string_view to_string(ViolationKind k) {
  switch (k) {
    case ViolationKind::DistanceCorrectness: return "distance_correctness";
    case ViolationKind::LinkCorrectness: return "link_correctness";
    case ViolationKind::Availability: return "availability";
  }
  return "?";
}

struct Window {
  Picoseconds start = 0;
  Picoseconds end = 0;

  friend bool operator==(Window const&, Window const&) = default;
};

struct Violation {
  ViolationKind kind = ViolationKind::LinkCorrectness;
  NodeId decider;
  NodeId subject;
  std::optional<Decision> decision;  // absent for availability without a decision
  double actual_distance_m = 0.0;
  std::size_t chain_length = 0;  // shortest evidence chain; 0 when no evidence
  std::optional<Window> window;

  friend bool operator==(Violation const&, Violation const&) = default;
};

struct CheckStats {
  std::size_t decisions_checked = 0;
  std::size_t accepts = 0;
  std::size_t pairs_checked = 0;
  std::size_t precondition_unmet = 0;

  friend bool operator==(CheckStats const&, CheckStats const&) = default;
};

struct PropertyVerdict {
  ViolationKind property = ViolationKind::LinkCorrectness;
  bool applicable = true;
  bool holds = true;
  std::vector<Violation> violations;
  CheckStats stats;
  std::vector<std::string> notes;

  friend bool operator==(PropertyVerdict const&, PropertyVerdict const&) = default;
};

namespace detail {

inline void check_trace_matches(Trace const& trace, WorldConfig const& w) {
  for (auto const& t : trace.transmissions) {
    if (!w.contains(t.sender)) throw ConfigError("trace/world mismatch: unknown sender");
  }
  for (auto const& d : trace.deliveries) {
    if (!w.contains(d.receiver)) throw ConfigError("trace/world mismatch: unknown receiver");
  }
  for (auto const& d : trace.decisions) {
    if (!w.contains(d.decider) || !w.contains(d.subject)) throw ConfigError("trace/world mismatch: unknown decider");
  }
}

inline bool both_correct(WorldConfig const& w, Decision const& d) {
  return !w.is_adversarial(d.decider) && !w.is_adversarial(d.subject);
}

inline std::size_t shortest_chain(Trace const& trace, Decision const& d) {
  std::size_t best = 0;
  for (DeliveryId dv : d.evidence) {
    std::size_t const len = causal_chain(trace, dv).size();
    if (best == 0 || len < best) best = len;
  }
  return best;
}

inline std::vector<Decision const*> decisions_in_trace(Trace const& trace) {
  std::vector<Decision const*> out;
  for (auto const& e : trace.events) {
    if (e.kind == EventKind::Decision) out.push_back(&trace.decisions[e.index]);
  }
  return out;
}

}  // namespace detail

/// Slack absorbing the sub-ps rounding of the threshold and the flight times.
inline constexpr Picoseconds kRoundingSlackPs = 2;

inline PropertyVerdict check_distance_correctness(Trace const& trace, WorldConfig const& w, ProtocolConfig const& cfg) {
  detail::check_trace_matches(trace, w);
  PropertyVerdict v;
  v.property = ViolationKind::DistanceCorrectness;
  if (uses_location(cfg.kind)) {
    v.applicable = false;
    v.notes.push_back("not-applicable: location protocols have no ND range");
    return v;
  }
  double const bound = cfg.range_m + ps_to_meters(cfg.eps_t + kRoundingSlackPs, cfg.v);
  for (Decision const* d : detail::decisions_in_trace(trace)) {
    ++v.stats.decisions_checked;
    if (d->verdict != Verdict::Accept || !detail::both_correct(w, *d)) continue;
    ++v.stats.accepts;
    double const actual = distance(w.node(d->decider).pos, w.node(d->subject).pos);
    if (actual > bound) {
      v.violations.push_back(Violation{ViolationKind::DistanceCorrectness, d->decider, d->subject, *d, actual,
                                       detail::shortest_chain(trace, *d), std::nullopt});
    }
  }
  v.holds = v.violations.empty();
  return v;
}

inline PropertyVerdict check_link_correctness(Trace const& trace, WorldConfig const& w, ProtocolConfig const&) {
  detail::check_trace_matches(trace, w);
  PropertyVerdict v;
  v.property = ViolationKind::LinkCorrectness;
  for (Decision const* d : detail::decisions_in_trace(trace)) {
    ++v.stats.decisions_checked;
    if (d->verdict != Verdict::Accept || !detail::both_correct(w, *d)) continue;
    ++v.stats.accepts;
    std::size_t const chain = detail::shortest_chain(trace, *d);
    if (chain > 1) {
      double const actual = distance(w.node(d->decider).pos, w.node(d->subject).pos);
      v.violations.push_back(
          Violation{ViolationKind::LinkCorrectness, d->decider, d->subject, *d, actual, chain, std::nullopt});
    }
  }
  v.holds = v.violations.empty();
  return v;
}

/// Exchange window of a session over ground-truth delays: one flight for
/// beacons; challenge flight, turnaround and response flight for CR.
inline Window exchange_window(SessionSpec const& s, WorldConfig const& w, ProtocolConfig const& cfg) {
  Picoseconds const fwd = propagation_delay(s.initiator, s.responder, w);
  if (is_beacon(cfg.kind)) return {s.t_start, s.t_start + fwd};
  Picoseconds const rev = propagation_delay(s.responder, s.initiator, w);
  return {s.t_start, s.t_start + fwd + cfg.proc_delay + rev};
}

/// Reasons the availability hypothesis fails for a session; empty when it holds.
inline std::vector<std::string> unmet_preconditions(SessionSpec const& s, WorldConfig const& w,
                                                    ProtocolConfig const& cfg) {
  std::vector<std::string> unmet;
  NodeSpec const& a = w.node(s.initiator);
  NodeSpec const& b = w.node(s.responder);
  Picoseconds const fwd = propagation_delay(a.id, b.id, w);
  Picoseconds const rev = propagation_delay(b.id, a.id, w);
  if (!w.link_up_over(a.id, b.id, s.t_start, s.t_start + fwd)) unmet.push_back("link " + a.name + "->" + b.name + " down");
  if (!is_beacon(cfg.kind)) {
    Picoseconds const t_resp = s.t_start + fwd + cfg.proc_delay;
    if (!w.link_up_over(b.id, a.id, t_resp, t_resp + rev)) unmet.push_back("link " + b.name + "->" + a.name + " down");
  }
  if (!uses_location(cfg.kind)) {
    if (distance(a.pos, b.pos) > cfg.range_m) unmet.push_back("pair beyond range");
    Picoseconds const budget = is_beacon(cfg.kind) ? range_flight_ps(cfg) + cfg.eps_t
                                                   : 2 * range_flight_ps(cfg) + cfg.eps_t;
    Picoseconds const needed = is_beacon(cfg.kind) ? fwd : fwd + rev;
    if (needed > budget) unmet.push_back("nlos delay exceeds time tolerance");
  }
  if (is_beacon(cfg.kind) && std::llabs(a.clock_offset - b.clock_offset) > cfg.eps_sync) {
    unmet.push_back("clock offset difference exceeds eps_sync");
  }
  return unmet;
}

inline PropertyVerdict check_availability(Trace const& trace, Scenario const& s) {
  WorldConfig const& w = s.world;
  ProtocolConfig const& cfg = s.protocol;
  detail::check_trace_matches(trace, w);
  if (s.sessions.empty() && !trace.decisions.empty()) throw ConfigError("scenario/trace mismatch: no sessions");
  PropertyVerdict v;
  v.property = ViolationKind::Availability;
  v.notes.push_back("window-based availability: accept required by the end of one exchange");
  auto const decisions = detail::decisions_in_trace(trace);
  for (std::size_t i = 0; i < s.sessions.size(); ++i) {
    SessionSpec const& spec = s.sessions[i];
    if (!spec.expect_available) continue;
    ++v.stats.pairs_checked;
    auto const unmet = unmet_preconditions(spec, w, cfg);
    if (!unmet.empty()) {
      ++v.stats.precondition_unmet;
      std::string note = "precondition-unmet: session " + std::to_string(i) + ":";
      for (auto const& u : unmet) note += " " + u + ";";
      v.notes.push_back(note);
      continue;
    }
    Window const win = exchange_window(spec, w, cfg);
    NodeId const decider = is_beacon(cfg.kind) ? spec.responder : spec.initiator;
    NodeId const subject = is_beacon(cfg.kind) ? spec.initiator : spec.responder;
    Decision const* found = nullptr;
    bool accepted = false;
    for (Decision const* d : decisions) {
      if (d->session != i) continue;
      found = d;
      accepted = d->verdict == Verdict::Accept && d->t_decided <= win.end;
    }
    if (accepted) {
      ++v.stats.accepts;
      continue;
    }
    Violation viol{ViolationKind::Availability, decider, subject, std::nullopt,
                   distance(w.node(decider).pos, w.node(subject).pos), 0, win};
    if (found != nullptr) viol.decision = *found;
    v.violations.push_back(std::move(viol));
  }
  v.holds = v.violations.empty();
  return v;
}

/// Distance correctness, link correctness, availability, in that order.
inline std::vector<PropertyVerdict> check_all(Trace const& trace, Scenario const& s) {
  return {check_distance_correctness(trace, s.world, s.protocol), check_link_correctness(trace, s.world, s.protocol),
          check_availability(trace, s)};
}

}  // namespace ndsim

#endif  // NDSIM_CHECKERS_HPP
