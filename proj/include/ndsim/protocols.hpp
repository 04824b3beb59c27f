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

// Neighbor-discovery protocols and their decision rules.
//
//   BT    one-way beacon, time of flight against the range R
//   BTL   one-way beacon, time of flight against the claimed location
//   CRT   challenge-response round trip against 2R
//   CRTL  challenge-response round trip against the claimed location
//
// Beacon protocols read two clocks (sender's timestamp, receiver's arrival
// time), so they depend on synchronization. Challenge-response protocols read
// a single clock at the challenger.
//
// Location comparisons are carried out in the time domain: the claimed
// distance is converted to whole picoseconds with the same rounding the
// channel uses, so a direct line-of-sight exchange matches exactly.

#ifndef NDSIM_PROTOCOLS_HPP
#define NDSIM_PROTOCOLS_HPP

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "ndsim/core_model.hpp"
#include "ndsim/message.hpp"

namespace ndsim {

enum class ProtocolKind { BT, BTL, CRT, CRTL };

inline bool is_beacon(ProtocolKind k) { return k == ProtocolKind::BT || k == ProtocolKind::BTL; }
inline bool uses_location(ProtocolKind k) { return k == ProtocolKind::BTL || k == ProtocolKind::CRTL; }

inline std::string_view to_string(ProtocolKind k) {
  switch (k) {
    case ProtocolKind::BT: return "BT";
    case ProtocolKind::BTL: return "BTL";
    case ProtocolKind::CRT: return "CRT";
    case ProtocolKind::CRTL: return "CRTL";
  }
  return "?";
}

inline std::optional<ProtocolKind> parse_protocol(std::string_view s) {
  if (s == "BT") return ProtocolKind::BT;
  if (s == "BTL") return ProtocolKind::BTL;
  if (s == "CRT") return ProtocolKind::CRT;
  if (s == "CRTL") return ProtocolKind::CRTL;
  return std::nullopt;
}

struct ProtocolConfig {
  ProtocolKind kind = ProtocolKind::BT;
  double range_m = 100.0;  // R; ignored by BTL/CRTL
  double v = kSpeedOfLight;
  Picoseconds eps_t = 1'000;
  double eps_d = 0.10;  // meters
  Picoseconds eps_sync = 1'000;
  Picoseconds proc_delay = 1'000'000;
  /// Overrides the challenger's response deadline (relative to the challenge).
  std::optional<Picoseconds> timeout;

  friend bool operator==(ProtocolConfig const&, ProtocolConfig const&) = default;
};

inline void validate_protocol(ProtocolConfig const& cfg) {
  if (!uses_location(cfg.kind) && !(cfg.range_m > 0)) throw ConfigError("protocol.range_m must be > 0");
  if (!(cfg.v > 0)) throw ConfigError("protocol speed must be > 0");
  if (cfg.eps_t < 0) throw ConfigError("protocol.eps_t_ps must be >= 0");
  if (!(cfg.eps_d >= 0)) throw ConfigError("protocol.eps_d_m must be >= 0");
  if (cfg.eps_sync < 0) throw ConfigError("protocol.eps_sync_ps must be >= 0");
  if (cfg.proc_delay < 0) throw ConfigError("protocol.proc_delay_ps must be >= 0");
  if (cfg.timeout && *cfg.timeout < 0) throw ConfigError("protocol.timeout_ps must be >= 0");
}

/// One-way flight over the ND range, R/v in whole ps.
inline Picoseconds range_flight_ps(ProtocolConfig const& cfg) { return flight_time_ps(cfg.range_m, cfg.v); }

/// Time-domain form of eps_d: one-way for beacons, round trip for CR.
inline Picoseconds location_budget_ps(ProtocolConfig const& cfg) {
  return distance_budget_ps(is_beacon(cfg.kind) ? cfg.eps_d : 2.0 * cfg.eps_d, cfg.v);
}

enum class Verdict { Accept, Reject };

inline std::string_view to_string(Verdict v) { return v == Verdict::Accept ? "accept" : "reject"; }

enum class DecisionReason { WithinBound, BeyondBound, Anachronistic, LocationMismatch, Timeout };

inline std::string_view to_string(DecisionReason r) {
  switch (r) {
    case DecisionReason::WithinBound: return "within_bound";
    case DecisionReason::BeyondBound: return "beyond_bound";
    case DecisionReason::Anachronistic: return "anachronistic";
    case DecisionReason::LocationMismatch: return "location_mismatch";
    case DecisionReason::Timeout: return "timeout";
  }
  return "?";
}

struct Measurement {
  std::optional<Picoseconds> elapsed_ps;  // one-way (B) or net round trip (CR)
  std::optional<double> d_tof_m;
  std::optional<double> d_loc_m;
  std::optional<Picoseconds> expected_ps;  // TL: elapsed a direct exchange would show

  friend bool operator==(Measurement const&, Measurement const&) = default;
};

/// Outcome of a decision rule, before it is attached to a session.
struct Ruling {
  Verdict verdict = Verdict::Reject;
  DecisionReason reason = DecisionReason::BeyondBound;
  Measurement measured;
};

struct Decision {
  NodeId decider;
  NodeId subject;
  Verdict verdict = Verdict::Reject;
  DecisionReason reason = DecisionReason::BeyondBound;
  Picoseconds t_decided = 0;
  std::vector<DeliveryId> evidence;
  Measurement measured;
  std::size_t session = 0;

  friend bool operator==(Decision const&, Decision const&) = default;
};

// --- decision rules -----------------------------------------------------------

inline Ruling bt_decide(Picoseconds t_send_claimed, Picoseconds t_recv_local, ProtocolConfig const& cfg) {
  Picoseconds const elapsed = t_recv_local - t_send_claimed;
  Ruling r;
  r.measured.elapsed_ps = elapsed;
  r.measured.d_tof_m = ps_to_meters(elapsed, cfg.v);
  if (elapsed < -cfg.eps_t) {
    r.reason = DecisionReason::Anachronistic;
  } else if (elapsed <= range_flight_ps(cfg) + cfg.eps_t) {
    r.verdict = Verdict::Accept;
    r.reason = DecisionReason::WithinBound;
  }
  return r;
}

namespace detail {

inline Ruling location_rule(Picoseconds elapsed, Picoseconds expected, double d_tof, double d_loc,
                            Picoseconds budget) {
  Ruling r;
  r.measured.elapsed_ps = elapsed;
  r.measured.expected_ps = expected;
  r.measured.d_tof_m = d_tof;
  r.measured.d_loc_m = d_loc;
  r.reason = DecisionReason::LocationMismatch;
  if (elapsed < -budget) {
    r.reason = DecisionReason::Anachronistic;
  } else if (elapsed - expected <= budget && expected - elapsed <= budget) {
    r.verdict = Verdict::Accept;
    r.reason = DecisionReason::WithinBound;
  }
  return r;
}

}  // namespace detail

inline Ruling btl_decide(Picoseconds t_send_claimed, Position loc_claimed, Picoseconds t_recv_local,
                         Position loc_self, ProtocolConfig const& cfg) {
  Picoseconds const elapsed = t_recv_local - t_send_claimed;
  double const d_loc = distance(loc_claimed, loc_self);
  return detail::location_rule(elapsed, flight_time_ps(d_loc, cfg.v), ps_to_meters(elapsed, cfg.v), d_loc,
                               location_budget_ps(cfg));
}

inline Ruling crt_decide(Picoseconds t_challenge, Picoseconds t_response_recv, ProtocolConfig const& cfg) {
  Picoseconds const rtt_net = t_response_recv - t_challenge - cfg.proc_delay;
  Ruling r;
  r.measured.elapsed_ps = rtt_net;
  r.measured.d_tof_m = ps_to_meters(rtt_net, cfg.v) / 2.0;
  if (rtt_net < -cfg.eps_t) {
    r.reason = DecisionReason::Anachronistic;
  } else if (rtt_net <= 2 * range_flight_ps(cfg) + cfg.eps_t) {
    r.verdict = Verdict::Accept;
    r.reason = DecisionReason::WithinBound;
  }
  return r;
}

inline Ruling crtl_decide(Picoseconds t_challenge, Picoseconds t_response_recv, Position loc_claimed,
                          Position loc_self, ProtocolConfig const& cfg) {
  Picoseconds const rtt_net = t_response_recv - t_challenge - cfg.proc_delay;
  double const d_loc = distance(loc_claimed, loc_self);
  return detail::location_rule(rtt_net, 2 * flight_time_ps(d_loc, cfg.v), ps_to_meters(rtt_net, cfg.v) / 2.0,
                               d_loc, location_budget_ps(cfg));
}

/// How long a challenger waits for the response, measured from the challenge.
/// `max_distance_m` bounds the distance of any genuine responder (used by
/// CRTL, which has no range).
inline Picoseconds response_deadline_ps(ProtocolConfig const& cfg, double max_distance_m) {
  if (cfg.timeout) return *cfg.timeout;
  if (cfg.kind == ProtocolKind::CRTL) {
    return cfg.proc_delay + 2 * flight_time_ps(max_distance_m, cfg.v) + location_budget_ps(cfg);
  }
  return cfg.proc_delay + 2 * range_flight_ps(cfg) + cfg.eps_t;
}

// --- session state machine -----------------------------------------------------

struct Idle {};

struct AwaitingResponse {
  Nonce nonce;
  Picoseconds t_challenge_local = 0;
};

struct Done {
  Decision decision;
};

using SessionState = std::variant<Idle, AwaitingResponse, Done>;

struct SessionStart {
  Picoseconds t = 0;
};

struct MessageArrival {
  DeliveryId dv = 0;
  AuthenticatedMessage const* msg = nullptr;
  Picoseconds t_arrival = 0;
};

struct TimerFired {
  Picoseconds t = 0;
};

using SessionEvent = std::variant<SessionStart, MessageArrival, TimerFired>;

/// Both endpoints of a session. Each rule only reads its own endpoint's clock
/// and location.
struct SessionContext {
  std::size_t session = 0;
  NodeSpec const* initiator = nullptr;
  NodeSpec const* responder = nullptr;
  NonceRegistry* nonces = nullptr;
  double max_distance_m = 0.0;
};

struct Transmit {
  NodeId sender;
  AuthenticatedMessage msg;
  Picoseconds t_send = 0;
};

struct ArmTimer {
  Picoseconds t = 0;
};

struct Decide {
  Decision decision;
};

using Action = std::variant<Transmit, ArmTimer, Decide>;

inline NodeId decider_of(ProtocolKind k, SessionContext const& ctx) {
  return is_beacon(k) ? ctx.responder->id : ctx.initiator->id;
}

inline NodeId subject_of(ProtocolKind k, SessionContext const& ctx) {
  return is_beacon(k) ? ctx.initiator->id : ctx.responder->id;
}

namespace detail {

inline Decision make_decision(ProtocolKind k, SessionContext const& ctx, Ruling const& r, Picoseconds t,
                              std::vector<DeliveryId> evidence) {
  Decision d;
  d.decider = decider_of(k, ctx);
  d.subject = subject_of(k, ctx);
  d.verdict = r.verdict;
  d.reason = r.reason;
  d.t_decided = t;
  d.evidence = std::move(evidence);
  d.measured = r.measured;
  d.session = ctx.session;
  return d;
}

}  // namespace detail

/// Advances one session. Beacon sessions emit the initiator's beacon on start
/// and decide at the responder on the first verified beacon. CR sessions emit
/// a challenge with a fresh nonce, arm a deadline, and decide on the first
/// verified response that echoes the live nonce.
inline std::pair<SessionState, std::vector<Action>> drive(SessionState const& state, SessionEvent const& event,
                                                           ProtocolConfig const& cfg, SessionContext const& ctx) {
  std::vector<Action> actions;
  NodeSpec const& init = *ctx.initiator;
  NodeSpec const& resp = *ctx.responder;
  bool const tl = uses_location(cfg.kind);

  if (auto const* start = std::get_if<SessionStart>(&event)) {
    if (!std::holds_alternative<Idle>(state)) return {state, actions};
    if (is_beacon(cfg.kind)) {
      Beacon b{init.id, start->t + init.clock_offset, tl ? std::optional<Position>(init.pos) : std::nullopt};
      actions.push_back(Transmit{init.id, seal(init.id, b), start->t});
      return {state, actions};
    }
    Nonce const n = ctx.nonces->fresh_nonce(init.id);
    actions.push_back(Transmit{init.id, seal(init.id, Challenge{init.id, n}), start->t});
    // Strictly after the deadline so a response landing on it still counts.
    actions.push_back(ArmTimer{start->t + response_deadline_ps(cfg, ctx.max_distance_m) + 1});
    return {AwaitingResponse{n, start->t + init.clock_offset}, actions};
  }

  if (auto const* arrival = std::get_if<MessageArrival>(&event)) {
    AuthenticatedMessage const& msg = *arrival->msg;
    if (is_beacon(cfg.kind)) {
      if (!std::holds_alternative<Idle>(state)) return {state, actions};
      auto const* beacon = std::get_if<Beacon>(&msg.body);
      if (beacon == nullptr || beacon->sender != init.id || !verify(msg, init.id)) return {state, actions};
      if (tl && !beacon->loc_claimed) return {state, actions};
      Picoseconds const t_local = arrival->t_arrival + resp.clock_offset;
      Ruling const r = tl ? btl_decide(beacon->t_send_claimed, *beacon->loc_claimed, t_local, resp.pos, cfg)
                          : bt_decide(beacon->t_send_claimed, t_local, cfg);
      Decision d = detail::make_decision(cfg.kind, ctx, r, arrival->t_arrival, {arrival->dv});
      actions.push_back(Decide{d});
      return {Done{std::move(d)}, actions};
    }
    auto const* awaiting = std::get_if<AwaitingResponse>(&state);
    if (awaiting == nullptr) return {state, actions};
    auto const* response = std::get_if<Response>(&msg.body);
    if (response == nullptr || response->responder != resp.id || !verify(msg, resp.id)) return {state, actions};
    if (response->echoed_nonce != awaiting->nonce) return {state, actions};
    if (tl && !response->loc_claimed) return {state, actions};
    Picoseconds const t_local = arrival->t_arrival + init.clock_offset;
    Ruling const r = tl ? crtl_decide(awaiting->t_challenge_local, t_local, *response->loc_claimed, init.pos, cfg)
                        : crt_decide(awaiting->t_challenge_local, t_local, cfg);
    Decision d = detail::make_decision(cfg.kind, ctx, r, arrival->t_arrival, {arrival->dv});
    actions.push_back(Decide{d});
    return {Done{std::move(d)}, actions};
  }

  auto const& timer = std::get<TimerFired>(event);
  if (!std::holds_alternative<AwaitingResponse>(state)) return {state, actions};
  Ruling r;
  r.reason = DecisionReason::Timeout;
  Decision d = detail::make_decision(cfg.kind, ctx, r, timer.t, {});
  actions.push_back(Decide{d});
  return {Done{std::move(d)}, actions};
}

/// A correct node's answer to a verified challenge: a sealed response after
/// the fixed turnaround. Nothing for unverifiable or own challenges.
inline std::optional<Transmit> answer_challenge(AuthenticatedMessage const& msg, NodeSpec const& self,
                                                Picoseconds t_arrival, ProtocolConfig const& cfg) {
  auto const* challenge = std::get_if<Challenge>(&msg.body);
  if (challenge == nullptr || challenge->challenger == self.id) return std::nullopt;
  if (!verify(msg, challenge->challenger)) return std::nullopt;
  Response r{self.id, challenge->nonce, uses_location(cfg.kind) ? std::optional<Position>(self.pos) : std::nullopt};
  return Transmit{self.id, seal(self.id, r), t_arrival + cfg.proc_delay};
}

}  // namespace ndsim

#endif  // NDSIM_PROTOCOLS_HPP
