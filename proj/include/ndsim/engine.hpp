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

// Deterministic discrete-event engine.
//
// A transmission is an instant. When it is scheduled, one delivery is created
// for every other node whose directed link from the sender stays up for the
// whole flight. Receivers process any number of simultaneous deliveries; ties
// are broken by a global sequence number assigned at creation.
//
// Adversarial members are notified of a delivery at the earliest instant they
// may react to it, which precedes the arrival when the relay delay is
// negative. The finished trace is ordered by (time, seq), so such a relay may
// appear before the delivery it is parented on.

#ifndef NDSIM_ENGINE_HPP
#define NDSIM_ENGINE_HPP

#include <algorithm>
#include <optional>
#include <queue>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ndsim/adversary.hpp"
#include "ndsim/protocols.hpp"
#include "ndsim/scenario.hpp"
#include "ndsim/trace.hpp"

namespace ndsim {

class EventCapExceeded : public Error {
 public:
  using Error::Error;
};

enum class ItemKind { SessionStart, Deliver, AdversaryNotify, Timer };

/// What one call to Simulation::step processed.
struct ProcessedItem {
  Picoseconds t = 0;
  std::uint64_t seq = 0;
  ItemKind kind = ItemKind::Deliver;
  std::size_t index = 0;  // session index or delivery id
};

class Simulation {
 public:
  /// The scenario must be finalized and must outlive the simulation.
  explicit Simulation(Scenario const& s) : scenario_(s), world_(s.world), max_distance_(world_diameter(s.world)) {
    states_.assign(s.sessions.size(), Idle{});
    contexts_.reserve(s.sessions.size());
    for (std::size_t i = 0; i < s.sessions.size(); ++i) {
      auto const& spec = s.sessions[i];
      contexts_.push_back(SessionContext{i, &world_.node(spec.initiator), &world_.node(spec.responder), &nonces_,
                                         max_distance_});
      push({spec.t_start, next_seq_++, ItemKind::SessionStart, i});
    }
  }

  Simulation(Simulation const&) = delete;
  Simulation& operator=(Simulation const&) = delete;

  Picoseconds now() const { return now_; }

  /// Tables built so far; `events` is in creation order until run_until.
  Trace const& partial_trace() const { return trace_; }

  /// Enqueues a transmission and its deliveries. Relays (parent set) must
  /// come from adversarial senders.
  TxId schedule_transmission(NodeId sender, AuthenticatedMessage msg, Picoseconds t_send,
                             std::optional<DeliveryId> parent = std::nullopt) {
    if (t_send < now_) {
      throw ConfigError("schedule_transmission: t_send " + std::to_string(t_send) + " precedes now " +
                        std::to_string(now_));
    }
    if (parent && !world_.is_adversarial(sender)) {
      throw ConfigError("schedule_transmission: only adversarial nodes relay");
    }
    TxId const id = trace_.transmissions.size();
    trace_.transmissions.push_back(Transmission{id, sender, std::move(msg), t_send, parent, next_seq_++});
    record(EventKind::Tx, t_send, trace_.transmissions.back().seq, id);

    for (auto const& r : world_.nodes) {
      if (r.id == sender) continue;
      Picoseconds const t_arrival = t_send + propagation_delay(sender, r.id, world_);
      if (!world_.link_up_over(sender, r.id, t_send, t_arrival)) continue;
      DeliveryId const dv = trace_.deliveries.size();
      std::uint64_t const seq = next_seq_++;
      trace_.deliveries.push_back(Delivery{dv, id, r.id, t_arrival, seq});
      record(EventKind::Dv, t_arrival, seq, dv);
      if (r.role == Role::Correct) {
        push({t_arrival, seq, ItemKind::Deliver, dv});
      } else if (scenario_.adversary && scenario_.adversary->is_member(r.id)) {
        push({earliest_reaction(*scenario_.adversary, t_send, t_arrival), seq, ItemKind::AdversaryNotify, dv});
      }
    }
    return id;
  }

  /// Processes the least pending item; nothing when the queue is empty.
  std::optional<ProcessedItem> step() {
    if (queue_.empty()) return std::nullopt;
    Item const item = queue_.top();
    queue_.pop();
    now_ = item.t;
    switch (item.kind) {
      case ItemKind::SessionStart:
        advance(item.index, SessionStart{item.t});
        break;
      case ItemKind::Timer:
        advance(item.index, TimerFired{item.t});
        break;
      case ItemKind::Deliver:
        deliver_to_correct(trace_.deliveries[item.index]);
        break;
      case ItemKind::AdversaryNotify:
        for (auto& req : on_delivery(*scenario_.adversary, trace_.deliveries[item.index], trace_, world_)) {
          schedule_transmission(req.sender, std::move(req.msg), req.t_send, req.parent);
        }
        break;
    }
    return ProcessedItem{item.t, item.seq, item.kind, item.index};
  }

  /// Steps until the queue drains or the next item lies beyond t_end. The
  /// returned trace holds the events at or before t_end, ordered by (t, seq).
  Trace run_until(Picoseconds t_end) {
    if (t_end < now_) throw ConfigError("run_until: t_end precedes now");
    while (!queue_.empty() && queue_.top().t <= t_end) step();
    Trace out = trace_;
    std::erase_if(out.events, [&](EventRef const& e) { return e.t > t_end; });
    std::sort(out.events.begin(), out.events.end());
    return out;
  }

 private:
  struct Item {
    Picoseconds t;
    std::uint64_t seq;
    ItemKind kind;
    std::size_t index;

    bool operator>(Item const& o) const { return t != o.t ? t > o.t : seq > o.seq; }
  };

  void push(Item item) { queue_.push(item); }

  void record(EventKind kind, Picoseconds t, std::uint64_t seq, std::size_t index) {
    trace_.events.push_back(EventRef{t, seq, kind, index});
    if (trace_.events.size() > scenario_.event_cap) throw_cap_exceeded();
  }

  [[noreturn]] void throw_cap_exceeded() const {
    std::set<std::string> relays;
    std::size_t const n = trace_.transmissions.size();
    for (std::size_t i = n > 64 ? n - 64 : 0; i < n; ++i) {
      if (trace_.transmissions[i].parent) relays.insert(world_.node(trace_.transmissions[i].sender).name);
    }
    std::ostringstream os;
    os << "event cap " << scenario_.event_cap << " exceeded at t=" << now_ << " ps";
    if (!relays.empty()) {
      os << "; recent relays by";
      for (auto const& r : relays) os << ' ' << r;
      os << " (likely a relay loop among adversarial nodes)";
    }
    throw EventCapExceeded(os.str());
  }

  void apply(std::vector<Action>& actions, std::size_t session) {
    for (auto& a : actions) {
      if (auto* tx = std::get_if<Transmit>(&a)) {
        schedule_transmission(tx->sender, std::move(tx->msg), tx->t_send);
      } else if (auto* timer = std::get_if<ArmTimer>(&a)) {
        push({timer->t, next_seq_++, ItemKind::Timer, session});
      } else if (auto* d = std::get_if<Decide>(&a)) {
        trace_.decisions.push_back(d->decision);
        record(EventKind::Decision, now_, next_seq_++, trace_.decisions.size() - 1);
      }
    }
  }

  bool advance(std::size_t session, SessionEvent const& ev) {
    auto [next, actions] = drive(states_[session], ev, scenario_.protocol, contexts_[session]);
    states_[session] = std::move(next);
    bool const decided = std::any_of(actions.begin(), actions.end(),
                                     [](Action const& a) { return std::holds_alternative<Decide>(a); });
    apply(actions, session);
    return decided;
  }

  void deliver_to_correct(Delivery const& dv_ref) {
    Delivery const dv = dv_ref;  // tables may grow below
    AuthenticatedMessage const msg = trace_.tx(dv.tx_id).msg;
    ProtocolConfig const& cfg = scenario_.protocol;
    NodeSpec const& self = world_.node(dv.receiver);

    if (std::holds_alternative<Challenge>(msg.body)) {
      if (!is_beacon(cfg.kind)) {
        if (auto resp = answer_challenge(msg, self, dv.t_arrival, cfg)) {
          schedule_transmission(resp->sender, std::move(resp->msg), resp->t_send);
        }
      }
      return;
    }
    // Sessions decided at this node, earliest start first.
    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < states_.size(); ++i) {
      NodeId const decider = decider_of(cfg.kind, contexts_[i]);
      if (decider == self.id && !std::holds_alternative<Done>(states_[i]) &&
          scenario_.sessions[i].t_start <= dv.t_arrival) {
        order.push_back(i);
      }
    }
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return scenario_.sessions[a].t_start < scenario_.sessions[b].t_start;
    });
    for (std::size_t i : order) {
      if (advance(i, MessageArrival{dv.dv_id, &msg, dv.t_arrival})) break;
    }
  }

  Scenario const& scenario_;
  WorldConfig world_;
  double max_distance_ = 0.0;
  std::vector<SessionState> states_;
  std::vector<SessionContext> contexts_;
  NonceRegistry nonces_;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> queue_;
  Trace trace_;
  Picoseconds now_ = 0;
  std::uint64_t next_seq_ = 0;
};

}  // namespace ndsim

#endif  // NDSIM_ENGINE_HPP
