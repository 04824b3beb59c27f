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

#ifndef NDSIM_TRACE_HPP
#define NDSIM_TRACE_HPP

#include <algorithm>
#include <cstdint>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ndsim/core_model.hpp"
#include "ndsim/message.hpp"
#include "ndsim/protocols.hpp"

namespace ndsim {

struct Transmission {
  TxId tx_id = 0;
  NodeId sender;
  AuthenticatedMessage msg;
  Picoseconds t_send = 0;
  std::optional<DeliveryId> parent;  // set iff this is a relay
  std::uint64_t seq = 0;
};

struct Delivery {
  DeliveryId dv_id = 0;
  TxId tx_id = 0;
  NodeId receiver;
  Picoseconds t_arrival = 0;
  std::uint64_t seq = 0;
};

enum class EventKind { Tx, Dv, Decision };

struct EventRef {
  Picoseconds t = 0;
  std::uint64_t seq = 0;
  EventKind kind = EventKind::Tx;
  std::size_t index = 0;  // into the matching table of Trace

  friend constexpr auto operator<=>(EventRef const& a, EventRef const& b) {
    if (auto c = a.t <=> b.t; c != 0) return c;
    return a.seq <=> b.seq;
  }
  friend constexpr bool operator==(EventRef const& a, EventRef const& b) { return a.t == b.t && a.seq == b.seq; }
};

/// Immutable record of one simulation. Tables are indexed by id; `events`
/// lists everything in (time, seq) order.
struct Trace {
  std::vector<Transmission> transmissions;
  std::vector<Delivery> deliveries;
  std::vector<Decision> decisions;
  std::vector<EventRef> events;

  Transmission const& tx(TxId id) const {
    if (id >= transmissions.size()) throw CausalityError("unknown transmission " + std::to_string(id));
    return transmissions[id];
  }

  Delivery const& dv(DeliveryId id) const {
    if (id >= deliveries.size()) throw CausalityError("unknown delivery " + std::to_string(id));
    return deliveries[id];
  }

  std::vector<Decision> accepts() const {
    std::vector<Decision> out;
    std::copy_if(decisions.begin(), decisions.end(), std::back_inserter(out),
                 [](Decision const& d) { return d.verdict == Verdict::Accept; });
    return out;
  }
};

struct Hop {
  TxId tx = 0;
  DeliveryId dv = 0;

  friend bool operator==(Hop const&, Hop const&) = default;
};

/// Relay path that carried a delivery, oldest hop first. A direct delivery
/// has exactly one hop.
inline std::vector<Hop> causal_chain(Trace const& trace, DeliveryId dv_id) {
  std::vector<Hop> hops;
  DeliveryId cur = dv_id;
  for (;;) {
    Delivery const& d = trace.dv(cur);
    Transmission const& t = trace.tx(d.tx_id);
    hops.push_back({t.tx_id, d.dv_id});
    if (!t.parent) break;
    if (*t.parent >= trace.deliveries.size()) {
      throw CausalityError("transmission " + std::to_string(t.tx_id) + " has dangling parent");
    }
    if (hops.size() > trace.deliveries.size()) throw CausalityError("cyclic relay provenance");
    cur = *t.parent;
  }
  std::reverse(hops.begin(), hops.end());
  return hops;
}

/// Sender of the parentless transmission at the root of a relay chain.
inline NodeId originator(Trace const& trace, TxId tx) {
  Transmission const* t = &trace.tx(tx);
  std::size_t guard = 0;
  while (t->parent) {
    t = &trace.tx(trace.dv(*t->parent).tx_id);
    if (++guard > trace.transmissions.size()) throw CausalityError("cyclic relay provenance");
  }
  return t->sender;
}

// --- JSONL ----------------------------------------------------------------------

namespace detail {

using ojson = nlohmann::ordered_json;

inline ojson position_json(std::optional<Position> const& p) {
  if (!p) return nullptr;
  return ojson::array({p->x, p->y});
}

inline ojson nonce_json(Nonce const& n, WorldConfig const& w) {
  return ojson::array({w.node(n.origin).name, n.counter});
}

inline ojson message_json(AuthenticatedMessage const& m, WorldConfig const& w) {
  ojson j;
  j["type"] = std::string(to_string(kind_of(m.body)));
  if (auto const* b = std::get_if<Beacon>(&m.body)) {
    j["sender"] = w.node(b->sender).name;
    j["t_send_claimed_ps"] = b->t_send_claimed;
    j["loc"] = position_json(b->loc_claimed);
  } else if (auto const* c = std::get_if<Challenge>(&m.body)) {
    j["challenger"] = w.node(c->challenger).name;
    j["nonce"] = nonce_json(c->nonce, w);
  } else if (auto const* r = std::get_if<Response>(&m.body)) {
    j["responder"] = w.node(r->responder).name;
    j["nonce"] = nonce_json(r->echoed_nonce, w);
    j["loc"] = position_json(r->loc_claimed);
  }
  j["principal"] = w.node(m.auth_tag.claimed_principal).name;
  j["genuine"] = m.auth_tag.genuine;
  return j;
}

template <typename T>
ojson optional_json(std::optional<T> const& v) {
  if (!v) return nullptr;
  return *v;
}

}  // namespace detail

inline nlohmann::ordered_json decision_json(Decision const& d, WorldConfig const& w) {
  detail::ojson j;
  j["decider"] = w.node(d.decider).name;
  j["subject"] = w.node(d.subject).name;
  j["verdict"] = std::string(to_string(d.verdict));
  j["elapsed_ps"] = detail::optional_json(d.measured.elapsed_ps);
  j["d_tof_m"] = detail::optional_json(d.measured.d_tof_m);
  j["d_loc_m"] = detail::optional_json(d.measured.d_loc_m);
  j["reason"] = std::string(to_string(d.reason));
  j["session"] = d.session;
  j["evidence"] = d.evidence;
  return j;
}

/// One JSON object per event, fields in a fixed order.
inline void write_trace_jsonl(Trace const& trace, WorldConfig const& w, std::ostream& out) {
  using detail::ojson;
  for (auto const& e : trace.events) {
    ojson j;
    j["t"] = e.t;
    j["seq"] = e.seq;
    switch (e.kind) {
      case EventKind::Tx: {
        auto const& t = trace.transmissions[e.index];
        j["kind"] = "tx";
        j["tx_id"] = t.tx_id;
        j["sender"] = w.node(t.sender).name;
        j["msg"] = detail::message_json(t.msg, w);
        j["parent"] = detail::optional_json(t.parent);
        break;
      }
      case EventKind::Dv: {
        auto const& d = trace.deliveries[e.index];
        j["kind"] = "dv";
        j["dv_id"] = d.dv_id;
        j["tx_id"] = d.tx_id;
        j["receiver"] = w.node(d.receiver).name;
        j["parent"] = d.tx_id;
        break;
      }
      case EventKind::Decision: {
        auto const& d = trace.decisions[e.index];
        j["kind"] = "decision";
        ojson const body = decision_json(d, w);
        for (auto const& [k, v] : body.items()) j[k] = v;
        j["parent"] = d.evidence.empty() ? ojson(nullptr) : ojson(d.evidence.front());
        break;
      }
    }
    out << j.dump() << '\n';
  }
}

inline std::string trace_jsonl(Trace const& trace, WorldConfig const& w) {
  std::ostringstream os;
  write_trace_jsonl(trace, w, os);
  return os.str();
}

/// FNV-1a over the serialized trace; identifies a trace in witness records.
inline std::uint64_t trace_digest(Trace const& trace, WorldConfig const& w) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : trace_jsonl(trace, w)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace ndsim

#endif  // NDSIM_TRACE_HPP
