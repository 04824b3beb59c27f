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

// External relay adversary. Adversarial nodes hear what their links let them
// hear and retransmit it verbatim; they never originate or alter messages.

#ifndef NDSIM_ADVERSARY_HPP
#define NDSIM_ADVERSARY_HPP

#include <algorithm>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ndsim/core_model.hpp"
#include "ndsim/message.hpp"
#include "ndsim/trace.hpp"

namespace ndsim {

/// Relay every delivery, including copies relayed by other members. Two
/// members in range of each other will echo forever.
struct RelayAll {
  friend bool operator==(RelayAll const&, RelayAll const&) = default;
};

/// Relay everything heard from correct nodes, as early as allowed.
struct MinDelay {
  friend bool operator==(MinDelay const&, MinDelay const&) = default;
};

/// Relay only messages originated by `src`; `dst` is the intended victim.
struct OneDirection {
  NodeId src;
  NodeId dst;

  friend bool operator==(OneDirection const&, OneDirection const&) = default;
};

/// Relay only the listed message kinds.
struct Selective {
  std::vector<MessageKind> kinds;

  friend bool operator==(Selective const&, Selective const&) = default;
};

/// Out-of-band tunnel between two members. What one end hears from a correct
/// node is re-emitted over the air by the other end, in both directions.
struct Wormhole {
  NodeId entry;
  NodeId exit;

  friend bool operator==(Wormhole const&, Wormhole const&) = default;
};

using RelayStrategy = std::variant<RelayAll, MinDelay, OneDirection, Selective, Wormhole>;

inline std::string_view strategy_name(RelayStrategy const& s) {
  static constexpr std::string_view names[] = {"relay_all", "min_delay", "one_direction", "selective", "wormhole"};
  return names[s.index()];
}

/// Sentinel for an adversary that can never relay in time.
inline constexpr Picoseconds kNeverRelay = kForever;

struct AdversaryConfig {
  std::vector<NodeId> members;
  /// Minimum delay of one relay action, may be negative (early-commit
  /// physical-layer effects).
  Picoseconds delta_r = 0;
  RelayStrategy strategy = MinDelay{};
  /// Processing added to every tunnel traversal.
  Picoseconds tunnel_extra = 0;
  /// Extra wait the adversary chooses on top of delta_r.
  Picoseconds hold = 0;

  bool is_member(NodeId id) const { return std::find(members.begin(), members.end(), id) != members.end(); }

  friend bool operator==(AdversaryConfig const&, AdversaryConfig const&) = default;
};

inline void validate_adversary(AdversaryConfig const& cfg, WorldConfig const& w) {
  for (NodeId m : cfg.members) {
    if (!w.contains(m)) throw ConfigError("adversary.members references an unknown node");
    if (!w.is_adversarial(m)) {
      throw ConfigError("adversary.members: node '" + w.node(m).name + "' is not adversarial");
    }
  }
  if (cfg.tunnel_extra < 0) throw ConfigError("adversary.tunnel_extra_ps must be >= 0");
  if (cfg.hold < 0) throw ConfigError("adversary.hold_ps must be >= 0");
  if (auto const* wh = std::get_if<Wormhole>(&cfg.strategy)) {
    if (wh->entry == wh->exit) throw ConfigError("adversary wormhole entry and exit must differ");
    if (!cfg.is_member(wh->entry) || !cfg.is_member(wh->exit)) {
      throw ConfigError("adversary wormhole endpoints must be members");
    }
  }
  if (auto const* od = std::get_if<OneDirection>(&cfg.strategy)) {
    if (!w.contains(od->src) || !w.contains(od->dst)) throw ConfigError("adversary one_direction names unknown node");
  }
}

inline Picoseconds tunnel_delay(NodeId entry, NodeId exit, WorldConfig const& w, AdversaryConfig const& cfg) {
  if (entry == exit) throw ConfigError("tunnel_delay: entry and exit must differ");
  if (!w.is_adversarial(entry) || !w.is_adversarial(exit)) {
    throw ConfigError("tunnel_delay: both endpoints must be adversarial");
  }
  return flight_time_ps(distance(w.node(entry).pos, w.node(exit).pos), w.channel.v_adv) + cfg.tunnel_extra;
}

/// Earliest instant at which the adversary may act on a delivery. Negative
/// relay delays move this before the arrival, but never before the send
/// instant of the message being relayed.
inline Picoseconds earliest_reaction(AdversaryConfig const& cfg, Picoseconds parent_send, Picoseconds t_arrival) {
  if (cfg.delta_r >= 0) return t_arrival;
  return std::max(parent_send, t_arrival + cfg.delta_r);
}

struct RelayRequest {
  NodeId sender;
  AuthenticatedMessage msg;
  Picoseconds t_send = 0;
  DeliveryId parent = 0;
};

/// Retransmissions the strategy makes in reaction to one delivery at a member.
/// `trace` needs to contain the delivery and its provenance.
inline std::vector<RelayRequest> on_delivery(AdversaryConfig const& cfg, Delivery const& dv, Trace const& trace,
                                             WorldConfig const& w) {
  std::vector<RelayRequest> out;
  if (cfg.delta_r == kNeverRelay || !cfg.is_member(dv.receiver)) return out;
  Transmission const& heard = trace.tx(dv.tx_id);
  bool const from_member = cfg.is_member(heard.sender);

  auto relay_time = [&](Picoseconds extra) {
    return std::max(heard.t_send, dv.t_arrival + extra + cfg.delta_r + cfg.hold);
  };
  auto relay_from = [&](NodeId sender, Picoseconds extra) {
    out.push_back(RelayRequest{sender, heard.msg, relay_time(extra), dv.dv_id});
  };

  std::visit(
      [&](auto const& s) {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, RelayAll>) {
          relay_from(dv.receiver, 0);
        } else if constexpr (std::is_same_v<S, MinDelay>) {
          if (!from_member) relay_from(dv.receiver, 0);
        } else if constexpr (std::is_same_v<S, OneDirection>) {
          if (!from_member && originator(trace, heard.tx_id) == s.src) relay_from(dv.receiver, 0);
        } else if constexpr (std::is_same_v<S, Selective>) {
          MessageKind const k = kind_of(heard.msg.body);
          if (!from_member && std::find(s.kinds.begin(), s.kinds.end(), k) != s.kinds.end()) {
            relay_from(dv.receiver, 0);
          }
        } else if constexpr (std::is_same_v<S, Wormhole>) {
          if (from_member) return;
          if (dv.receiver == s.entry) relay_from(s.exit, tunnel_delay(s.entry, s.exit, w, cfg));
          if (dv.receiver == s.exit) relay_from(s.entry, tunnel_delay(s.exit, s.entry, w, cfg));
        }
      },
      cfg.strategy);
  return out;
}

}  // namespace ndsim

#endif  // NDSIM_ADVERSARY_HPP
