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

// Symbolic messages with ideal authentication. A tag is either genuine
// (sealed by its claimed principal) or a forgery; there are no bitstrings.

#ifndef NDSIM_MESSAGE_HPP
#define NDSIM_MESSAGE_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string_view>
#include <variant>

#include "ndsim/core_model.hpp"

namespace ndsim {

struct Nonce {
  NodeId origin;
  std::uint64_t counter = 0;

  friend constexpr auto operator<=>(Nonce const&, Nonce const&) = default;
};

struct Beacon {
  NodeId sender;
  Picoseconds t_send_claimed = 0;  // sender's local clock
  std::optional<Position> loc_claimed;

  friend bool operator==(Beacon const&, Beacon const&) = default;
};

struct Challenge {
  NodeId challenger;
  Nonce nonce;

  friend bool operator==(Challenge const&, Challenge const&) = default;
};

struct Response {
  NodeId responder;
  Nonce echoed_nonce;
  std::optional<Position> loc_claimed;

  friend bool operator==(Response const&, Response const&) = default;
};

using MessageBody = std::variant<Beacon, Challenge, Response>;

enum class MessageKind { Beacon, Challenge, Response };

inline MessageKind kind_of(MessageBody const& body) { return static_cast<MessageKind>(body.index()); }

inline std::string_view to_string(MessageKind k) {
  switch (k) {
    case MessageKind::Beacon: return "beacon";
    case MessageKind::Challenge: return "challenge";
    case MessageKind::Response: return "response";
  }
  return "?";
}

struct AuthTag {
  NodeId claimed_principal;
  bool genuine = false;

  friend bool operator==(AuthTag const&, AuthTag const&) = default;
};

struct AuthenticatedMessage {
  MessageBody body;
  AuthTag auth_tag;

  friend bool operator==(AuthenticatedMessage const&, AuthenticatedMessage const&) = default;
};

/// Per-node nonce counters. Only correct nodes draw from it.
class NonceRegistry {
 public:
  Nonce fresh_nonce(NodeId node) { return Nonce{node, next_[node]++}; }

 private:
  std::map<NodeId, std::uint64_t> next_;
};

inline AuthenticatedMessage seal(NodeId principal, MessageBody body) {
  return AuthenticatedMessage{std::move(body), AuthTag{principal, true}};
}

/// What an adversary gets when it tries to speak for someone else.
inline AuthenticatedMessage forge(NodeId claimed, MessageBody body) {
  return AuthenticatedMessage{std::move(body), AuthTag{claimed, false}};
}

inline bool verify(AuthenticatedMessage const& msg, NodeId expected) {
  return msg.auth_tag.genuine && msg.auth_tag.claimed_principal == expected;
}

/// The principal a well-formed body speaks for.
inline NodeId speaker_of(MessageBody const& body) {
  return std::visit(
      [](auto const& b) -> NodeId {
        using T = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<T, Beacon>) return b.sender;
        if constexpr (std::is_same_v<T, Challenge>) return b.challenger;
        if constexpr (std::is_same_v<T, Response>) return b.responder;
      },
      body);
}

}  // namespace ndsim

#endif  // NDSIM_MESSAGE_HPP
