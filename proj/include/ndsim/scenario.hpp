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

#ifndef NDSIM_SCENARIO_HPP
#define NDSIM_SCENARIO_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ndsim/adversary.hpp"
#include "ndsim/core_model.hpp"
#include "ndsim/protocols.hpp"

namespace ndsim {

/// Replaces the schedule of one directed pair.
struct LinkOverride {
  NodeId src;
  NodeId dst;
  std::vector<Interval> up;

  friend bool operator==(LinkOverride const&, LinkOverride const&) = default;
};

struct NlosOverride {
  NodeId src;
  NodeId dst;
  Picoseconds delay = 0;

  friend bool operator==(NlosOverride const&, NlosOverride const&) = default;
};

/// What a world is built from. Obstacles derive a full schedule; overrides
/// are applied on top of it.
struct WorldSource {
  std::vector<NodeSpec> nodes;
  ChannelParams channel;
  double radio_range = 100.0;
  std::optional<Picoseconds> clock_bound;
  std::vector<Obstacle> obstacles;
  std::vector<LinkOverride> links;
  std::vector<NlosOverride> nlos;

  friend bool operator==(WorldSource const&, WorldSource const&) = default;
};

inline WorldConfig build_world(WorldSource const& src) {
  WorldConfig w;
  w.nodes = src.nodes;
  w.channel = src.channel;
  w.radio_range = src.radio_range;
  w.clock_bound = src.clock_bound;
  if (!src.obstacles.empty()) {
    auto geo = build_schedule_from_geometry(src.nodes, src.radio_range, src.obstacles);
    w.links = std::move(geo.links);
    w.nlos = std::move(geo.nlos);
  }
  for (auto const& o : src.links) w.links.set(o.src, o.dst, o.up);
  for (auto const& o : src.nlos) w.nlos.set(o.src, o.dst, o.delay);
  validate_world(w);
  return w;
}

struct SessionSpec {
  NodeId initiator;  // beacon sender or challenger
  NodeId responder;  // beacon receiver or challenge responder
  Picoseconds t_start = 0;
  /// The pair is declared a legitimate neighbor pair for availability checks.
  bool expect_available = true;

  friend bool operator==(SessionSpec const&, SessionSpec const&) = default;
};

inline constexpr std::uint64_t kDefaultEventCap = 1'000'000;

struct Scenario {
  std::string id = "scenario";
  WorldSource source;
  WorldConfig world;  // derived from `source` by finalize()
  ProtocolConfig protocol;
  std::optional<AdversaryConfig> adversary;
  std::vector<SessionSpec> sessions;
  Picoseconds t_end = 0;
  std::uint64_t seed = 0;
  std::uint64_t event_cap = kDefaultEventCap;

  /// Rebuilds `world` and checks every cross-reference.
  void finalize() {
    world = build_world(source);
    protocol.v = world.channel.v;
    validate_protocol(protocol);
    if (adversary) validate_adversary(*adversary, world);
    if (t_end < 0) throw ConfigError("run.t_end_ps must be >= 0");
    for (std::size_t i = 0; i < sessions.size(); ++i) {
      auto const& s = sessions[i];
      std::string const where = "sessions[" + std::to_string(i) + "]";
      if (!world.contains(s.initiator) || !world.contains(s.responder)) {
        throw ConfigError(where + " references an unknown node");
      }
      if (s.initiator == s.responder) throw ConfigError(where + ".responder must differ from initiator");
      if (world.is_adversarial(s.initiator) || world.is_adversarial(s.responder)) {
        throw ConfigError(where + " endpoints must be correct nodes");
      }
      if (s.t_start < 0 || s.t_start > t_end) throw ConfigError(where + ".t_start_ps must lie in [0, run.t_end_ps]");
    }
  }

  friend bool operator==(Scenario const&, Scenario const&) = default;
};

/// Largest distance between any two nodes; bounds genuine responders.
inline double world_diameter(WorldConfig const& w) {
  double m = 0.0;
  for (auto const& a : w.nodes) {
    for (auto const& b : w.nodes) m = std::max(m, distance(a.pos, b.pos));
  }
  return m;
}

}  // namespace ndsim

#endif  // NDSIM_SCENARIO_HPP
