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

// The static wireless world: where nodes are, who controls them, which
// directed links are up when, and how long a signal takes to cross each one.

#ifndef NDSIM_CORE_MODEL_HPP
#define NDSIM_CORE_MODEL_HPP

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ndsim/units.hpp"

namespace ndsim {

struct Position {
  double x = 0.0;  // meters
  double y = 0.0;  // meters

  friend bool operator==(Position const&, Position const&) = default;
};

inline double distance(Position a, Position b) { return std::hypot(a.x - b.x, a.y - b.y); }

enum class Role { Correct, Adversarial };

struct NodeSpec {
  NodeId id;
  std::string name;
  Position pos;
  Role role = Role::Correct;
  Picoseconds clock_offset = 0;

  friend bool operator==(NodeSpec const&, NodeSpec const&) = default;
};

struct ChannelParams {
  double v = kSpeedOfLight;      // protocol medium, m/s
  double v_adv = kSpeedOfLight;  // adversary tunnel medium, m/s

  friend bool operator==(ChannelParams const&, ChannelParams const&) = default;
};

/// Half-open up-interval [start, end) in ps.
struct Interval {
  Picoseconds start = 0;
  Picoseconds end = kForever;

  friend bool operator==(Interval const&, Interval const&) = default;
};

struct DirectedPair {
  NodeId src;
  NodeId dst;

  friend constexpr auto operator<=>(DirectedPair const&, DirectedPair const&) = default;
};

/// Directed link availability. Pairs without an explicit entry fall back to
/// `default_up`; WorldConfig overrides that fallback with its radio range.
class LinkSchedule {
 public:
  bool default_up = false;

  /// Replaces the schedule of (src, dst). Intervals must be non-empty,
  /// sorted and disjoint; touching intervals are merged.
  void set(NodeId src, NodeId dst, std::vector<Interval> up) {
    for (std::size_t i = 0; i < up.size(); ++i) {
      if (up[i].start < 0 || up[i].end <= up[i].start) {
        throw ConfigError("link interval must satisfy 0 <= start < end");
      }
      if (i > 0 && up[i].start < up[i - 1].end) {
        throw ConfigError("link intervals must be sorted and disjoint");
      }
    }
    std::vector<Interval> merged;
    for (auto const& iv : up) {
      if (!merged.empty() && merged.back().end == iv.start) {
        merged.back().end = iv.end;
      } else {
        merged.push_back(iv);
      }
    }
    entries_[{src, dst}] = std::move(merged);
  }

  void set_always_up(NodeId src, NodeId dst) { set(src, dst, {Interval{0, kForever}}); }
  void set_down(NodeId src, NodeId dst) { set(src, dst, {}); }

  bool has(NodeId src, NodeId dst) const { return entries_.contains({src, dst}); }

  std::vector<Interval> const* find(NodeId src, NodeId dst) const {
    auto it = entries_.find({src, dst});
    return it == entries_.end() ? nullptr : &it->second;
  }

  /// True iff (src, dst) is up at every instant of the closed interval [t0, t1].
  bool up_over(NodeId src, NodeId dst, Picoseconds t0, Picoseconds t1) const {
    auto const* up = find(src, dst);
    if (up == nullptr) return default_up;
    return covers(*up, t0, t1);
  }

  static bool covers(std::vector<Interval> const& up, Picoseconds t0, Picoseconds t1) {
    // Merged intervals: a single one must contain the whole query.
    auto it = std::upper_bound(up.begin(), up.end(), t0,
                               [](Picoseconds t, Interval const& iv) { return t < iv.start; });
    if (it == up.begin()) return false;
    --it;
    return it->start <= t0 && (it->end == kForever || t1 < it->end);
  }

  std::map<DirectedPair, std::vector<Interval>> const& entries() const { return entries_; }

  friend bool operator==(LinkSchedule const&, LinkSchedule const&) = default;

 private:
  std::map<DirectedPair, std::vector<Interval>> entries_;
};

inline bool link_up_over(LinkSchedule const& sched, NodeId src, NodeId dst, Picoseconds t0, Picoseconds t1) {
  if (t1 < t0) throw ConfigError("link_up_over: t0 must not exceed t1");
  return sched.up_over(src, dst, t0, t1);
}

/// Constant extra delay per directed pair on non-line-of-sight paths.
class NlosMap {
 public:
  void set(NodeId src, NodeId dst, Picoseconds delay) {
    if (delay < 0) throw ConfigError("nlos delay must be >= 0");
    if (delay == 0) {
      delays_.erase({src, dst});
    } else {
      delays_[{src, dst}] = delay;
    }
  }

  Picoseconds get(NodeId src, NodeId dst) const {
    auto it = delays_.find({src, dst});
    return it == delays_.end() ? 0 : it->second;
  }

  std::map<DirectedPair, Picoseconds> const& entries() const { return delays_; }

  friend bool operator==(NlosMap const&, NlosMap const&) = default;

 private:
  std::map<DirectedPair, Picoseconds> delays_;
};

struct WorldConfig {
  std::vector<NodeSpec> nodes;
  ChannelParams channel;
  LinkSchedule links;
  NlosMap nlos;
  double radio_range = 100.0;  // meters
  /// Declared bound on |clock_offset| of correct nodes, if any.
  std::optional<Picoseconds> clock_bound;

  NodeSpec const& node(NodeId id) const {
    for (auto const& n : nodes) {
      if (n.id == id) return n;
    }
    throw ConfigError("unknown node id " + std::to_string(id.value));
  }

  std::optional<NodeId> find(std::string const& name) const {
    for (auto const& n : nodes) {
      if (n.name == name) return n.id;
    }
    return std::nullopt;
  }

  bool contains(NodeId id) const {
    return std::any_of(nodes.begin(), nodes.end(), [&](NodeSpec const& n) { return n.id == id; });
  }

  bool is_adversarial(NodeId id) const { return node(id).role == Role::Adversarial; }

  /// Link state with the world's default: pairs without an explicit schedule
  /// are up iff they are within radio range.
  bool link_up_over(NodeId src, NodeId dst, Picoseconds t0, Picoseconds t1) const {
    if (auto const* up = links.find(src, dst)) return LinkSchedule::covers(*up, t0, t1);
    return distance(node(src).pos, node(dst).pos) <= radio_range;
  }

  friend bool operator==(WorldConfig const&, WorldConfig const&) = default;
};

inline void validate_world(WorldConfig const& w) {
  if (w.nodes.size() < 2) throw ConfigError("world.nodes must contain at least 2 nodes");
  for (std::size_t i = 0; i < w.nodes.size(); ++i) {
    auto const& n = w.nodes[i];
    if (!std::isfinite(n.pos.x) || !std::isfinite(n.pos.y)) {
      throw ConfigError("world.nodes[" + std::to_string(i) + "] position must be finite");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (w.nodes[j].id == n.id) throw ConfigError("world.nodes: duplicate node id");
      if (w.nodes[j].name == n.name) throw ConfigError("world.nodes: duplicate node name '" + n.name + "'");
    }
    if (n.role == Role::Correct && w.clock_bound && std::llabs(n.clock_offset) > *w.clock_bound) {
      throw ConfigError("world.nodes[" + std::to_string(i) + "].clock_offset_ps exceeds world.clock_bound_ps");
    }
  }
  if (!(w.channel.v > 0) || !std::isfinite(w.channel.v)) throw ConfigError("world.v_mps must be > 0");
  if (!(w.channel.v_adv > 0) || !std::isfinite(w.channel.v_adv)) throw ConfigError("world.v_adv_mps must be > 0");
  if (!(w.radio_range > 0)) throw ConfigError("world.radio_range_m must be > 0");
  for (auto const& [pair, up] : w.links.entries()) {
    if (!w.contains(pair.src) || !w.contains(pair.dst)) throw ConfigError("links: pair references unknown node");
  }
  for (auto const& [pair, d] : w.nlos.entries()) {
    if (!w.contains(pair.src) || !w.contains(pair.dst)) throw ConfigError("nlos: pair references unknown node");
  }
}

/// Over-the-air delay from a to b: geometric flight at the protocol speed
/// plus the pair's NLOS delay.
inline Picoseconds propagation_delay(NodeId a, NodeId b, WorldConfig const& w) {
  if (a == b) throw ConfigError("propagation_delay: endpoints must differ");
  double const d = distance(w.node(a).pos, w.node(b).pos);
  return flight_time_ps(d, w.channel.v) + w.nlos.get(a, b);
}

// --- geometry-derived schedules ------------------------------------------------

struct Segment {
  Position a;
  Position b;

  friend bool operator==(Segment const&, Segment const&) = default;
};

enum class ObstacleKind { Blocking, Delaying };

struct Obstacle {
  Segment seg;
  ObstacleKind kind = ObstacleKind::Blocking;
  Picoseconds nlos_delay = 0;  // only used by Delaying obstacles

  friend bool operator==(Obstacle const&, Obstacle const&) = default;
};

namespace detail {

inline double cross(Position o, Position a, Position b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

inline int sign(double v) { return (v > 0) - (v < 0); }

inline bool within_box(Position p, Position q, Position r) {
  return std::min(p.x, q.x) <= r.x && r.x <= std::max(p.x, q.x) && std::min(p.y, q.y) <= r.y &&
         r.y <= std::max(p.y, q.y);
}

}  // namespace detail

/// Closed-segment intersection; touching endpoints count.
inline bool segments_intersect(Segment const& s, Segment const& t) {
  using detail::cross;
  using detail::sign;
  int const d1 = sign(cross(t.a, t.b, s.a));
  int const d2 = sign(cross(t.a, t.b, s.b));
  int const d3 = sign(cross(s.a, s.b, t.a));
  int const d4 = sign(cross(s.a, s.b, t.b));
  if (d1 * d2 < 0 && d3 * d4 < 0) return true;
  if (d1 == 0 && detail::within_box(t.a, t.b, s.a)) return true;
  if (d2 == 0 && detail::within_box(t.a, t.b, s.b)) return true;
  if (d3 == 0 && detail::within_box(s.a, s.b, t.a)) return true;
  if (d4 == 0 && detail::within_box(s.a, s.b, t.b)) return true;
  return false;
}

struct GeometrySchedule {
  LinkSchedule links;
  NlosMap nlos;
};

/// Derives link state and NLOS delays from line-of-sight against obstacles.
/// Every ordered pair gets an explicit entry. Blocking obstacles take
/// precedence; delays of several delaying obstacles on one path add up.
inline GeometrySchedule build_schedule_from_geometry(std::vector<NodeSpec> const& nodes, double radio_range,
                                                     std::vector<Obstacle> const& obstacles) {
  for (auto const& o : obstacles) {
    if (o.seg.a == o.seg.b) throw ConfigError("obstacle segment must have non-zero length");
    if (o.nlos_delay < 0) throw ConfigError("obstacle nlos delay must be >= 0");
  }
  GeometrySchedule out;
  for (auto const& a : nodes) {
    for (auto const& b : nodes) {
      if (a.id == b.id) continue;
      if (distance(a.pos, b.pos) > radio_range) {
        out.links.set_down(a.id, b.id);
        continue;
      }
      Segment const path{a.pos, b.pos};
      bool blocked = false;
      Picoseconds extra = 0;
      for (auto const& o : obstacles) {
        if (!segments_intersect(path, o.seg)) continue;
        if (o.kind == ObstacleKind::Blocking) {
          blocked = true;
        } else {
          extra += o.nlos_delay;
        }
      }
      if (blocked) {
        out.links.set_down(a.id, b.id);
      } else {
        out.links.set_always_up(a.id, b.id);
        out.nlos.set(a.id, b.id, extra);
      }
    }
  }
  return out;
}

}  // namespace ndsim

#endif  // NDSIM_CORE_MODEL_HPP
