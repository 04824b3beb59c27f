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

#ifndef NDSIM_TESTS_HELPERS_HPP
#define NDSIM_TESTS_HELPERS_HPP

#include <cmath>
#include <string>

#include "ndsim/ndsim.hpp"

namespace testing {

using namespace ndsim;

inline constexpr NodeId kA{0};
inline constexpr NodeId kB{1};
inline constexpr NodeId kE{2};
inline constexpr NodeId kE2{3};

/// Independent flight-time oracle: long double arithmetic with explicit
/// half-to-even tie breaking.
inline Picoseconds oracle_flight_ps(long double meters, long double speed) {
  long double const ps = meters / speed * 1e12L;
  long double const fl = std::floor(ps);
  long double const frac = ps - fl;
  auto const base = static_cast<Picoseconds>(fl);
  if (frac > 0.5L) return base + 1;
  if (frac < 0.5L) return base;
  return base % 2 == 0 ? base : base + 1;
}

/// Two correct nodes on the x axis, d meters apart.
inline Scenario pair_scenario(ProtocolKind kind, double d, Picoseconds t_end = 10'000'000) {
  Scenario s;
  s.id = "pair";
  s.source.radio_range = 1000.0;
  s.source.nodes = {NodeSpec{kA, "A", {0.0, 0.0}, Role::Correct, 0}, NodeSpec{kB, "B", {d, 0.0}, Role::Correct, 0}};
  s.protocol.kind = kind;
  s.sessions = {SessionSpec{kA, kB, 0, true}};
  s.t_end = t_end;
  return s;
}

/// Adds an adversarial node at x on the axis, with MinDelay relaying.
inline void add_relay(Scenario& s, double x, Picoseconds delta, RelayStrategy strategy = MinDelay{}) {
  s.source.nodes.push_back(NodeSpec{kE, "E", {x, 0.0}, Role::Adversarial, 0});
  AdversaryConfig adv;
  adv.members = {kE};
  adv.delta_r = delta;
  adv.strategy = std::move(strategy);
  s.adversary = adv;
}

inline void block(Scenario& s, NodeId a, NodeId b) { s.source.links.push_back(LinkOverride{a, b, {}}); }

inline void block_both(Scenario& s, NodeId a, NodeId b) {
  block(s, a, b);
  block(s, b, a);
}

inline Trace simulate(Scenario& s) {
  s.finalize();
  Simulation sim(s);
  return sim.run_until(s.t_end);
}

inline std::string scenario_path(std::string const& name) { return std::string(NDSIM_SCENARIO_DIR) + "/" + name; }

}  // namespace testing

#endif  // NDSIM_TESTS_HELPERS_HPP
