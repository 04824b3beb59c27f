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


#include <catch_amalgamated.hpp>

#include "helpers.hpp"

using namespace testing;

namespace {

std::vector<Transmission> relays(Trace const& t) {
  std::vector<Transmission> out;
  for (auto const& tx : t.transmissions) {
    if (tx.parent) out.push_back(tx);
  }
  return out;
}

Scenario blocked_relay(ProtocolKind k, Picoseconds delta, RelayStrategy strategy = MinDelay{}) {
  auto s = pair_scenario(k, 50);
  block_both(s, kA, kB);
  add_relay(s, 25, delta, std::move(strategy));
  return s;
}

Scenario wormhole_pair(double d, double v_adv) {
  auto s = pair_scenario(ProtocolKind::BT, d);
  s.source.channel.v_adv = v_adv;
  s.source.nodes.push_back(NodeSpec{kE, "E1", {0, 0}, Role::Adversarial, 0});
  s.source.nodes.push_back(NodeSpec{kE2, "E2", {d, 0}, Role::Adversarial, 0});
  AdversaryConfig adv;
  adv.members = {kE, kE2};
  adv.strategy = Wormhole{kE, kE2};
  s.adversary = adv;
  s.finalize();
  return s;
}

}  // namespace

TEST_CASE("min_delay relays at arrival plus delta") {
  auto s = blocked_relay(ProtocolKind::BT, 100'000);
  auto const t = simulate(s);
  auto const r = relays(t);
  REQUIRE(r.size() == 1);
  CHECK(r[0].sender == kE);
  CHECK(r[0].t_send == 83'391 + 100'000);
  REQUIRE(t.decisions.size() == 1);
  CHECK(t.decisions[0].t_decided == 266'782);
  CHECK(*t.decisions[0].measured.elapsed_ps == 266'782);
  CHECK(t.decisions[0].verdict == Verdict::Accept);
}

TEST_CASE("hold adds to the relay delay") {
  auto s = blocked_relay(ProtocolKind::BT, 100'000);
  s.adversary->hold = 5'000;
  CHECK(relays(simulate(s)).at(0).t_send == 83'391 + 105'000);
}

TEST_CASE("min_delay does not relay copies from other members") {
  auto s = blocked_relay(ProtocolKind::BT, 0);
  s.source.nodes.push_back(NodeSpec{kE2, "E2", {30, 0}, Role::Adversarial, 0});
  s.adversary->members.push_back(kE2);
  auto const t = simulate(s);
  for (auto const& r : relays(t)) CHECK(t.tx(t.dv(*r.parent).tx_id).sender == kA);
  CHECK(relays(t).size() == 2);
}

TEST_CASE("selective relays only the listed kinds") {
  auto s = blocked_relay(ProtocolKind::CRT, 0, Selective{{MessageKind::Response}});
  s.source.links.clear();
  block(s, kB, kA);
  auto const t = simulate(s);
  auto const r = relays(t);
  REQUIRE(r.size() == 1);
  CHECK(kind_of(r[0].msg.body) == MessageKind::Response);
}

TEST_CASE("one_direction relays only what the chosen node originated") {
  auto s = blocked_relay(ProtocolKind::CRT, 0, OneDirection{kB, kA});
  auto const t = simulate(s);
  for (auto const& r : relays(t)) CHECK(originator(t, r.tx_id) == kB);
}

TEST_CASE("negative delta moves the relay before the arrival") {
  auto s = blocked_relay(ProtocolKind::BT, -50'000);
  s.sessions[0].t_start = 1'000'000;
  auto const r = relays(simulate(s));
  REQUIRE(r.size() == 1);
  CHECK(r[0].t_send == 1'000'000 + 83'391 - 50'000);
}

TEST_CASE("a relay never leaves before the original was sent") {
  auto s = blocked_relay(ProtocolKind::BT, -5'000'000);
  s.sessions[0].t_start = 950'000;
  auto const t = simulate(s);
  auto const r = relays(t);
  REQUIRE(r.size() == 1);
  CHECK(r[0].t_send == 950'000);
  CHECK(earliest_reaction(*s.adversary, 950'000, 1'033'391) == 950'000);
  AdversaryConfig late;
  late.delta_r = 10;
  CHECK(earliest_reaction(late, 0, 500) == 500);
}

TEST_CASE("tunnel delay examples") {
  auto const rf = wormhole_pair(50, kSpeedOfLight);
  CHECK(tunnel_delay(kE, kE2, rf.world, *rf.adversary) == 166'782);
  auto const fast = wormhole_pair(50, 2 * kSpeedOfLight);
  CHECK(tunnel_delay(kE, kE2, fast.world, *fast.adversary) == 83'391);
  auto const us = load_scenario(scenario_path("ultrasound_wormhole.toml"));
  NodeId const e1 = *us.world.find("E1"), e2 = *us.world.find("E2");
  CHECK(tunnel_delay(e1, e2, us.world, *us.adversary) == 3'335'641);
  AdversaryConfig extra = *rf.adversary;
  extra.tunnel_extra = 7;
  CHECK(tunnel_delay(kE2, kE, rf.world, extra) == 166'789);
  CHECK_THROWS_AS(tunnel_delay(kE, kE, rf.world, extra), ConfigError);
  CHECK_THROWS_AS(tunnel_delay(kA, kE, rf.world, extra), ConfigError);
}

TEST_CASE("wormhole carries the beacon to the far end") {
  auto const us = load_scenario(scenario_path("ultrasound_wormhole.toml"));
  auto const t = run_scenario(us).trace;
  REQUIRE(t.decisions.size() == 1);
  auto const& d = t.decisions[0];
  CHECK(d.verdict == Verdict::Accept);
  CHECK(*d.measured.elapsed_ps == 3'335'641 + 20'000'000);
  CHECK(causal_chain(t, d.evidence.at(0)).size() == 2);
}

TEST_CASE("an adversary that never relays leaves the trace untouched") {
  auto with = blocked_relay(ProtocolKind::CRT, kNeverRelay);
  auto without = with;
  without.adversary.reset();
  with.finalize();
  without.finalize();
  CHECK(trace_jsonl(simulate(with), with.world) == trace_jsonl(simulate(without), without.world));
}

TEST_CASE("adversary configuration errors") {
  auto s = blocked_relay(ProtocolKind::BT, 0);
  s.adversary->members.push_back(kB);
  CHECK_THROWS_WITH(s.finalize(), Catch::Matchers::ContainsSubstring("not adversarial"));
  auto w = wormhole_pair(50, kSpeedOfLight);
  w.adversary->strategy = Wormhole{kE, kE};
  CHECK_THROWS_AS(w.finalize(), ConfigError);
  w.adversary->strategy = Wormhole{kE, kE2};
  w.adversary->hold = -1;
  CHECK_THROWS_AS(w.finalize(), ConfigError);
}
