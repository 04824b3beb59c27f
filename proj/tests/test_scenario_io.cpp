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


#include <filesystem>

#include <catch_amalgamated.hpp>

#include "helpers.hpp"

using namespace testing;
using Catch::Matchers::ContainsSubstring;

namespace {

constexpr char kMinimal[] = R"(
[world]
[[world.nodes]]
name = "A"
x_m = 0.0
[[world.nodes]]
name = "B"
x_m = 50
[protocol]
kind = "BT"
[[sessions]]
initiator = "A"
responder = "B"
[run]
t_end_ps = 1_000_000
)";

std::string replace(std::string s, std::string const& from, std::string const& to) {
  auto const at = s.find(from);
  REQUIRE(at != std::string::npos);
  return s.replace(at, from.size(), to);
}

}  // namespace

TEST_CASE("toml values") {
  auto const t = toml::parse(
      "a = 1_000\nb = -2.5e3\nc = 'lit\\n'\nd = \"esc\\t\\u0041\"\ne = [1, [2, 3], ]\nf = {x = true, y.z = 4}\n"
      "[g.h]\ni = false # comment\n[[j]]\nk = 1\n[[j]]\nk = 2\n");
  auto get = [&](char const* k) -> toml::Value const& { return *t.find(k); };
  CHECK(std::get<std::int64_t>(get("a").data) == 1000);
  CHECK(std::get<double>(get("b").data) == -2500.0);
  CHECK(std::get<std::string>(get("c").data) == "lit\\n");
  CHECK(std::get<std::string>(get("d").data) == "esc\tA");
  CHECK(get("e").array().size() == 2);
  CHECK(get("f").table().find("y")->table().find("z") != nullptr);
  CHECK(get("g").table().find("h")->table().find("i") != nullptr);
  CHECK(get("j").array().size() == 2);
}

TEST_CASE("toml errors carry a position") {
  try {
    toml::parse("a = 1\nb = [1, 2\n");
    FAIL("expected a parse error");
  } catch (toml::ParseError const& e) {
    // Arrays may span lines, so the error surfaces at the end of input.
    CHECK(e.where().line == 3);
    CHECK_THAT(e.what(), ContainsSubstring("line 3"));
  }
  CHECK_THROWS_AS(toml::parse("a = 1\na = 2\n"), toml::ParseError);
  CHECK_THROWS_AS(toml::parse("a = \"open\n"), toml::ParseError);
  CHECK_THROWS_AS(toml::parse("a = \"\"\"x\"\"\"\n"), toml::ParseError);
  CHECK_THROWS_AS(toml::parse("[t]\n[t]\n"), toml::ParseError);
  CHECK_THROWS_AS(toml::parse("a = 1 b = 2\n"), toml::ParseError);
}

TEST_CASE("float formatting round-trips") {
  for (double d : {0.0, 1.0, 0.1, 299792458.0, 1e-9, 53.68666974429785, -2.5}) {
    CHECK(std::stod(toml::format_float(d)) == d);
  }
  CHECK(toml::format_float(50) == "50.0");
  CHECK(toml::quote("a\"b\\") == "\"a\\\"b\\\\\"");
}

TEST_CASE("minimal scenario gets the defaults") {
  auto const s = parse_scenario(kMinimal);
  CHECK(s.id == "scenario");
  CHECK(s.world.nodes.size() == 2);
  CHECK(s.world.node(kB).pos == Position{50, 0});
  CHECK(s.world.radio_range == 100.0);
  CHECK(s.world.channel.v == kSpeedOfLight);
  CHECK(s.protocol.range_m == 100.0);
  CHECK(s.protocol.eps_t == 1'000);
  CHECK(s.protocol.eps_d == 0.10);
  CHECK(s.protocol.proc_delay == 1'000'000);
  CHECK_FALSE(s.adversary);
  CHECK(s.sessions.at(0).expect_available);
  CHECK(s.event_cap == kDefaultEventCap);
}

TEST_CASE("scenario validation messages") {
  std::string const base = kMinimal;
  CHECK_THROWS_WITH(parse_scenario(replace(base, "kind = \"BT\"", "kind = \"BT\"\nrange_m = 0.0")),
                    ContainsSubstring("protocol.range_m must be > 0"));
  CHECK_THROWS_WITH(parse_scenario(replace(base, "[protocol]", "[protocal]")),
                    ContainsSubstring("unknown key 'protocal'"));
  CHECK_THROWS_WITH(parse_scenario(replace(base, "x_m = 50", "x_m = 50\ncolour = 1")),
                    ContainsSubstring("unknown key 'world.nodes[1].colour'"));
  CHECK_THROWS_WITH(parse_scenario(replace(base, "responder = \"B\"", "responder = \"C\"")),
                    ContainsSubstring("sessions[0].responder"));
  CHECK_THROWS_WITH(parse_scenario(replace(base, "x_m = 50", "x_m = \"far\"")),
                    ContainsSubstring("world.nodes[1].x_m must be a number"));
  CHECK_THROWS_WITH(parse_scenario(replace(base, "t_end_ps = 1_000_000", "")), ContainsSubstring("run.t_end_ps is required"));
  CHECK_THROWS_WITH(parse_scenario(replace(base, "kind = \"BT\"", "kind = \"BTX\"")), ContainsSubstring("protocol.kind"));
  CHECK_THROWS_WITH(parse_scenario(replace(base, "x_m = 50", "x_m = 50\n[[world.nodes]]\nname = \"A\"\nx_m = 1")),
                    ContainsSubstring("duplicate node name"));
}

TEST_CASE("parse errors name the file, line and column") {
  std::string const bad = replace(kMinimal, "x_m = 50", "x_m = 50 50");
  try {
    parse_scenario(bad, "bad.toml");
    FAIL("expected a parse error");
  } catch (ConfigError const& e) {
    CHECK_THAT(e.what(), ContainsSubstring("bad.toml: line 8, column 10"));
  }
  CHECK_THROWS_WITH(load_scenario("/nonexistent/x.toml"), ContainsSubstring("cannot open"));
}

TEST_CASE("adversary and links sections") {
  auto const s = load_scenario(scenario_path("ultrasound_wormhole.toml"));
  REQUIRE(s.adversary);
  CHECK(std::holds_alternative<Wormhole>(s.adversary->strategy));
  CHECK(s.adversary->delta_r == 20'000'000);
  CHECK(s.world.channel.v == 340.0);
  CHECK_FALSE(s.world.link_up_over(kA, kB, 0, 1));
  CHECK_FALSE(s.world.link_up_over(kB, kA, 0, 1));
  auto const j = load_scenario(scenario_path("bt_jammed.toml"));
  CHECK(*j.world.links.find(kA, kB) == std::vector<Interval>{{0, 500'000}, {2'000'000, kForever}});
  std::string const never = replace(replace(kMinimal, "[protocol]",
                                            "[adversary]\ndelta_r_ps = \"never\"\n[protocol]"),
                                    "x_m = 50", "x_m = 50\n[[world.nodes]]\nname = \"E\"\nx_m = 9\nrole = \"adversarial\"");
  auto const n = parse_scenario(replace(never, "delta_r_ps", "members = [\"E\"]\ndelta_r_ps"));
  CHECK(n.adversary->delta_r == kNeverRelay);
}

TEST_CASE("every shipped scenario survives a save and reload") {
  std::size_t files = 0;
  for (auto const& entry : std::filesystem::directory_iterator(NDSIM_SCENARIO_DIR)) {
    std::string const path = entry.path().string();
    if (path.ends_with(".space.toml") || !path.ends_with(".toml")) continue;
    INFO(path);
    ++files;
    auto const s = load_scenario(path);
    std::string const text = save_scenario(s);
    auto const back = parse_scenario(text, path + " (saved)");
    CHECK(back.world == s.world);
    CHECK(back.protocol == s.protocol);
    CHECK(back.adversary == s.adversary);
    CHECK(back.sessions == s.sessions);
    CHECK(back.t_end == s.t_end);
    CHECK(back.id == s.id);
    CHECK(save_scenario(back) == text);
  }
  CHECK(files >= 10);
}

TEST_CASE("attack witnesses survive a save and reload") {
  auto const file = load_space(scenario_path("bt_threshold.space.toml"));
  auto const w = find_attack(file.space, 200, 5);
  REQUIRE(w);
  auto const back = parse_scenario(save_scenario(w->scenario));
  CHECK(back.world == w->scenario.world);
  CHECK(back.adversary == w->scenario.adversary);
  CHECK(trace_digest(run_scenario(back).trace, back.world) == w->trace_digest);
}

TEST_CASE("space files") {
  auto const f = load_space(scenario_path("crt_threshold.space.toml"));
  CHECK(f.space.protocol.kind == ProtocolKind::CRT);
  CHECK(f.space.asymmetric_links);
  CHECK(f.space.strategies == std::vector<StrategyKind>{StrategyKind::OneDirection, StrategyKind::MinDelay});
  CHECK(f.space.delta_max == 800'000);
  CHECK(f.budget == 1000);
  auto const defaults = parse_space("");
  CHECK(defaults.space.channels.size() == 1);
  CHECK_THROWS_WITH(parse_space("[space]\nplacements = [\"middle\"]\n"), ContainsSubstring("space.placements"));
  CHECK_THROWS_WITH(parse_space("[space]\nbudgt = 3\n"), ContainsSubstring("unknown key 'space.budgt'"));
  CHECK_THROWS_WITH(parse_space("[space]\nd_min_m = 5.0\nd_max_m = 1.0\n"), ContainsSubstring("d_max_m"));
}
