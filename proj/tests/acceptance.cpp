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


// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ndsim/ndsim.hpp"

using namespace ndsim;

namespace {

std::string scenario_path(std::string const& name) { return std::string(NDSIM_SCENARIO_DIR) + "/" + name; }

/// Collects failed checks of one criterion.
class Criterion {
 public:
  void expect(bool ok, std::string const& what) {
    if (!ok) failures_.push_back(what);
  }
  void note(std::string const& s) { notes_.push_back(s); }
  bool ok() const { return failures_.empty(); }
  std::vector<std::string> const& failures() const { return failures_; }
  std::string notes() const {
    std::string out;
    for (auto const& n : notes_) out += (out.empty() ? "" : "; ") + n;
    return out;
  }

 private:
  std::vector<std::string> failures_;
  std::vector<std::string> notes_;
};

std::string num(long long v) { return std::to_string(v); }

std::vector<AttackWitness> all_witnesses;  // replayed by criterion 9

void keep(std::vector<AttackWitness> const& ws, std::size_t n) {
  for (std::size_t i = 0; i < ws.size() && i < n; ++i) all_witnesses.push_back(ws[i]);
}

SearchSpace grid(ProtocolKind k) {
  SearchSpace s;
  s.protocol.kind = k;
  s.protocol.eps_t = 0;
  s.d_min_m = 1;
  s.d_max_m = 99;
  s.d_step_m = 1;
  s.delta_min = 0;
  s.delta_max = 400'000;
  s.delta_step = 1'000;
  return s;
}

std::set<std::pair<int, Picoseconds>> witness_cells(std::vector<AttackWitness> const& ws) {
  std::set<std::pair<int, Picoseconds>> out;
  for (auto const& w : ws) out.insert({static_cast<int>(std::lround(w.distance_m)), w.delta_r});
  return out;
}

void bt_threshold(Criterion& c) {
  auto const file = load_space(scenario_path("bt_threshold.space.toml"));
  auto const r = min_safe_relay_delay(file.space, 100);
  c.note("bisect threshold " + num(r.min_safe_ps) + " ps by " + r.achieved_by);
  c.expect(std::llabs(r.min_safe_ps - 333'564) <= 200, "bisection threshold " + num(r.min_safe_ps));
  c.expect(r.boundary_witness && replay_witness(*r.boundary_witness), "boundary witness replays");
  if (r.boundary_witness) all_witnesses.push_back(*r.boundary_witness);

  SearchSpace const s = grid(ProtocolKind::BT);
  auto const ws = exhaustive_scan(s);
  keep(ws, 3);
  auto const cells = witness_cells(ws);
  Picoseconds const bound = flight_time_ps(100.0, kSpeedOfLight);
  std::size_t fp = 0, fn = 0;
  for (double d : s.distances()) {
    for (Picoseconds delta : s.deltas()) {
      bool const expect = flight_time_ps(d, kSpeedOfLight) + delta <= bound;
      bool const got = cells.contains({static_cast<int>(std::lround(d)), delta});
      fp += got && !expect;
      fn += !got && expect;
    }
  }
  c.note("grid " + num(static_cast<long long>(s.distances().size() * s.deltas().size())) + " cells, " +
         num(static_cast<long long>(ws.size())) + " witnesses, " + num(static_cast<long long>(fp)) + " fp, " +
         num(static_cast<long long>(fn)) + " fn");
  c.expect(fp == 0 && fn == 0, "closed form mismatch");
}

void crt_factor_two(Criterion& c) {
  auto const file = load_space(scenario_path("crt_threshold.space.toml"));
  auto const asym = min_safe_relay_delay(file.space, 100);
  c.note("asymmetric " + num(asym.min_safe_ps) + " ps by " + asym.achieved_by);
  c.expect(std::llabs(asym.min_safe_ps - 667'128) <= 200, "asymmetric threshold " + num(asym.min_safe_ps));
  c.expect(asym.achieved_by.find("one_direction(B->A)/forward_only") != std::string::npos,
           "asymmetric boundary reached by " + asym.achieved_by);
  if (asym.boundary_witness) all_witnesses.push_back(*asym.boundary_witness);

  SearchSpace sym = file.space;
  sym.asymmetric_links = false;
  auto const r = min_safe_relay_delay(sym, 100);
  c.note("symmetric " + num(r.min_safe_ps) + " ps by " + r.achieved_by);
  c.expect(std::llabs(r.min_safe_ps - 333'564) <= 200, "symmetric threshold " + num(r.min_safe_ps));
  c.expect(!r.achieved_by.empty(), "symmetric boundary is labeled");
}

void tl_security(Criterion& c) {
  for (auto k : {ProtocolKind::BTL, ProtocolKind::CRTL}) {
    std::string const name(to_string(k));
    SearchSpace s = grid(k);
    s.protocol.eps_d = 0.0;
    s.delta_min = 1;
    s.delta_max = 400'001;
    s.placements = {Placement::Midpoint, Placement::NearA, Placement::NearB, Placement::Wormhole};
    s.strategies = {StrategyKind::MinDelay, StrategyKind::Wormhole};
    auto const none = exhaustive_scan(s);
    c.expect(none.empty(), name + " eps_d = 0: " + num(static_cast<long long>(none.size())) + " witnesses");

    SearchSpace loose = grid(k);
    loose.protocol.eps_d = 0.10;
    loose.delta_min = 0;
    loose.delta_max = 1'000;
    loose.delta_step = 1;
    auto const ws = exhaustive_scan(loose);
    keep(ws, 2);
    Picoseconds max_delta = -1;
    std::map<int, std::size_t> per_d;
    for (auto const& w : ws) {
      max_delta = std::max(max_delta, w.delta_r);
      ++per_d[static_cast<int>(std::lround(w.distance_m))];
    }
    bool every_d = per_d.size() == 99;
    for (auto const& [d, n] : per_d) every_d = every_d && n == 334;
    c.expect(max_delta == 333 && every_d, name + " eps_d = 0.10: witnesses up to " + num(max_delta));
    c.note(name + ": 0 witnesses at eps_d 0, " + num(static_cast<long long>(ws.size())) +
           " with delta <= " + num(max_delta) + " at eps_d 0.10");
  }
}

void tl_speed(Criterion& c) {
  SearchSpace s;
  s.protocol.kind = ProtocolKind::BTL;
  s.protocol.eps_d = 0.0;
  s.channels = {ChannelParams{kSpeedOfLight, 2 * kSpeedOfLight}};
  s.d_min_m = s.d_max_m = 50;
  s.placements = {Placement::Wormhole};
  s.strategies = {StrategyKind::Wormhole};
  s.delta_min = 1;
  s.delta_max = 100'000;
  s.delta_step = 1'000;
  s.extra_deltas = {83'391, 83'392};
  auto const ws = exhaustive_scan(s);
  keep(ws, 2);
  Picoseconds max_delta = 0;
  for (auto const& w : ws) max_delta = std::max(max_delta, w.delta_r);
  c.expect(max_delta == 83'391, "fast tunnel: largest witness delta " + num(max_delta));
  c.expect(!ws.empty() && ws.front().delta_r == 1, "fast tunnel: witness at 1 ps");
  s.channels = {ChannelParams{}};
  auto const none = exhaustive_scan(s);
  c.expect(none.empty(), "equal speeds: " + num(static_cast<long long>(none.size())) + " witnesses");
  c.note("v_adv = 2c: witnesses for delta in [1, " + num(max_delta) + "] ps; v_adv = c: " +
         num(static_cast<long long>(none.size())));
}

void tl_nlos(Criterion& c) {
  auto const btl = run_scenario(load_scenario(scenario_path("btl_nlos.toml")));
  bool availability = false;
  for (auto const& v : btl.verdicts) {
    if (v.property == ViolationKind::Availability) availability = !v.holds;
  }
  c.expect(btl.trace.accepts().empty(), "BTL rejects the nlos pair");
  c.expect(availability, "BTL availability violation recorded");
  auto const bt = run_scenario(load_scenario(scenario_path("bt_nlos.toml")));
  c.expect(bt.trace.accepts().size() == 1 && bt.report.all_hold(), "BT accepts the nlos pair");
  if (!bt.trace.accepts().empty()) {
    c.note("BT elapsed " + num(*bt.trace.accepts()[0].measured.elapsed_ps) + " ps; BTL mismatch " +
           std::to_string(*btl.trace.decisions.at(0).measured.d_tof_m - *btl.trace.decisions.at(0).measured.d_loc_m) +
           " m");
  }
}

void ultrasound(Criterion& c) {
  auto const us = run_scenario(load_scenario(scenario_path("ultrasound_wormhole.toml")));
  std::optional<Violation> dist;
  for (auto const& v : us.verdicts) {
    if (v.property == ViolationKind::DistanceCorrectness && !v.violations.empty()) dist = v.violations.front();
  }
  c.expect(dist && dist->actual_distance_m == 1000.0, "ultrasound distance violation at 1000 m");
  if (!us.trace.accepts().empty()) {
    c.note("ultrasound elapsed " + num(*us.trace.accepts()[0].measured.elapsed_ps) + " ps");
  }

  SearchSpace rf = grid(ProtocolKind::BT);
  rf.protocol.eps_t = 1'000;
  rf.placements = {Placement::Midpoint, Placement::NearA, Placement::NearB, Placement::Wormhole};
  rf.strategies = {StrategyKind::MinDelay, StrategyKind::Wormhole};
  rf.delta_min = rf.delta_max = 20'000'000;
  auto const none = exhaustive_scan(rf);
  c.expect(none.empty(), "RF with 20 us relays: " + num(static_cast<long long>(none.size())) + " witnesses");
  c.note("RF: 0 witnesses");
}

void clocks(Criterion& c) {
  auto const bt = run_scenario(load_scenario(scenario_path("bt_clock_skew.toml")));
  c.expect(bt.trace.decisions.size() == 1 && bt.trace.accepts().empty(), "BT with 500 ns skew rejects");
  auto const crt = run_scenario(load_scenario(scenario_path("crt_clock_skew.toml")));
  c.expect(crt.trace.accepts().size() == 1, "CRT with +-1 ms offsets accepts");

  auto base = load_scenario(scenario_path("crt_clock_skew.toml"));
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<Picoseconds> off(-1'000'000'000, 1'000'000'000);
  std::size_t varied = 0;
  auto const reference = crt.trace.decisions;
  for (int i = 0; i < 200; ++i) {
    auto s = base;
    for (auto& n : s.source.nodes) n.clock_offset = off(rng);
    s.finalize();
    auto const t = run_scenario(s).trace;
    bool same = t.decisions.size() == reference.size();
    for (std::size_t k = 0; same && k < t.decisions.size(); ++k) {
      same = t.decisions[k].verdict == reference[k].verdict && t.decisions[k].measured == reference[k].measured;
    }
    varied += !same;
  }
  c.expect(varied == 0, "CR decisions vary with offsets in " + num(static_cast<long long>(varied)) + " runs");
  c.note("BT rejects 500 ns skew; CRT invariant over 200 random offset draws");
}

void no_mac(Criterion& c) {
  auto const jammed = load_scenario(scenario_path("bt_jammed.toml"));
  auto const t = run_scenario(jammed).trace;
  c.expect(t.transmissions.size() == 1 && t.deliveries.empty(), "no delivery over a down link");

  Scenario s;
  s.id = "simultaneous";
  s.source.nodes = {NodeSpec{NodeId{0}, "A", {0, 0}, Role::Correct, 0},
                    NodeSpec{NodeId{1}, "B", {0, 40}, Role::Correct, 0},
                    NodeSpec{NodeId{2}, "C", {0, -40}, Role::Correct, 0}};
  s.protocol.kind = ProtocolKind::BT;
  s.sessions = {SessionSpec{NodeId{0}, NodeId{1}, 0, true}, SessionSpec{NodeId{0}, NodeId{2}, 0, true}};
  s.t_end = 10'000'000;
  s.finalize();
  auto const sim = run_scenario(s);
  bool same_time = sim.trace.decisions.size() == 2 &&
                   sim.trace.decisions[0].t_decided == sim.trace.decisions[1].t_decided;
  c.expect(same_time && sim.trace.accepts().size() == 2, "simultaneous deliveries both processed");

  std::size_t runs = 0, accepted = 0;
  for (auto k : {ProtocolKind::BT, ProtocolKind::BTL, ProtocolKind::CRT, ProtocolKind::CRTL}) {
    for (int d = 1; d <= 99; ++d) {
      Scenario p;
      p.id = "grid";
      p.source.nodes = {NodeSpec{NodeId{0}, "A", {0, 0}, Role::Correct, 0},
                        NodeSpec{NodeId{1}, "B", {static_cast<double>(d), 0}, Role::Correct, 0}};
      p.protocol.kind = k;
      p.sessions = {SessionSpec{NodeId{0}, NodeId{1}, 0, true}};
      p.t_end = 10'000'000;
      p.finalize();
      auto const o = run_scenario(p);
      ++runs;
      accepted += o.report.all_hold() && o.report.summary.accepts == 1;
    }
  }
  c.expect(accepted == runs, "availability " + num(static_cast<long long>(accepted)) + "/" +
                                 num(static_cast<long long>(runs)));
  c.note("availability " + num(static_cast<long long>(accepted)) + "/" + num(static_cast<long long>(runs)));
}

std::string render(RunOutcome const& o, Scenario const& s) {
  std::ostringstream os;
  write_trace_jsonl(o.trace, s.world, os);
  emit_report(o.report, ReportFormat::Csv, os);
  return os.str();
}

void determinism(Criterion& c) {
  std::size_t files = 0;
  for (auto const* name : {"bt_happy.toml", "bt_blocked_relay.toml", "bt_blocked_slow_relay.toml",
                           "bt_wall_obstacle.toml", "bt_jammed.toml", "btl_nlos.toml", "bt_nlos.toml",
                           "bt_clock_skew.toml", "crt_clock_skew.toml", "crt_one_direction.toml",
                           "ultrasound_wormhole.toml"}) {
    auto const a = load_scenario(scenario_path(name));
    auto const b = load_scenario(scenario_path(name));
    c.expect(render(run_scenario(a), a) == render(run_scenario(b), b), std::string(name) + " differs between runs");
    ++files;
  }
  auto const file = load_space(scenario_path("bt_threshold.space.toml"));
  auto const w1 = find_attack(file.space, file.budget, 42);
  auto const w2 = find_attack(file.space, file.budget, 42);
  c.expect(w1 && w2 && w1->trace_digest == w2->trace_digest, "seeded search is reproducible");
  if (w1) all_witnesses.push_back(*w1);
  std::size_t replayed = 0;
  for (auto const& w : all_witnesses) replayed += replay_witness(w);
  c.expect(replayed == all_witnesses.size(), "witness replay " + num(static_cast<long long>(replayed)) + "/" +
                                                 num(static_cast<long long>(all_witnesses.size())));
  c.note(num(static_cast<long long>(files)) + " scenarios byte-identical; " + num(static_cast<long long>(replayed)) +
         " witnesses replayed");
}

}  // namespace

int main() {
  struct Entry {
    int id;
    char const* title;
    std::function<void(Criterion&)> run;
  };
  std::vector<Entry> const entries = {
      {1, "BT relay threshold", bt_threshold},
      {2, "CRT factor of two", crt_factor_two},
      {3, "TL security for positive relay delay", tl_security},
      {4, "TL speed requirement", tl_speed},
      {5, "TL nlos availability failure", tl_nlos},
      {6, "ultrasound distance fraud", ultrasound},
      {7, "clock synchronization", clocks},
      {8, "link-down and no-MAC semantics", no_mac},
      {9, "determinism and witness replay", determinism},
  };
  int failed = 0;
  for (auto const& e : entries) {
    Criterion c;
    auto const start = std::chrono::steady_clock::now();
    try {
      e.run(c);
    } catch (std::exception const& ex) {
      c.expect(false, std::string("exception: ") + ex.what());
    }
    double const secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("[%s] %d %s (%.1f s): %s\n", c.ok() ? "PASS" : "FAIL", e.id, e.title, secs, c.notes().c_str());
    for (auto const& f : c.failures()) std::printf("       %s\n", f.c_str());
    failed += !c.ok();
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(entries.size()) - failed, entries.size());
  return failed == 0 ? 0 : 1;
}
