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

// Scenario and search-space files.
//
//   [world]            radio_range_m, v_mps, v_adv_mps, clock_bound_ps
//   [[world.nodes]]    name, id, x_m, y_m, role, clock_offset_ps
//   [[world.obstacles]] x1_m, y1_m, x2_m, y2_m, kind, nlos_ps
//   [[links.pairs]]    src, dst, up_ps = [[start, end], [start]], bidirectional
//   [[nlos.pairs]]     src, dst, delay_ps, bidirectional
//   [protocol]         kind, range_m, eps_t_ps, eps_d_m, eps_sync_ps,
//                      proc_delay_ps, timeout_ps
//   [adversary]        members, delta_r_ps, hold_ps, tunnel_extra_ps,
//                      strategy, src, dst, kinds, entry, exit
//   [[sessions]]       initiator, responder, t_start_ps, expect_available
//   [run]              id, t_end_ps, seed, event_cap
//
// Nodes are referenced by name. A one-element up interval is open-ended.
// delta_r_ps = "never" disables relaying. Unknown keys are errors.

#ifndef NDSIM_SCENARIO_IO_HPP
#define NDSIM_SCENARIO_IO_HPP

#include <algorithm>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "ndsim/scenario.hpp"
#include "ndsim/search.hpp"
#include "ndsim/toml.hpp"

namespace ndsim {

namespace io {

inline Role parse_role(std::string const& s, std::string const& field) {
  if (s == "correct") return Role::Correct;
  if (s == "adversarial") return Role::Adversarial;
  throw ConfigError(field + " must be \"correct\" or \"adversarial\", found \"" + s + "\"");
}

inline MessageKind parse_kind(std::string const& s, std::string const& field) {
  for (MessageKind k : {MessageKind::Beacon, MessageKind::Challenge, MessageKind::Response}) {
    if (to_string(k) == s) return k;
  }
  throw ConfigError(field + ": unknown message kind \"" + s + "\"");
}

inline ProtocolKind parse_protocol_kind(std::string const& s, std::string const& field) {
  if (auto k = parse_protocol(s)) return *k;
  throw ConfigError(field + " must be one of BT, BTL, CRT, CRTL, found \"" + s + "\"");
}

inline StrategyKind parse_strategy_kind(std::string const& s, std::string const& field) {
  for (int i = 0; i < 5; ++i) {
    auto const k = static_cast<StrategyKind>(i);
    if (to_string(k) == s) return k;
  }
  throw ConfigError(field + ": unknown strategy \"" + s + "\"");
}

inline Placement parse_placement(std::string const& s, std::string const& field) {
  for (Placement p : {Placement::Midpoint, Placement::NearA, Placement::NearB, Placement::Wormhole}) {
    if (to_string(p) == s) return p;
  }
  throw ConfigError(field + ": unknown placement \"" + s + "\"");
}

inline std::vector<std::string> strings(toml::Reader& r, std::string_view key) {
  std::vector<std::string> out;
  auto arr = r.optional<toml::Array>(key);
  if (!arr) return out;
  for (std::size_t i = 0; i < arr->size(); ++i) {
    out.push_back(toml::Reader::convert<std::string>((*arr)[i], r.field(key) + "[" + std::to_string(i) + "]"));
  }
  return out;
}

inline std::vector<std::int64_t> integers(toml::Reader& r, std::string_view key) {
  std::vector<std::int64_t> out;
  auto arr = r.optional<toml::Array>(key);
  if (!arr) return out;
  for (std::size_t i = 0; i < arr->size(); ++i) {
    out.push_back(toml::Reader::convert<std::int64_t>((*arr)[i], r.field(key) + "[" + std::to_string(i) + "]"));
  }
  return out;
}

class NameTable {
 public:
  explicit NameTable(std::vector<NodeSpec> const& nodes) : nodes_(&nodes) {}

  NodeId operator()(std::string const& name, std::string const& field) const {
    for (auto const& n : *nodes_) {
      if (n.name == name) return n.id;
    }
    throw ConfigError(field + " references unknown node \"" + name + "\"");
  }

 private:
  std::vector<NodeSpec> const* nodes_;
};

inline ProtocolConfig read_protocol(toml::Reader& r, ProtocolConfig cfg) {
  if (auto k = r.optional<std::string>("kind")) cfg.kind = parse_protocol_kind(*k, r.field("kind"));
  cfg.range_m = r.get_or<double>("range_m", cfg.range_m);
  cfg.eps_t = r.get_or<std::int64_t>("eps_t_ps", cfg.eps_t);
  cfg.eps_d = r.get_or<double>("eps_d_m", cfg.eps_d);
  cfg.eps_sync = r.get_or<std::int64_t>("eps_sync_ps", cfg.eps_sync);
  cfg.proc_delay = r.get_or<std::int64_t>("proc_delay_ps", cfg.proc_delay);
  if (auto t = r.optional<std::int64_t>("timeout_ps")) cfg.timeout = *t;
  r.finish();
  return cfg;
}

inline Picoseconds read_delta(toml::Reader& r, std::string_view key, Picoseconds fallback) {
  toml::Value const* v = r.raw(key);
  if (v == nullptr) return fallback;
  if (auto const* s = std::get_if<std::string>(&v->data)) {
    if (*s == "never") return kNeverRelay;
    throw ConfigError(r.field(key) + " must be an integer or \"never\"");
  }
  return toml::Reader::convert<std::int64_t>(*v, r.field(key));
}

inline void write_protocol(std::ostream& out, ProtocolConfig const& p) {
  out << "[protocol]\n";
  out << "kind = " << toml::quote(to_string(p.kind)) << "\n";
  out << "range_m = " << toml::format_float(p.range_m) << "\n";
  out << "eps_t_ps = " << p.eps_t << "\n";
  out << "eps_d_m = " << toml::format_float(p.eps_d) << "\n";
  out << "eps_sync_ps = " << p.eps_sync << "\n";
  out << "proc_delay_ps = " << p.proc_delay << "\n";
  if (p.timeout) out << "timeout_ps = " << *p.timeout << "\n";
}

}  // namespace io

/// Parses scenario text; `origin` names the source in error messages.
inline Scenario parse_scenario(std::string_view text, std::string const& origin = "<scenario>") {
  toml::Table doc;
  try {
    doc = toml::parse(text);
  } catch (toml::ParseError const& e) {
    throw ConfigError(origin + ": " + e.what());
  }
  try {
    // Misspelled sections would otherwise surface as "X is required".
    for (auto const& [key, v] : doc) {
      static constexpr std::string_view known[] = {"world", "links", "nlos", "protocol", "adversary", "sessions", "run"};
      if (std::find(std::begin(known), std::end(known), key) == std::end(known)) {
        throw ConfigError("unknown key '" + key + "' (line " + std::to_string(v.pos.line) + ")");
      }
    }
    toml::Reader root(doc, "");
    Scenario sc;
    WorldSource& src = sc.source;

    auto world = root.table("world");
    if (!world) throw ConfigError("world is required");
    src.radio_range = world->get_or<double>("radio_range_m", src.radio_range);
    src.channel.v = world->get_or<double>("v_mps", src.channel.v);
    src.channel.v_adv = world->get_or<double>("v_adv_mps", src.channel.v_adv);
    if (auto cb = world->optional<std::int64_t>("clock_bound_ps")) src.clock_bound = *cb;
    auto nodes = world->tables("nodes");
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      auto& n = nodes[i];
      NodeSpec spec;
      spec.name = n.required<std::string>("name");
      spec.id = NodeId{static_cast<std::uint32_t>(n.get_or<std::int64_t>("id", static_cast<std::int64_t>(i)))};
      spec.pos = {n.required<double>("x_m"), n.get_or<double>("y_m", 0.0)};
      spec.role = io::parse_role(n.get_or<std::string>("role", "correct"), n.field("role"));
      spec.clock_offset = n.get_or<std::int64_t>("clock_offset_ps", 0);
      n.finish();
      src.nodes.push_back(std::move(spec));
    }
    for (auto& o : world->tables("obstacles")) {
      Obstacle ob;
      ob.seg = {{o.required<double>("x1_m"), o.required<double>("y1_m")},
                {o.required<double>("x2_m"), o.required<double>("y2_m")}};
      std::string const kind = o.get_or<std::string>("kind", "blocking");
      if (kind == "blocking") {
        ob.kind = ObstacleKind::Blocking;
      } else if (kind == "delaying") {
        ob.kind = ObstacleKind::Delaying;
      } else {
        throw ConfigError(o.field("kind") + " must be \"blocking\" or \"delaying\"");
      }
      ob.nlos_delay = o.get_or<std::int64_t>("nlos_ps", 0);
      if (ob.nlos_delay < 0) throw ConfigError(o.field("nlos_ps") + " must be >= 0");
      o.finish();
      src.obstacles.push_back(ob);
    }
    world->finish();

    io::NameTable const node_id(src.nodes);
    if (auto links = root.table("links")) {
      for (auto& p : links->tables("pairs")) {
        NodeId const a = node_id(p.required<std::string>("src"), p.field("src"));
        NodeId const b = node_id(p.required<std::string>("dst"), p.field("dst"));
        std::vector<Interval> up;
        auto arr = p.required<toml::Array>("up_ps");
        for (std::size_t i = 0; i < arr.size(); ++i) {
          std::string const where = p.field("up_ps") + "[" + std::to_string(i) + "]";
          auto iv = toml::Reader::convert<toml::Array>(arr[i], where);
          if (iv.empty() || iv.size() > 2) throw ConfigError(where + " must be [start] or [start, end]");
          Interval interval;
          interval.start = toml::Reader::convert<std::int64_t>(iv[0], where);
          if (iv.size() == 2) interval.end = toml::Reader::convert<std::int64_t>(iv[1], where);
          up.push_back(interval);
        }
        bool const both = p.get_or<bool>("bidirectional", false);
        p.finish();
        src.links.push_back(LinkOverride{a, b, up});
        if (both) src.links.push_back(LinkOverride{b, a, up});
      }
      links->finish();
    }
    if (auto nlos = root.table("nlos")) {
      for (auto& p : nlos->tables("pairs")) {
        NodeId const a = node_id(p.required<std::string>("src"), p.field("src"));
        NodeId const b = node_id(p.required<std::string>("dst"), p.field("dst"));
        Picoseconds const d = p.required<std::int64_t>("delay_ps");
        if (d < 0) throw ConfigError(p.field("delay_ps") + " must be >= 0");
        bool const both = p.get_or<bool>("bidirectional", false);
        p.finish();
        src.nlos.push_back(NlosOverride{a, b, d});
        if (both) src.nlos.push_back(NlosOverride{b, a, d});
      }
      nlos->finish();
    }

    auto proto = root.table("protocol");
    if (!proto) throw ConfigError("protocol is required");
    sc.protocol = io::read_protocol(*proto, ProtocolConfig{});

    if (auto adv = root.table("adversary")) {
      AdversaryConfig a;
      for (auto const& m : io::strings(*adv, "members")) a.members.push_back(node_id(m, adv->field("members")));
      a.delta_r = io::read_delta(*adv, "delta_r_ps", 0);
      a.hold = adv->get_or<std::int64_t>("hold_ps", 0);
      a.tunnel_extra = adv->get_or<std::int64_t>("tunnel_extra_ps", 0);
      std::string const strategy = adv->get_or<std::string>("strategy", "min_delay");
      auto named = [&](std::string_view key) { return node_id(adv->required<std::string>(key), adv->field(key)); };
      if (strategy == "relay_all") {
        a.strategy = RelayAll{};
      } else if (strategy == "min_delay") {
        a.strategy = MinDelay{};
      } else if (strategy == "one_direction") {
        a.strategy = OneDirection{named("src"), named("dst")};
      } else if (strategy == "selective") {
        Selective s;
        for (auto const& k : io::strings(*adv, "kinds")) s.kinds.push_back(io::parse_kind(k, adv->field("kinds")));
        a.strategy = s;
      } else if (strategy == "wormhole") {
        a.strategy = Wormhole{named("entry"), named("exit")};
      } else {
        throw ConfigError(adv->field("strategy") + ": unknown strategy \"" + strategy + "\"");
      }
      adv->finish();
      sc.adversary = a;
    }

    for (auto& s : root.tables("sessions")) {
      SessionSpec spec;
      spec.initiator = node_id(s.required<std::string>("initiator"), s.field("initiator"));
      spec.responder = node_id(s.required<std::string>("responder"), s.field("responder"));
      spec.t_start = s.get_or<std::int64_t>("t_start_ps", 0);
      spec.expect_available = s.get_or<bool>("expect_available", true);
      s.finish();
      sc.sessions.push_back(spec);
    }

    auto run = root.table("run");
    if (!run) throw ConfigError("run is required");
    sc.id = run->get_or<std::string>("id", sc.id);
    sc.t_end = run->required<std::int64_t>("t_end_ps");
    sc.seed = static_cast<std::uint64_t>(run->get_or<std::int64_t>("seed", 0));
    std::int64_t const cap = run->get_or<std::int64_t>("event_cap", static_cast<std::int64_t>(kDefaultEventCap));
    if (cap < 1) throw ConfigError("run.event_cap must be >= 1");
    sc.event_cap = static_cast<std::uint64_t>(cap);
    run->finish();
    root.finish();

    sc.finalize();
    return sc;
  } catch (ConfigError const& e) {
    throw ConfigError(origin + ": " + e.what());
  }
}

inline std::string read_text_file(std::string const& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline Scenario load_scenario(std::string const& path) { return parse_scenario(read_text_file(path), path); }

/// Serializes the scenario source; parse_scenario(save_scenario(s)) == s.
inline std::string save_scenario(Scenario const& sc) {
  std::ostringstream out;
  WorldSource const& src = sc.source;
  auto name = [&](NodeId id) -> std::string const& {
    for (auto const& n : src.nodes) {
      if (n.id == id) return n.name;
    }
    throw ConfigError("save_scenario: unknown node id " + std::to_string(id.value));
  };
  out << "[world]\n";
  out << "radio_range_m = " << toml::format_float(src.radio_range) << "\n";
  out << "v_mps = " << toml::format_float(src.channel.v) << "\n";
  out << "v_adv_mps = " << toml::format_float(src.channel.v_adv) << "\n";
  if (src.clock_bound) out << "clock_bound_ps = " << *src.clock_bound << "\n";
  for (auto const& n : src.nodes) {
    out << "\n[[world.nodes]]\n";
    out << "name = " << toml::quote(n.name) << "\n";
    out << "id = " << n.id.value << "\n";
    out << "x_m = " << toml::format_float(n.pos.x) << "\n";
    out << "y_m = " << toml::format_float(n.pos.y) << "\n";
    out << "role = " << (n.role == Role::Correct ? "\"correct\"" : "\"adversarial\"") << "\n";
    out << "clock_offset_ps = " << n.clock_offset << "\n";
  }
  for (auto const& o : src.obstacles) {
    out << "\n[[world.obstacles]]\n";
    out << "x1_m = " << toml::format_float(o.seg.a.x) << "\n";
    out << "y1_m = " << toml::format_float(o.seg.a.y) << "\n";
    out << "x2_m = " << toml::format_float(o.seg.b.x) << "\n";
    out << "y2_m = " << toml::format_float(o.seg.b.y) << "\n";
    out << "kind = " << (o.kind == ObstacleKind::Blocking ? "\"blocking\"" : "\"delaying\"") << "\n";
    out << "nlos_ps = " << o.nlos_delay << "\n";
  }
  for (auto const& l : src.links) {
    out << "\n[[links.pairs]]\n";
    out << "src = " << toml::quote(name(l.src)) << "\n";
    out << "dst = " << toml::quote(name(l.dst)) << "\n";
    out << "up_ps = [";
    for (std::size_t i = 0; i < l.up.size(); ++i) {
      if (i) out << ", ";
      out << "[" << l.up[i].start;
      if (l.up[i].end != kForever) out << ", " << l.up[i].end;
      out << "]";
    }
    out << "]\n";
  }
  for (auto const& n : src.nlos) {
    out << "\n[[nlos.pairs]]\n";
    out << "src = " << toml::quote(name(n.src)) << "\n";
    out << "dst = " << toml::quote(name(n.dst)) << "\n";
    out << "delay_ps = " << n.delay << "\n";
  }
  out << "\n";
  io::write_protocol(out, sc.protocol);
  if (sc.adversary) {
    AdversaryConfig const& a = *sc.adversary;
    out << "\n[adversary]\n";
    out << "members = [";
    for (std::size_t i = 0; i < a.members.size(); ++i) out << (i ? ", " : "") << toml::quote(name(a.members[i]));
    out << "]\n";
    if (a.delta_r == kNeverRelay) {
      out << "delta_r_ps = \"never\"\n";
    } else {
      out << "delta_r_ps = " << a.delta_r << "\n";
    }
    out << "hold_ps = " << a.hold << "\n";
    out << "tunnel_extra_ps = " << a.tunnel_extra << "\n";
    out << "strategy = " << toml::quote(strategy_name(a.strategy)) << "\n";
    if (auto const* od = std::get_if<OneDirection>(&a.strategy)) {
      out << "src = " << toml::quote(name(od->src)) << "\n";
      out << "dst = " << toml::quote(name(od->dst)) << "\n";
    } else if (auto const* sel = std::get_if<Selective>(&a.strategy)) {
      out << "kinds = [";
      for (std::size_t i = 0; i < sel->kinds.size(); ++i) out << (i ? ", " : "") << toml::quote(to_string(sel->kinds[i]));
      out << "]\n";
    } else if (auto const* wh = std::get_if<Wormhole>(&a.strategy)) {
      out << "entry = " << toml::quote(name(wh->entry)) << "\n";
      out << "exit = " << toml::quote(name(wh->exit)) << "\n";
    }
  }
  for (auto const& s : sc.sessions) {
    out << "\n[[sessions]]\n";
    out << "initiator = " << toml::quote(name(s.initiator)) << "\n";
    out << "responder = " << toml::quote(name(s.responder)) << "\n";
    out << "t_start_ps = " << s.t_start << "\n";
    out << "expect_available = " << (s.expect_available ? "true" : "false") << "\n";
  }
  out << "\n[run]\n";
  out << "id = " << toml::quote(sc.id) << "\n";
  out << "t_end_ps = " << sc.t_end << "\n";
  out << "seed = " << static_cast<std::int64_t>(sc.seed) << "\n";
  out << "event_cap = " << sc.event_cap << "\n";
  return out.str();
}

// --- search spaces --------------------------------------------------------------
//
//   [protocol]    as in scenarios (kind may be given on the command line)
//   [[channels]]  v_mps, v_adv_mps
//   [space]       d_min_m, d_max_m, d_step_m, placements, strategies,
//                 asymmetric_links, delta_min_ps, delta_max_ps, delta_step_ps,
//                 extra_deltas_ps, tunnel_extra_ps, adaptive_hold, threads,
//                 budget, seed

struct SpaceFile {
  SearchSpace space;
  std::size_t budget = 1000;
  std::uint64_t seed = 0;
};

inline SpaceFile parse_space(std::string_view text, std::string const& origin = "<space>") {
  toml::Table doc;
  try {
    doc = toml::parse(text);
  } catch (toml::ParseError const& e) {
    throw ConfigError(origin + ": " + e.what());
  }
  try {
    toml::Reader root(doc, "");
    SpaceFile f;
    SearchSpace& s = f.space;
    if (auto proto = root.table("protocol")) s.protocol = io::read_protocol(*proto, s.protocol);
    auto channels = root.tables("channels");
    if (!channels.empty()) {
      s.channels.clear();
      for (auto& c : channels) {
        ChannelParams ch;
        ch.v = c.get_or<double>("v_mps", ch.v);
        ch.v_adv = c.get_or<double>("v_adv_mps", ch.v_adv);
        c.finish();
        s.channels.push_back(ch);
      }
    }
    if (auto sp = root.table("space")) {
      s.d_min_m = sp->get_or<double>("d_min_m", s.d_min_m);
      s.d_max_m = sp->get_or<double>("d_max_m", s.d_max_m);
      s.d_step_m = sp->get_or<double>("d_step_m", s.d_step_m);
      if (sp->has("placements")) {
        s.placements.clear();
        for (auto const& p : io::strings(*sp, "placements")) {
          s.placements.push_back(io::parse_placement(p, sp->field("placements")));
        }
      }
      if (sp->has("strategies")) {
        s.strategies.clear();
        for (auto const& k : io::strings(*sp, "strategies")) {
          s.strategies.push_back(io::parse_strategy_kind(k, sp->field("strategies")));
        }
      }
      s.asymmetric_links = sp->get_or<bool>("asymmetric_links", s.asymmetric_links);
      s.delta_min = sp->get_or<std::int64_t>("delta_min_ps", s.delta_min);
      s.delta_max = sp->get_or<std::int64_t>("delta_max_ps", s.delta_max);
      s.delta_step = sp->get_or<std::int64_t>("delta_step_ps", s.delta_step);
      s.extra_deltas = io::integers(*sp, "extra_deltas_ps");
      s.tunnel_extra = sp->get_or<std::int64_t>("tunnel_extra_ps", s.tunnel_extra);
      s.adaptive_hold = sp->get_or<bool>("adaptive_hold", s.adaptive_hold);
      std::int64_t const threads = sp->get_or<std::int64_t>("threads", 0);
      if (threads < 0) throw ConfigError("space.threads must be >= 0");
      s.threads = static_cast<unsigned>(threads);
      std::int64_t const budget = sp->get_or<std::int64_t>("budget", static_cast<std::int64_t>(f.budget));
      if (budget < 1) throw ConfigError("space.budget must be >= 1");
      f.budget = static_cast<std::size_t>(budget);
      f.seed = static_cast<std::uint64_t>(sp->get_or<std::int64_t>("seed", 0));
      sp->finish();
    }
    root.finish();
    validate_space(s);
    return f;
  } catch (ConfigError const& e) {
    throw ConfigError(origin + ": " + e.what());
  }
}

inline SpaceFile load_space(std::string const& path) { return parse_space(read_text_file(path), path); }

}  // namespace ndsim

#endif  // NDSIM_SCENARIO_IO_HPP
