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

// Run and search reports in three formats: a fixed-layout text table, csv
// (one row per violation or threshold), and jsonl (one object per section).
// Node ids are resolved to names when the report is built, so emitting needs
// nothing else and is byte-stable.

#ifndef NDSIM_REPORT_HPP
#define NDSIM_REPORT_HPP

#include <cstdio>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ndsim/checkers.hpp"
#include "ndsim/scenario.hpp"
#include "ndsim/search.hpp"
#include "ndsim/trace.hpp"

namespace ndsim {

struct DecisionRow {
  std::size_t session = 0;
  std::string decider;
  std::string subject;
  std::string verdict;
  std::string reason;
  Picoseconds t_decided = 0;
  std::optional<Picoseconds> elapsed_ps;
  std::optional<double> d_tof_m;
  std::optional<double> d_loc_m;
  std::size_t chain_length = 0;
};

struct ViolationRow {
  std::string kind;
  std::string decider;
  std::string subject;
  double actual_distance_m = 0.0;
  std::size_t chain_length = 0;
  std::optional<Window> window;
};

struct PropertyRow {
  std::string property;
  bool applicable = true;
  bool holds = true;
  std::vector<ViolationRow> violations;
  std::vector<std::string> notes;
};

struct ThresholdRow {
  std::string protocol;
  Picoseconds measured_threshold_ps = 0;
  Picoseconds last_attack_ps = 0;
  Picoseconds tol_ps = 0;
  std::optional<Picoseconds> analytic_target_ps;
  std::string achieved_by;
  std::size_t probes = 0;
};

struct Summary {
  std::size_t transmissions = 0;
  std::size_t deliveries = 0;
  std::size_t decisions = 0;
  std::size_t accepts = 0;
  std::size_t violations = 0;
};

struct Report {
  std::string scenario_id;
  std::string protocol;
  std::optional<Picoseconds> delta_r_ps;
  Summary summary;
  std::vector<DecisionRow> decisions;
  std::vector<PropertyRow> properties;
  std::vector<ThresholdRow> thresholds;

  /// True when every applicable property holds.
  bool all_hold() const {
    for (auto const& p : properties) {
      if (!p.holds) return false;
    }
    return true;
  }
};

inline Report make_report(Trace const& trace, Scenario const& s, std::vector<PropertyVerdict> const& verdicts) {
  WorldConfig const& w = s.world;
  Report r;
  r.scenario_id = s.id;
  r.protocol = std::string(to_string(s.protocol.kind));
  if (s.adversary) r.delta_r_ps = s.adversary->delta_r;
  r.summary.transmissions = trace.transmissions.size();
  r.summary.deliveries = trace.deliveries.size();
  for (auto const& e : trace.events) {
    if (e.kind != EventKind::Decision) continue;
    Decision const& d = trace.decisions[e.index];
    DecisionRow row{d.session,
                    w.node(d.decider).name,
                    w.node(d.subject).name,
                    std::string(to_string(d.verdict)),
                    std::string(to_string(d.reason)),
                    d.t_decided,
                    d.measured.elapsed_ps,
                    d.measured.d_tof_m,
                    d.measured.d_loc_m,
                    0};
    for (DeliveryId dv : d.evidence) {
      std::size_t const len = causal_chain(trace, dv).size();
      if (row.chain_length == 0 || len < row.chain_length) row.chain_length = len;
    }
    ++r.summary.decisions;
    if (d.verdict == Verdict::Accept) ++r.summary.accepts;
    r.decisions.push_back(std::move(row));
  }
  for (auto const& v : verdicts) {
    PropertyRow p{std::string(to_string(v.property)), v.applicable, v.holds, {}, v.notes};
    for (auto const& x : v.violations) {
      p.violations.push_back(ViolationRow{std::string(to_string(x.kind)), w.node(x.decider).name,
                                          w.node(x.subject).name, x.actual_distance_m, x.chain_length, x.window});
    }
    r.summary.violations += p.violations.size();
    r.properties.push_back(std::move(p));
  }
  return r;
}

inline ThresholdRow make_threshold_row(ThresholdResult const& t) {
  return ThresholdRow{std::string(to_string(t.protocol)), t.min_safe_ps, t.last_attack_ps, t.tol_ps,
                      t.analytic_target_ps, t.achieved_by, t.probes.size()};
}

enum class ReportFormat { Human, Csv, Jsonl };

namespace detail {

inline std::string fixed6(double d) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", d);
  return buf;
}

template <typename T>
std::string opt_str(std::optional<T> const& v) {
  if (!v) return "-";
  if constexpr (std::is_floating_point_v<T>) {
    return fixed6(*v);
  } else {
    return std::to_string(*v);
  }
}

inline std::string csv_field(std::string const& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

inline std::string property_state(Report const& r, std::string_view name) {
  for (auto const& p : r.properties) {
    if (p.property != name) continue;
    if (!p.applicable) return "n/a";
    return p.holds ? "holds" : "violated";
  }
  return "";
}

inline void emit_human(Report const& r, std::ostream& out) {
  out << "scenario  " << r.scenario_id << "\n";
  out << "protocol  " << r.protocol << "\n";
  if (r.delta_r_ps) {
    out << "delta_r   " << (*r.delta_r_ps == kNeverRelay ? std::string("never") : std::to_string(*r.delta_r_ps) + " ps")
        << "\n";
  }
  if (r.thresholds.empty() || r.summary.transmissions > 0)
    out << "events    tx=" << r.summary.transmissions << " dv=" << r.summary.deliveries
      << " decisions=" << r.summary.decisions << " accepts=" << r.summary.accepts << "\n";
  if (!r.decisions.empty()) {
    out << "\n"
        << pad("session", 9) << pad("decider", 10) << pad("subject", 10) << pad("verdict", 9) << pad("reason", 19)
        << pad("elapsed_ps", 14) << pad("d_tof_m", 16) << pad("d_loc_m", 16) << "chain\n";
    for (auto const& d : r.decisions) {
      out << pad(std::to_string(d.session), 9) << pad(d.decider, 10) << pad(d.subject, 10) << pad(d.verdict, 9)
          << pad(d.reason, 19) << pad(opt_str(d.elapsed_ps), 14) << pad(opt_str(d.d_tof_m), 16)
          << pad(opt_str(d.d_loc_m), 16) << d.chain_length << "\n";
    }
  }
  if (!r.properties.empty()) {
    out << "\n" << pad("property", 22) << pad("result", 10) << "violations\n";
    for (auto const& p : r.properties) {
      out << pad(p.property, 22) << pad(p.applicable ? (p.holds ? "holds" : "VIOLATED") : "n/a", 10)
          << p.violations.size() << "\n";
    }
    for (auto const& p : r.properties) {
      for (auto const& v : p.violations) {
        out << "  " << v.kind << ": decider " << v.decider << ", subject " << v.subject << ", distance "
            << fixed6(v.actual_distance_m) << " m, chain " << v.chain_length;
        if (v.window) out << ", window [" << v.window->start << ", " << v.window->end << "] ps";
        out << "\n";
      }
      for (auto const& n : p.notes) out << "  note: " << n << "\n";
    }
  }
  if (!r.thresholds.empty()) {
    out << "\n"
        << pad("protocol", 10) << pad("threshold_ps", 14) << pad("last_attack_ps", 16) << pad("tol_ps", 8)
        << pad("analytic_ps", 13) << pad("probes", 8) << "achieved_by\n";
    for (auto const& t : r.thresholds) {
      out << pad(t.protocol, 10) << pad(std::to_string(t.measured_threshold_ps), 14)
          << pad(std::to_string(t.last_attack_ps), 16) << pad(std::to_string(t.tol_ps), 8)
          << pad(opt_str(t.analytic_target_ps), 13) << pad(std::to_string(t.probes), 8)
          << (t.achieved_by.empty() ? "-" : t.achieved_by) << "\n";
    }
  }
}

inline constexpr std::string_view kCsvHeader =
    "scenario_id,protocol,delta_r_ps,distance_correctness,link_correctness,availability,accepts,violation,"
    "decider,subject,actual_distance_m,chain_length,measured_threshold_ps,analytic_target_ps,achieved_by";

inline void emit_csv(Report const& r, std::ostream& out) {
  out << kCsvHeader << "\n";
  std::string delta;
  if (r.delta_r_ps) delta = *r.delta_r_ps == kNeverRelay ? "never" : std::to_string(*r.delta_r_ps);
  std::string const prefix = csv_field(r.scenario_id) + "," + r.protocol + "," + delta + "," +
                             property_state(r, "distance_correctness") + "," + property_state(r, "link_correctness") +
                             "," + property_state(r, "availability") + "," +
                             (r.properties.empty() ? std::string() : std::to_string(r.summary.accepts));
  bool any = false;
  for (auto const& p : r.properties) {
    for (auto const& v : p.violations) {
      out << prefix << "," << v.kind << "," << csv_field(v.decider) << "," << csv_field(v.subject) << ","
          << fixed6(v.actual_distance_m) << "," << v.chain_length << ",,,\n";
      any = true;
    }
  }
  if (!any && !r.properties.empty()) {
    out << prefix << ",,,,,,,,\n";
  }
  for (auto const& t : r.thresholds) {
    out << csv_field(r.scenario_id) << "," << t.protocol << "," << t.last_attack_ps << ",,,,,,,,,,"
        << t.measured_threshold_ps << "," << (t.analytic_target_ps ? std::to_string(*t.analytic_target_ps) : "")
        << "," << csv_field(t.achieved_by) << "\n";
  }
}

inline void emit_jsonl(Report const& r, std::ostream& out) {
  using ojson = nlohmann::ordered_json;
  auto opt = [](auto const& v) -> ojson {
    if (!v) return nullptr;
    return *v;
  };
  ojson head;
  head["section"] = "summary";
  head["scenario_id"] = r.scenario_id;
  head["protocol"] = r.protocol;
  head["delta_r_ps"] = opt(r.delta_r_ps);
  head["transmissions"] = r.summary.transmissions;
  head["deliveries"] = r.summary.deliveries;
  head["decisions"] = r.summary.decisions;
  head["accepts"] = r.summary.accepts;
  head["violations"] = r.summary.violations;
  out << head.dump() << "\n";
  for (auto const& d : r.decisions) {
    ojson j;
    j["section"] = "decision";
    j["session"] = d.session;
    j["decider"] = d.decider;
    j["subject"] = d.subject;
    j["verdict"] = d.verdict;
    j["reason"] = d.reason;
    j["t_decided_ps"] = d.t_decided;
    j["elapsed_ps"] = opt(d.elapsed_ps);
    j["d_tof_m"] = opt(d.d_tof_m);
    j["d_loc_m"] = opt(d.d_loc_m);
    j["chain_length"] = d.chain_length;
    out << j.dump() << "\n";
  }
  for (auto const& p : r.properties) {
    ojson j;
    j["section"] = "property";
    j["property"] = p.property;
    j["applicable"] = p.applicable;
    j["holds"] = p.holds;
    ojson vs = ojson::array();
    for (auto const& v : p.violations) {
      ojson x;
      x["kind"] = v.kind;
      x["decider"] = v.decider;
      x["subject"] = v.subject;
      x["actual_distance_m"] = v.actual_distance_m;
      x["chain_length"] = v.chain_length;
      x["window"] = v.window ? ojson::array({v.window->start, v.window->end}) : ojson(nullptr);
      vs.push_back(x);
    }
    j["violations"] = vs;
    j["notes"] = p.notes;
    out << j.dump() << "\n";
  }
  for (auto const& t : r.thresholds) {
    ojson j;
    j["section"] = "threshold";
    j["protocol"] = t.protocol;
    j["measured_threshold_ps"] = t.measured_threshold_ps;
    j["last_attack_ps"] = t.last_attack_ps;
    j["tol_ps"] = t.tol_ps;
    j["analytic_target_ps"] = opt(t.analytic_target_ps);
    j["achieved_by"] = t.achieved_by;
    j["probes"] = t.probes;
    out << j.dump() << "\n";
  }
}

}  // namespace detail

inline void emit_report(Report const& r, ReportFormat format, std::ostream& sink) {
  switch (format) {
    case ReportFormat::Human: detail::emit_human(r, sink); break;
    case ReportFormat::Csv: detail::emit_csv(r, sink); break;
    case ReportFormat::Jsonl: detail::emit_jsonl(r, sink); break;
  }
  sink.flush();
  if (!sink) throw Error("report sink write failed");
}

}  // namespace ndsim

#endif  // NDSIM_REPORT_HPP
