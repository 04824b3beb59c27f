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

// ndsim command line.
//
//   ndsim run <scenario.toml> [--trace out.jsonl] [--report out.csv|-]
//   ndsim check <scenario.toml>
//   ndsim search --space <space.toml> --protocol <BT|BTL|CRT|CRTL>
//                [--bisect --tol-ps N] [--budget N] [--witness out.toml]
//   ndsim oracle --space <space.toml> [--protocol P]
//
// Exit codes: 0 success (check: all properties hold), 2 violation (check
// only), 1 error. ND_SEED overrides the seed of the scenario or space.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "ndsim/ndsim.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitViolation = 2;

std::optional<std::uint64_t> env_seed() {
  char const* s = std::getenv("ND_SEED");
  if (s == nullptr || *s == '\0') return std::nullopt;
  std::size_t used = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(s, &used, 0);
  } catch (std::exception const&) {
    throw ndsim::ConfigError(std::string("ND_SEED is not an unsigned integer: ") + s);
  }
  if (s[used] != '\0') throw ndsim::ConfigError(std::string("ND_SEED is not an unsigned integer: ") + s);
  return v;
}

ndsim::ReportFormat parse_format(std::string const& f) {
  if (f == "human") return ndsim::ReportFormat::Human;
  if (f == "csv") return ndsim::ReportFormat::Csv;
  if (f == "jsonl") return ndsim::ReportFormat::Jsonl;
  throw ndsim::ConfigError("unknown report format '" + f + "'");
}

/// Writes to `path`, or stdout when path is "-".
template <typename Fn>
void with_sink(std::string const& path, Fn&& fn) {
  if (path == "-") {
    fn(std::cout);
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ndsim::Error("cannot open " + path + " for writing");
  fn(out);
  out.close();
  if (!out) throw ndsim::Error("write to " + path + " failed");
}

ndsim::Scenario load_with_seed(std::string const& path) {
  ndsim::Scenario s = ndsim::load_scenario(path);
  if (auto seed = env_seed()) s.seed = *seed;
  return s;
}

std::string witness_file(ndsim::AttackWitness const& w) {
  auto const& sc = w.scenario;
  auto const& v = w.violation;
  std::string out = "# attack witness\n";
  out += "# violation = " + std::string(ndsim::to_string(v.kind)) + ", decider " + sc.world.node(v.decider).name +
         ", subject " + sc.world.node(v.subject).name + ", distance " + ndsim::toml::format_float(v.actual_distance_m) +
         " m, chain " + std::to_string(v.chain_length) + "\n";
  out += "# candidate = " + w.label + "\n";
  out += "# trace_digest = " + std::to_string(w.trace_digest) + "\n\n";
  return out + ndsim::save_scenario(sc);
}

void print_witness(ndsim::AttackWitness const& w, std::ostream& out) {
  auto const& v = w.violation;
  out << "witness   " << w.scenario.id << "\n";
  out << "candidate " << w.label << "\n";
  out << "distance  " << ndsim::toml::format_float(w.distance_m) << " m\n";
  out << "delta_r   " << w.delta_r << " ps\n";
  out << "violation " << ndsim::to_string(v.kind) << " (decider " << w.scenario.world.node(v.decider).name
      << ", subject " << w.scenario.world.node(v.subject).name << ", chain " << v.chain_length << ")\n";
  out << "digest    " << w.trace_digest << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deterministic simulator and verifier for secure neighbor discovery under relay attacks"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::string trace_path;
  std::string report_path;
  std::string format;

  auto* run = app.add_subcommand("run", "simulate a scenario and report");
  run->add_option("scenario", scenario_path, "scenario file")->required();
  run->add_option("--trace", trace_path, "write the trace as JSONL");
  run->add_option("--report", report_path, "write the report (csv unless --format is given), - for stdout");
  run->add_option("--format", format, "report format: human, csv, jsonl");

  auto* check = app.add_subcommand("check", "run the property checkers; exit 2 on a violation");
  check->add_option("scenario", scenario_path, "scenario file")->required();

  std::string space_path;
  std::string protocol;
  bool bisect = false;
  long long tol_ps = 100;
  long long budget = 0;
  std::string witness_path;

  auto* search = app.add_subcommand("search", "search for relay attacks");
  search->add_option("--space", space_path, "search space file")->required();
  search->add_option("--protocol", protocol, "BT, BTL, CRT or CRTL")->required();
  search->add_flag("--bisect", bisect, "find the minimal safe relay delay");
  search->add_option("--tol-ps", tol_ps, "bisection tolerance in ps");
  search->add_option("--budget", budget, "random trials (default from the space file)");
  search->add_option("--witness", witness_path, "write the witness scenario");
  search->add_option("--report", report_path, "write the threshold report (csv unless --format), - for stdout");
  search->add_option("--format", format, "report format: human, csv, jsonl");

  auto* oracle = app.add_subcommand("oracle", "exhaustive scan of a search space");
  oracle->add_option("--space", space_path, "search space file")->required();
  oracle->add_option("--protocol", protocol, "overrides the protocol kind of the space");

  try {
    app.parse(argc, argv);
  } catch (CLI::ParseError const& e) {
    int const code = app.exit(e);
    return code == 0 ? kExitOk : kExitError;
  }

  try {
    if (run->parsed()) {
      ndsim::Scenario const s = load_with_seed(scenario_path);
      auto const outcome = ndsim::run_scenario(s);
      if (!trace_path.empty()) {
        with_sink(trace_path, [&](std::ostream& o) { ndsim::write_trace_jsonl(outcome.trace, s.world, o); });
      }
      if (!report_path.empty()) {
        auto const f = parse_format(format.empty() ? "csv" : format);
        with_sink(report_path, [&](std::ostream& o) { ndsim::emit_report(outcome.report, f, o); });
      }
      if (report_path != "-") {
        bool const custom = report_path.empty() && !format.empty();
        ndsim::emit_report(outcome.report, parse_format(custom ? format : "human"), std::cout);
      }
      return kExitOk;
    }

    if (check->parsed()) {
      ndsim::Scenario const s = load_with_seed(scenario_path);
      auto const outcome = ndsim::run_scenario(s);
      ndsim::emit_report(outcome.report, ndsim::ReportFormat::Human, std::cout);
      return outcome.report.all_hold() ? kExitOk : kExitViolation;
    }

    if (search->parsed() || oracle->parsed()) {
      ndsim::SpaceFile file = ndsim::load_space(space_path);
      if (!protocol.empty()) {
        auto k = ndsim::parse_protocol(protocol);
        if (!k) throw ndsim::ConfigError("--protocol must be one of BT, BTL, CRT, CRTL");
        file.space.protocol.kind = *k;
      }
      if (auto seed = env_seed()) file.seed = *seed;
      ndsim::validate_space(file.space);

      if (oracle->parsed()) {
        auto const witnesses = ndsim::exhaustive_scan(file.space);
        std::cout << "delta_r_ps,distance_m,candidate,violation,chain_length\n";
        for (auto const& w : witnesses) {
          std::cout << w.delta_r << "," << ndsim::toml::format_float(w.distance_m) << "," << w.label << ","
                    << ndsim::to_string(w.violation.kind) << "," << w.violation.chain_length << "\n";
        }
        std::cerr << "witnesses: " << witnesses.size() << "\n";
        return kExitOk;
      }

      if (bisect) {
        auto const result = ndsim::min_safe_relay_delay(file.space, tol_ps);
        ndsim::Report report;
        report.scenario_id = space_path;
        report.protocol = std::string(ndsim::to_string(file.space.protocol.kind));
        report.thresholds.push_back(ndsim::make_threshold_row(result));
        if (!report_path.empty()) {
          auto const f = parse_format(format.empty() ? "csv" : format);
          with_sink(report_path, [&](std::ostream& o) { ndsim::emit_report(report, f, o); });
        }
        if (report_path != "-") ndsim::emit_report(report, ndsim::ReportFormat::Human, std::cout);
        if (!witness_path.empty() && result.boundary_witness) {
          with_sink(witness_path, [&](std::ostream& o) { o << witness_file(*result.boundary_witness); });
        }
        return kExitOk;
      }

      std::size_t const trials = budget > 0 ? static_cast<std::size_t>(budget) : file.budget;
      auto const w = ndsim::find_attack(file.space, trials, file.seed);
      if (!w) {
        std::cout << "no attack found in " << trials << " trials (seed " << file.seed << ")\n";
        return kExitOk;
      }
      print_witness(*w, std::cout);
      if (!witness_path.empty()) {
        with_sink(witness_path, [&](std::ostream& o) { o << witness_file(*w); });
      }
      return kExitOk;
    }
  } catch (std::exception const& e) {
    std::cerr << "ndsim: error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
