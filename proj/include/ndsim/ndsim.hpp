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

#ifndef NDSIM_NDSIM_HPP
#define NDSIM_NDSIM_HPP

#include "ndsim/adversary.hpp"
#include "ndsim/checkers.hpp"
#include "ndsim/core_model.hpp"
#include "ndsim/engine.hpp"
#include "ndsim/message.hpp"
#include "ndsim/protocols.hpp"
#include "ndsim/report.hpp"
#include "ndsim/scenario.hpp"
#include "ndsim/scenario_io.hpp"
#include "ndsim/search.hpp"
#include "ndsim/trace.hpp"
#include "ndsim/units.hpp"

namespace ndsim {

struct RunOutcome {
  Trace trace;
  Report report;
  std::vector<PropertyVerdict> verdicts;
};

/// Simulates to t_end and applies every checker. `s` must be finalized.
inline RunOutcome run_scenario(Scenario const& s) {
  Simulation sim(s);
  Trace trace;
  try {
    trace = sim.run_until(s.t_end);
  } catch (EventCapExceeded const& e) {
    throw EventCapExceeded("scenario '" + s.id + "': " + e.what());
  }
  auto verdicts = check_all(trace, s);
  Report report = make_report(trace, s, verdicts);
  return {std::move(trace), std::move(report), std::move(verdicts)};
}

}  // namespace ndsim

#endif  // NDSIM_NDSIM_HPP
