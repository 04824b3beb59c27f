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

#ifndef NDSIM_UNITS_HPP
#define NDSIM_UNITS_HPP

#include <cmath>
#include <compare>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>

namespace ndsim {

/// Simulation time and durations, in integer picoseconds.
using Picoseconds = std::int64_t;

/// Sequence numbers of transmissions and deliveries within one trace.
using TxId = std::uint64_t;
using DeliveryId = std::uint64_t;

inline constexpr Picoseconds kForever = std::numeric_limits<Picoseconds>::max();
inline constexpr double kPsPerSecond = 1e12;
inline constexpr double kSpeedOfLight = 299'792'458.0;

/// Base class for every error the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A configuration value violates a documented constraint. The message names
/// the offending field.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Internal consistency of a trace is broken. Never expected in practice.
class CausalityError : public Error {
 public:
  using Error::Error;
};

/// Opaque node identifier. Values are dense indices assigned when a world is
/// built, but callers should not rely on that.
struct NodeId {
  std::uint32_t value = 0;

  friend constexpr auto operator<=>(NodeId, NodeId) = default;
};

/// Rounds a real number of picoseconds half-to-even.
inline Picoseconds round_half_even_ps(double ps) {
  if (!std::isfinite(ps) || std::fabs(ps) > 9.0e18) {
    throw ConfigError("duration out of representable range: " + std::to_string(ps) + " ps");
  }
  // Default floating-point environment rounds to nearest, ties to even.
  return static_cast<Picoseconds>(std::llrint(ps));
}

/// Time of flight over `meters` at `speed_mps`, rounded once to whole ps.
inline Picoseconds flight_time_ps(double meters, double speed_mps) {
  return round_half_even_ps(meters / speed_mps * kPsPerSecond);
}

/// Largest whole number of ps whose flight at `speed_mps` covers at most
/// `meters`. Used to express distance tolerances in the time domain.
inline Picoseconds distance_budget_ps(double meters, double speed_mps) {
  double const ps = meters / speed_mps * kPsPerSecond;
  // Absorb representation noise so that exact multiples are not floored away.
  return static_cast<Picoseconds>(std::floor(ps + 1e-9));
}

inline double ps_to_meters(Picoseconds ps, double speed_mps) {
  return static_cast<double>(ps) / kPsPerSecond * speed_mps;
}

}  // namespace ndsim

template <>
struct std::hash<ndsim::NodeId> {
  std::size_t operator()(ndsim::NodeId id) const noexcept { return std::hash<std::uint32_t>{}(id.value); }
};

#endif  // NDSIM_UNITS_HPP
