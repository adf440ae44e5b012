// Copyright 2026 The clktree Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Supply-referred current model. The core draws alpha*C*V^2*f while it
// executes; oscillators and the running part of the clock tree draw an
// overhead whether or not the core is busy.

#include <cstdint>
#include <vector>

#include "clktree/clock_model.hpp"
#include "clktree/configurator.hpp"
#include "clktree/platform.hpp"

namespace clktree {

inline double dynamic_current(const EnergyModelParams& p, double alpha, Hz core_hz, double core_voltage) {
  return alpha * p.capacitance_eff * core_voltage * core_voltage * static_cast<double>(core_hz) / p.supply_voltage;
}

inline double instantaneous_current(const EnergyModelParams& p, double alpha, Hz core_hz, double core_voltage,
                                    bool active) {
  return active ? dynamic_current(p, alpha, core_hz, core_voltage) + p.static_current : p.static_current;
}

/// Oscillator bias plus switching of every running non-consumer node.
inline double overhead_current(const PlatformModel& m, const std::vector<TopologyEntry>& topo, std::size_t range) {
  const auto& p = m.energy;
  const double v = m.voltage_ranges.at(range).core_voltage;
  const auto live = live_clocks(m, topo);
  double bias = 0.0;
  double hz_sum = 0.0;
  for (const auto& d : m.clocks) {
    if (topo[d.id.value].enabled && d.field.enable_bit) {
      if (d.tech == ClockTech::RcOscillator) bias += p.rc_bias_current;
      else if (d.tech == ClockTech::CrystalOscillator) bias += p.crystal_bias_current;
      else if (d.tech == ClockTech::Pll) bias += p.pll_bias_current;
    }
    if (live[d.id.value] && d.kind != ClockKind::Consumer) hz_sum += static_cast<double>(frequency_in(m, topo, d.id));
  }
  return bias + p.tree_capacitance * v * v * hz_sum / p.supply_voltage;
}

/// Execution-time multiplier for compute on the given memory class.
inline double wait_state_factor(const EnergyModelParams& p, MemoryClass mc, std::uint32_t ws) {
  return 1.0 + p.wait_state_penalty[static_cast<std::size_t>(mc)] * static_cast<double>(ws);
}

/// Snapshot of what the meter needs from the clock state.
struct OperatingPoint {
  Hz core_hz = 0;
  double core_voltage = 0.0;
  std::uint32_t wait_states = 0;
  double overhead_a = 0.0;
};

inline OperatingPoint operating_point(const ClockState& s) {
  const auto& m = s.model();
  return {s.core_frequency(), m.voltage_ranges[s.voltage_range()].core_voltage, s.wait_states(),
          overhead_current(m, s.topology(), s.voltage_range())};
}

}  // namespace clktree
