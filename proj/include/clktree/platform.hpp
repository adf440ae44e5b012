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

// Platform description: clock tree, register table, voltage/flash
// constraints and energy calibration. Data only; no behavior beyond
// lookup and validation.

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "clktree/clock_model.hpp"
#include "clktree/error.hpp"
#include "clktree/register_file.hpp"

namespace clktree {

struct VoltageRange {
  std::string id;
  double core_voltage = 0.0;
  Hz max_frequency = 0;
};

/// max_hz[range][ws] is the highest core frequency readable with `ws` wait
/// states while in `range`.
struct FlashWaitTable {
  std::vector<std::vector<Hz>> max_hz;

  std::optional<std::uint32_t> required_wait_states(std::size_t range, Hz f) const {
    if (range >= max_hz.size()) return std::nullopt;
    const auto& row = max_hz[range];
    for (std::size_t ws = 0; ws < row.size(); ++ws)
      if (f <= row[ws]) return static_cast<std::uint32_t>(ws);
    return std::nullopt;
  }
};

/// Output frequency window a clock must respect when it is in use.
struct ClockLimit {
  ClockId clock;
  Hz min_hz = 0;
  Hz max_hz = 0;
};

struct PowerControl {
  std::optional<RegisterFieldDescriptor> voltage_field;
  std::vector<std::uint32_t> voltage_codes;  // register code per voltage range
  RegisterFieldDescriptor wait_state_field;
};

/// A complete configuration applied at construction time, as firmware would
/// do before the scheduler starts.
struct StaticConfig {
  std::vector<TopologyEntry> entries;
  std::size_t voltage_range = 0;
  std::uint32_t wait_states = 0;
};

enum class MemoryClass : std::uint8_t { Reg = 0, Ram = 1, Flash = 2 };

struct EnergyModelParams {
  double capacitance_eff = 0.0;  // F, switched capacitance of the core
  double static_current = 0.0;   // A, supply-referred
  double supply_voltage = 3.3;   // V
  double tree_capacitance = 0.0; // F, clock distribution on the core path
  double rc_bias_current = 0.0;  // A per enabled RC oscillator
  double crystal_bias_current = 0.0;
  double pll_bias_current = 0.0;
  std::array<double, 3> memory_alpha{1.0, 1.0, 1.0};
  std::array<double, 3> wait_state_penalty{0.0, 0.0, 0.0};  // extra cycles per wait state, relative
  std::uint32_t context_switch_cycles = 200;
};

/// Cycle cost of the transition manager's own code, charged at the core
/// frequency in effect when each step runs.
struct TransitionCosts {
  std::uint32_t save_cycles = 0;
  std::uint32_t phase_cycles = 0;
};

struct PlatformModel {
  std::string name;
  std::vector<ClockDescriptor> clocks;
  std::vector<std::string> register_names;
  std::vector<std::uint32_t> reset_values;
  std::vector<ReadyBehavior> ready_behaviors;
  std::vector<VoltageRange> voltage_ranges;
  FlashWaitTable flash_table;
  std::vector<ClockLimit> limits;
  PowerControl power;
  ClockId core;
  ClockId fallback_source;
  StaticConfig default_config;
  EnergyModelParams energy;
  TransitionCosts costs;
  std::vector<Hz> evaluation_frequencies;
  std::vector<Hz> assessment_frequencies;

  std::size_t register_count() const { return reset_values.size(); }

  const ClockDescriptor& clock(ClockId id) const {
    if (id.value >= clocks.size()) fail(Errc::UnknownClock, "clock id " + std::to_string(id.value));
    return clocks[id.value];
  }

  std::optional<ClockId> find(std::string_view name) const {
    for (const auto& c : clocks)
      if (c.name == name) return c.id;
    return std::nullopt;
  }

  ClockId id_of(std::string_view name) const {
    if (auto id = find(name)) return *id;
    fail(Errc::UnknownClock, "no clock named '" + std::string(name) + "'");
  }

  std::optional<ClockLimit> limit_for(ClockId id) const {
    for (const auto& l : limits)
      if (l.clock == id) return l;
    return std::nullopt;
  }

  /// Clocks fed by `id` (any parent option, not just the selected one).
  std::vector<ClockId> children(ClockId id) const {
    std::vector<ClockId> out;
    for (const auto& c : clocks)
      if (std::find(c.parent_options.begin(), c.parent_options.end(), id) != c.parent_options.end())
        out.push_back(c.id);
    return out;
  }
};

/// Every clock that can feed `target` through some parent selection,
/// ordered sources first, `target` last.
inline std::vector<ClockId> ancestors_topological(const PlatformModel& m, ClockId target) {
  std::vector<ClockId> order;
  std::set<std::uint16_t> seen;
  auto visit = [&](auto&& self, ClockId id) -> void {
    if (!seen.insert(id.value).second) return;
    for (ClockId p : m.clock(id).parent_options) self(self, p);
    order.push_back(id);
  };
  visit(visit, target);
  return order;
}

inline std::vector<std::string> validate_model(const PlatformModel& m) {
  std::vector<std::string> v;
  const std::size_t n = m.clocks.size();
  auto exists = [&](ClockId id) { return id.value < n; };

  std::set<std::string> names;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& c = m.clocks[i];
    const std::string tag = "clock '" + c.name + "': ";
    if (c.id.value != i) v.push_back(tag + "id does not match its table position");
    if (!names.insert(c.name).second) v.push_back(tag + "duplicate name");

    for (ClockId p : c.parent_options)
      if (!exists(p)) v.push_back(tag + "parent option references missing id " + std::to_string(p.value));

    const std::size_t np = c.parent_options.size();
    switch (c.kind) {
      case ClockKind::Source:
        if (np != 0) v.push_back(tag + "source must not have parents");
        break;
      case ClockKind::Gate:
      case ClockKind::Scaler:
      case ClockKind::Consumer:
        if (np != 1) v.push_back(tag + "needs exactly one parent option");
        break;
      case ClockKind::Mux:
        if (np < 2) v.push_back(tag + "mux needs at least two parent options");
        break;
    }
    if (c.caps.muxable != (c.kind == ClockKind::Mux)) v.push_back(tag + "muxable iff kind is mux");
    if (c.caps.scalable && c.kind != ClockKind::Scaler && c.kind != ClockKind::Source)
      v.push_back(tag + "only scalers and sources may be scalable");
    if (c.kind == ClockKind::Scaler && !c.caps.scalable) v.push_back(tag + "scaler without scalable capability");
    if (c.kind == ClockKind::Gate && !c.caps.gateable) v.push_back(tag + "gate without gateable capability");
    if (c.caps.gateable && !c.field.enable_bit) v.push_back(tag + "gateable clock lacks an enable bit");
    if (c.caps.scalable && c.op == ScaleOp::None) v.push_back(tag + "scalable clock lacks a scale operation");

    for (const auto& msg : mapping_violations(c.mapping)) v.push_back(tag + msg);
    if (c.kind == ClockKind::Mux) {
      auto dom = mapping_domain(c.mapping);
      bool ok = dom.size() == np;
      for (std::size_t k = 0; ok && k < dom.size(); ++k) ok = dom[k] == static_cast<std::int64_t>(k);
      if (!ok) v.push_back(tag + "mux mapping must cover parent indices 0..n-1");
    }
    if (c.caps.scalable && !std::holds_alternative<RangeMapping>(c.mapping) &&
        !std::holds_alternative<LutMapping>(c.mapping))
      v.push_back(tag + "scalable clock needs a range or lookup mapping");
    if (c.kind == ClockKind::Source && !c.caps.scalable && !c.source_frequency)
      v.push_back(tag + "fixed source without frequency");

    try {
      pack_field(c.field);
    } catch (const Error& e) {
      v.push_back(tag + e.what());
    }
    if (c.field.register_index >= m.register_count()) v.push_back(tag + "register index beyond register table");
    if (c.field.width > 0 && c.field.width < 32 && mapping_violations(c.mapping).empty()) {
      const auto dom = mapping_domain(c.mapping);
      for (auto val : dom) {
        if (encode_logical(c.mapping, val) >= (std::uint64_t{1} << c.field.width)) {
          v.push_back(tag + "register image does not fit the field width");
          break;
        }
      }
    }
  }

  for (std::size_t i = 0; i < n; ++i)
    for (ClockId p : m.clocks[i].parent_options)
      if (exists(p) && m.clocks[p.value].kind == ClockKind::Consumer)
        v.push_back("clock '" + m.clocks[i].name + "': consumer used as parent");

  // Acyclicity via Kahn's algorithm over valid edges.
  {
    std::vector<int> indeg(n, 0);
    for (std::size_t i = 0; i < n; ++i)
      for (ClockId p : m.clocks[i].parent_options)
        if (exists(p)) ++indeg[i];
    std::vector<std::size_t> q;
    for (std::size_t i = 0; i < n; ++i)
      if (indeg[i] == 0) q.push_back(i);
    std::size_t visited = 0;
    while (!q.empty()) {
      const auto j = q.back();
      q.pop_back();
      ++visited;
      for (std::size_t i = 0; i < n; ++i)
        for (ClockId p : m.clocks[i].parent_options)
          if (p.value == j && --indeg[i] == 0) q.push_back(i);
    }
    if (visited != n) v.push_back("parent graph contains a cycle");
  }

  std::size_t cores = 0;
  for (const auto& c : m.clocks)
    if (c.kind == ClockKind::Consumer && c.name == "core") ++cores;
  if (cores != 1) v.push_back("model needs exactly one consumer named 'core'");
  if (!exists(m.core) || m.clocks[m.core.value].name != "core") v.push_back("core id does not name the core consumer");
  if (!exists(m.fallback_source) || m.clocks[m.fallback_source.value].kind != ClockKind::Source ||
      m.clocks[m.fallback_source.value].tech == ClockTech::Pll)
    v.push_back("fallback source must be a non-PLL source");

  for (const auto& b : m.ready_behaviors)
    if (b.watch_register >= m.register_count() || b.ready_register >= m.register_count())
      v.push_back("ready behavior references missing register");
  if (m.register_names.size() != m.register_count()) v.push_back("register name table size mismatch");

  if (m.voltage_ranges.empty()) v.push_back("no voltage ranges");
  for (std::size_t i = 1; i < m.voltage_ranges.size(); ++i) {
    const auto& a = m.voltage_ranges[i - 1];
    const auto& b = m.voltage_ranges[i];
    if (!(b.core_voltage < a.core_voltage)) v.push_back("voltage ranges not in descending voltage order");
    if (!(b.max_frequency < a.max_frequency)) v.push_back("range max frequency not decreasing with voltage");
  }
  if (m.flash_table.max_hz.size() != m.voltage_ranges.size()) v.push_back("flash table needs one row per voltage range");
  for (std::size_t r = 0; r < m.flash_table.max_hz.size(); ++r) {
    const auto& row = m.flash_table.max_hz[r];
    bool increasing = !row.empty();
    for (std::size_t k = 1; k < row.size(); ++k) increasing = increasing && row[k] > row[k - 1];
    if (!increasing) v.push_back("flash thresholds for range " + std::to_string(r) + " not strictly increasing");
    else if (r < m.voltage_ranges.size() && row.back() < m.voltage_ranges[r].max_frequency)
      v.push_back("flash table for range " + std::to_string(r) + " does not cover the range maximum");
  }
  if (m.power.voltage_field && m.power.voltage_codes.size() != m.voltage_ranges.size())
    v.push_back("voltage code table size mismatch");
  if (!m.power.voltage_field && m.voltage_ranges.size() > 1)
    v.push_back("multiple voltage ranges without a voltage register field");

  for (const auto& l : m.limits)
    if (!exists(l.clock) || l.min_hz > l.max_hz) v.push_back("bad clock limit");
  for (const auto& e : m.default_config.entries)
    if (!exists(e.clock)) v.push_back("default config references missing clock");
  if (m.default_config.voltage_range >= std::max<std::size_t>(1, m.voltage_ranges.size()))
    v.push_back("default config voltage range out of bounds");
  return v;
}

}  // namespace clktree
