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

// Query and mutate individual clocks through the abstract interface. The
// topology mirror is re-derivable from the register file at any quiescent
// point; coherent() checks exactly that.

#include <algorithm>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "clktree/clock_model.hpp"
#include "clktree/error.hpp"
#include "clktree/platform.hpp"
#include "clktree/register_file.hpp"

namespace clktree {

namespace detail {

inline std::uint32_t extract(const std::vector<std::uint32_t>& words, const RegisterFieldDescriptor& f) {
  if (f.width == 0) return 0;
  return (words.at(f.register_index) & f.mask()) >> f.shift;
}

inline bool bit_set(const std::vector<std::uint32_t>& words, std::size_t reg, unsigned bit) {
  return (words.at(reg) >> bit) & 1u;
}

}  // namespace detail

/// Frequency of `id` under `topo` (one entry per clock, indexed by id).
inline Hz frequency_in(const PlatformModel& m, const std::vector<TopologyEntry>& topo, ClockId id) {
  const auto& d = m.clock(id);
  const auto& e = topo.at(id.value);
  if (!e.enabled) fail(Errc::ClockDisabled, "clock '" + d.name + "' is gated off");
  auto parent_hz = [&]() -> Hz {
    if (!e.parent) fail(Errc::Unconfigured, "clock '" + d.name + "' has no selected parent");
    return frequency_in(m, topo, *e.parent);
  };
  auto scale = [&]() -> std::int64_t {
    if (!e.scale) fail(Errc::Unconfigured, "clock '" + d.name + "' has no valid scale value");
    return *e.scale;
  };
  switch (d.kind) {
    case ClockKind::Source:
      if (d.caps.scalable) return static_cast<Hz>(scale());
      return d.source_frequency.value_or(0);
    case ClockKind::Gate:
    case ClockKind::Mux:
    case ClockKind::Consumer:
      return parent_hz();
    case ClockKind::Scaler: {
      const Hz in = parent_hz();
      const auto k = static_cast<Hz>(scale());
      if (d.op == ScaleOp::Multiply) return in * k;
      if (d.op == ScaleOp::Divide) {
        if (k == 0 || in % k != 0)
          fail(Errc::DivisionInexact, "clock '" + d.name + "': " + std::to_string(in) + " / " + std::to_string(k));
        return in / k;
      }
      return in;
    }
  }
  return 0;
}

/// Clocks from `id` up to its root source following selected parents;
/// nullopt when some mux on the way is unconfigured.
inline std::optional<std::vector<ClockId>> active_path(const PlatformModel& m, const std::vector<TopologyEntry>& topo,
                                                       ClockId id) {
  std::vector<ClockId> out;
  ClockId cur = id;
  for (;;) {
    out.push_back(cur);
    if (m.clock(cur).kind == ClockKind::Source) return out;
    const auto& p = topo.at(cur.value).parent;
    if (!p || out.size() > m.clocks.size()) return std::nullopt;
    cur = *p;
  }
}

/// A consumer is active when its whole active path is enabled.
inline bool consumer_active(const PlatformModel& m, const std::vector<TopologyEntry>& topo, ClockId consumer) {
  auto path = active_path(m, topo, consumer);
  if (!path) return false;
  return std::all_of(path->begin(), path->end(), [&](ClockId c) { return topo[c.value].enabled; });
}

/// Clocks in use by some active consumer.
inline std::vector<bool> live_clocks(const PlatformModel& m, const std::vector<TopologyEntry>& topo) {
  std::vector<bool> live(m.clocks.size(), false);
  for (const auto& c : m.clocks) {
    if (c.kind != ClockKind::Consumer || !consumer_active(m, topo, c.id)) continue;
    const auto path = active_path(m, topo, c.id);
    for (ClockId p : *path) live[p.value] = true;
  }
  return live;
}

class ClockState {
 public:
  explicit ClockState(std::shared_ptr<const PlatformModel> model, bool boot = true)
      : model_(std::move(model)), regs_(model_->reset_values, model_->ready_behaviors) {
    if (auto v = validate_model(*model_); !v.empty()) fail(Errc::InvalidModel, v.front());
    resync();
    if (boot) apply_static_config(model_->default_config);
  }

  const PlatformModel& model() const { return *model_; }
  const std::shared_ptr<const PlatformModel>& model_ptr() const { return model_; }
  RegisterFile& registers() { return regs_; }
  const RegisterFile& registers() const { return regs_; }
  const std::vector<TopologyEntry>& topology() const { return topo_; }
  const TopologyEntry& entry(ClockId id) const { return topo_.at(model_->clock(id).id.value); }
  std::size_t voltage_range() const { return range_; }
  std::uint32_t wait_states() const { return ws_; }

  Hz clock_frequency(ClockId id) const { return frequency_in(*model_, topo_, id); }
  Hz core_frequency() const { return clock_frequency(model_->core); }

  ClockId current_parent(ClockId id) const {
    const auto& d = model_->clock(id);
    if (d.kind == ClockKind::Source) fail(Errc::Unconfigured, "source '" + d.name + "' has no parent");
    const auto& p = topo_[id.value].parent;
    if (!p) fail(Errc::Unconfigured, "mux '" + d.name + "' holds a reserved selector value");
    return *p;
  }

  /// Every gate on the active path is enabled and every ready flag is up.
  bool clock_ready(ClockId id) const {
    auto path = active_path(*model_, topo_, id);
    if (!path) return false;
    const auto& w = regs_.words();
    for (ClockId c : *path) {
      const auto& d = model_->clock(c);
      if (!topo_[c.value].enabled) return false;
      if (d.field.ready_bit && !detail::bit_set(w, d.field.register_index, *d.field.ready_bit)) return false;
    }
    return true;
  }

  bool is_live(ClockId id) const { return live_clocks(*model_, topo_).at(model_->clock(id).id.value); }

  std::vector<std::string> check_constraints(Hz core_hz, std::size_t range, std::uint32_t ws) const {
    std::vector<std::string> v;
    if (core_hz == 0) {
      v.push_back("core must be clocked");
      return v;
    }
    if (range >= model_->voltage_ranges.size()) {
      v.push_back("unknown voltage range");
      return v;
    }
    if (core_hz > model_->voltage_ranges[range].max_frequency) v.push_back("exceeds range max");
    const auto& row = model_->flash_table.max_hz[range];
    if (ws >= row.size()) {
      v.push_back("wait states beyond flash table");
    } else if (auto req = model_->flash_table.required_wait_states(range, core_hz); !req || ws < *req) {
      v.push_back("insufficient flash wait states");
    }
    return v;
  }

  /// Constraint check of a hypothetical topology at the given power setting,
  /// including per-clock limits on clocks in use.
  std::vector<std::string> violations_for(const std::vector<TopologyEntry>& topo, std::size_t range,
                                          std::uint32_t ws) const {
    Hz f = 0;
    try {
      f = frequency_in(*model_, topo, model_->core);
    } catch (const Error& e) {
      if (e.code() == Errc::DivisionInexact) throw;
      return {"core must be clocked"};
    }
    auto v = check_constraints(f, range, ws);
    const auto live = live_clocks(*model_, topo);
    for (const auto& l : model_->limits) {
      if (!live[l.clock.value]) continue;
      const Hz hz = frequency_in(*model_, topo, l.clock);
      if (hz < l.min_hz || hz > l.max_hz) v.push_back("clock '" + model_->clock(l.clock).name + "' outside its limits");
    }
    return v;
  }

  void set_scaler(ClockId id, std::int64_t logical) {
    const auto& d = model_->clock(id);
    if (!d.caps.scalable) fail(Errc::NotCapable, "clock '" + d.name + "' is not scalable");
    if (!mapping_contains(d.mapping, logical))
      fail(Errc::OutOfDomain, "clock '" + d.name + "': " + std::to_string(logical) + " outside mapping");
    if (!d.caps.on_the_fly && is_live(id))
      fail(Errc::NotOnTheFly, "clock '" + d.name + "' feeds a running consumer; use a transition");
    auto next = topo_;
    next[id.value].scale = logical;
    require_ok(next);
    write_scale(id, logical);
  }

  void set_parent(ClockId id, ClockId parent) {
    const auto& d = model_->clock(id);
    if (!d.caps.muxable) fail(Errc::NotCapable, "clock '" + d.name + "' is not a mux");
    if (std::find(d.parent_options.begin(), d.parent_options.end(), parent) == d.parent_options.end())
      fail(Errc::NotACandidate, "'" + model_->clock(parent).name + "' is not a parent option of '" + d.name + "'");
    if (is_live(id)) {
      if (!d.caps.on_the_fly) fail(Errc::NotOnTheFly, "mux '" + d.name + "' feeds a running consumer");
      if (!clock_ready(parent)) fail(Errc::ParentNotReady, "'" + model_->clock(parent).name + "' is not ready");
    }
    auto next = topo_;
    next[id.value].parent = parent;
    require_ok(next);
    write_parent(id, parent);
  }

  /// Disabling a clock that feeds an active consumer needs `force`; the core
  /// can never be gated off this way.
  void set_gate(ClockId id, bool enabled, bool force = false) {
    const auto& d = model_->clock(id);
    if (!d.caps.gateable) fail(Errc::NotCapable, "clock '" + d.name + "' is not gateable");
    if (!enabled && is_live(id)) {
      auto next = topo_;
      next[id.value].enabled = false;
      if (!force || !consumer_active(*model_, next, model_->core))
        fail(Errc::GateInUse, "clock '" + d.name + "' feeds an active consumer");
    }
    write_enable(id, enabled);
  }

  void set_voltage_range(std::size_t range) {
    auto v = check_constraints(core_frequency(), range, ws_);
    if (!v.empty()) fail(Errc::ConstraintViolation, v.front());
    write_voltage_range(range);
  }

  void set_wait_states(std::uint32_t ws) {
    auto v = check_constraints(core_frequency(), range_, ws);
    if (!v.empty()) fail(Errc::ConstraintViolation, v.front());
    write_wait_states(ws);
  }

  // Unchecked primitives. They keep the mirror in sync but enforce no
  // policy; the transition executor is their only intended caller.

  void write_scale(ClockId id, std::int64_t logical) {
    const auto& d = model_->clock(id);
    regs_.write_field(d.field, encode_logical(d.mapping, logical));
    topo_[id.value].scale = logical;
  }

  void write_parent(ClockId id, ClockId parent) {
    const auto& d = model_->clock(id);
    const auto it = std::find(d.parent_options.begin(), d.parent_options.end(), parent);
    if (it == d.parent_options.end()) fail(Errc::NotACandidate, "not a parent option");
    regs_.write_field(d.field, encode_logical(d.mapping, it - d.parent_options.begin()));
    topo_[id.value].parent = parent;
  }

  void write_enable(ClockId id, bool on) {
    const auto& d = model_->clock(id);
    if (!d.field.enable_bit) fail(Errc::NotCapable, "clock '" + d.name + "' has no enable bit");
    regs_.write_bit(d.field.register_index, *d.field.enable_bit, on);
    topo_[id.value].enabled = on;
  }

  void write_voltage_range(std::size_t range) {
    if (range >= model_->voltage_ranges.size()) fail(Errc::InvalidArgument, "voltage range out of bounds");
    if (model_->power.voltage_field) regs_.write_field(*model_->power.voltage_field, model_->power.voltage_codes[range]);
    range_ = range;
  }

  void write_wait_states(std::uint32_t ws) {
    regs_.write_field(model_->power.wait_state_field, ws);
    ws_ = ws;
  }

  /// Whether the voltage regulator has settled after the last range change.
  bool voltage_ready() const {
    const auto& f = model_->power.voltage_field;
    if (!f || !f->ready_bit) return true;
    return detail::bit_set(regs_.words(), f->register_index, *f->ready_bit);
  }

  std::vector<TopologyEntry> decode_topology() const {
    const auto& w = regs_.words();
    std::vector<TopologyEntry> out;
    out.reserve(model_->clocks.size());
    for (const auto& d : model_->clocks) {
      TopologyEntry e{.clock = d.id};
      if (d.kind == ClockKind::Mux) {
        try {
          const auto idx = decode_register(d.mapping, detail::extract(w, d.field));
          if (idx >= 0 && static_cast<std::size_t>(idx) < d.parent_options.size()) e.parent = d.parent_options[idx];
        } catch (const Error&) {
        }
      } else if (!d.parent_options.empty()) {
        e.parent = d.parent_options.front();
      }
      if (d.caps.scalable) {
        try {
          e.scale = decode_register(d.mapping, detail::extract(w, d.field));
        } catch (const Error&) {
        }
      }
      if (d.field.enable_bit) e.enabled = detail::bit_set(w, d.field.register_index, *d.field.enable_bit);
      out.push_back(e);
    }
    return out;
  }

  std::size_t decode_voltage_range() const {
    const auto& f = model_->power.voltage_field;
    if (!f) return 0;
    const auto code = detail::extract(regs_.words(), *f);
    const auto& codes = model_->power.voltage_codes;
    const auto it = std::find(codes.begin(), codes.end(), code);
    if (it == codes.end()) fail(Errc::UnknownRegisterValue, "voltage code " + std::to_string(code));
    return static_cast<std::size_t>(it - codes.begin());
  }

  std::uint32_t decode_wait_states() const { return detail::extract(regs_.words(), model_->power.wait_state_field); }

  bool coherent() const {
    return decode_topology() == topo_ && decode_voltage_range() == range_ && decode_wait_states() == ws_;
  }

  /// Rebuilds the mirror from the registers after out-of-band writes.
  void resync() {
    topo_ = decode_topology();
    range_ = decode_voltage_range();
    ws_ = decode_wait_states();
  }

  /// Boot-time configuration as firmware would perform it before any task
  /// runs: power envelope to maximum, clocks, then the configured envelope.
  void apply_static_config(const StaticConfig& cfg) {
    const auto& m = *model_;
    write_voltage_range(0);
    write_wait_states(static_cast<std::uint32_t>(m.flash_table.max_hz[0].size() - 1));
    regs_.settle();
    for (const auto& e : cfg.entries)
      if (e.enabled && m.clock(e.clock).kind == ClockKind::Source && m.clock(e.clock).field.enable_bit)
        write_enable(e.clock, true);
    regs_.settle();
    for (ClockId id : ancestors_topological_all()) {
      for (const auto& e : cfg.entries) {
        if (e.clock != id) continue;
        const auto& d = m.clock(id);
        if (e.scale) write_scale(id, *e.scale);
        if (e.parent && d.kind == ClockKind::Mux) write_parent(id, *e.parent);
        if (e.enabled && d.field.enable_bit && d.kind != ClockKind::Source) write_enable(id, true);
      }
    }
    regs_.settle();
    for (const auto& e : cfg.entries)
      if (!e.enabled && m.clock(e.clock).field.enable_bit) write_enable(e.clock, false);
    write_wait_states(cfg.wait_states);
    write_voltage_range(cfg.voltage_range);
    regs_.settle();
    resync();
  }

 private:
  void require_ok(const std::vector<TopologyEntry>& next) const {
    auto v = violations_for(next, range_, ws_);
    if (!v.empty()) fail(Errc::ConstraintViolation, v.front());
  }

  /// All clocks, parents before children.
  std::vector<ClockId> ancestors_topological_all() const {
    std::vector<ClockId> order;
    std::vector<bool> seen(model_->clocks.size(), false);
    auto visit = [&](auto&& self, ClockId id) -> void {
      if (seen[id.value]) return;
      seen[id.value] = true;
      for (ClockId p : model_->clock(id).parent_options) self(self, p);
      order.push_back(id);
    };
    for (const auto& c : model_->clocks) visit(visit, c.id);
    return order;
  }

  std::shared_ptr<const PlatformModel> model_;
  RegisterFile regs_;
  std::vector<TopologyEntry> topo_;
  std::size_t range_ = 0;
  std::uint32_t ws_ = 0;
};

}  // namespace clktree
