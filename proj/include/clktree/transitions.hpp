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

// Core-clock exploration, transition planning and transactional execution.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "clktree/clock_model.hpp"
#include "clktree/configurator.hpp"
#include "clktree/error.hpp"
#include "clktree/platform.hpp"

namespace clktree {

enum class SourceKind : std::uint8_t { Rc, Crystal, PllFromRc, PllFromCrystal };

/// Preference when fast flash access and low core voltage exclude each other.
enum class Policy : std::uint8_t { FastFlash, LowVoltage };

inline std::string_view source_kind_name(SourceKind k) {
  switch (k) {
    case SourceKind::Rc: return "RC";
    case SourceKind::Crystal: return "XTAL";
    case SourceKind::PllFromRc: return "PLL(RC)";
    case SourceKind::PllFromCrystal: return "PLL(XTAL)";
  }
  return "?";
}

inline std::string_view policy_name(Policy p) { return p == Policy::FastFlash ? "ff" : "lv"; }

struct PowerSetting {
  std::size_t range = 0;
  std::uint32_t ws = 0;
  friend bool operator==(const PowerSetting&, const PowerSetting&) = default;
};

/// Lowest-voltage range admitting `f` (ranges are ordered by descending voltage).
inline std::optional<std::size_t> lowest_voltage_range(const PlatformModel& m, Hz f) {
  for (std::size_t r = m.voltage_ranges.size(); r-- > 0;)
    if (f <= m.voltage_ranges[r].max_frequency && m.flash_table.required_wait_states(r, f)) return r;
  return std::nullopt;
}

inline std::optional<PowerSetting> power_for(const PlatformModel& m, Hz f, Policy p) {
  if (p == Policy::LowVoltage) {
    auto r = lowest_voltage_range(m, f);
    if (!r) return std::nullopt;
    return PowerSetting{*r, *m.flash_table.required_wait_states(*r, f)};
  }
  std::optional<PowerSetting> best;
  for (std::size_t r = 0; r < m.voltage_ranges.size(); ++r) {
    if (f > m.voltage_ranges[r].max_frequency) continue;
    auto ws = m.flash_table.required_wait_states(r, f);
    if (ws && (!best || *ws <= best->ws)) best = PowerSetting{r, *ws};  // ties go to the lower voltage
  }
  return best;
}

struct CoreConfig {
  std::size_t id = 0;
  std::vector<TopologyEntry> topology;  // core path, source first, core last
  Hz frequency = 0;
  std::size_t min_range = 0;
  std::uint32_t min_ws = 0;
  SourceKind source_kind = SourceKind::Rc;
  ClockId source;
  ClockId scaling_point;

  PowerSetting power(const PlatformModel& m, Policy p) const { return *power_for(m, frequency, p); }
};

/// Short name such as "RC@src" or "XTAL@hfpresc".
inline std::string config_label(const PlatformModel& m, const CoreConfig& c) {
  std::string where = c.scaling_point == c.source ? "src" : m.clock(c.scaling_point).name;
  return std::string(source_kind_name(c.source_kind)) + "@" + where;
}

namespace detail {

/// Fills the derived fields of a config from its path entries.
inline std::optional<CoreConfig> annotate(const PlatformModel& m, std::vector<TopologyEntry> path, Hz f) {
  auto lv = lowest_voltage_range(m, f);
  auto ff = power_for(m, f, Policy::FastFlash);
  if (!lv || !ff) return std::nullopt;
  CoreConfig c;
  c.topology = std::move(path);
  c.frequency = f;
  c.min_range = *lv;
  c.min_ws = ff->ws;
  c.source = c.topology.front().clock;
  const auto& src = m.clock(c.source);
  const bool pll = std::any_of(c.topology.begin(), c.topology.end(),
                               [&](const TopologyEntry& e) { return m.clock(e.clock).tech == ClockTech::Pll; });
  const bool xtal = src.tech == ClockTech::CrystalOscillator;
  c.source_kind = pll ? (xtal ? SourceKind::PllFromCrystal : SourceKind::PllFromRc)
                      : (xtal ? SourceKind::Crystal : SourceKind::Rc);
  c.scaling_point = c.source;
  for (auto it = c.topology.rbegin(); it != c.topology.rend(); ++it) {
    if (m.clock(it->clock).kind == ClockKind::Scaler && it->scale && *it->scale != 1) {
      c.scaling_point = it->clock;
      break;
    }
  }
  return c;
}

struct Partial {
  std::vector<TopologyEntry> path;
  Hz f = 0;
  Hz sum = 0;  // Σ frequency along the path; lower means less clock-tree power
};

inline bool within_limit(const PlatformModel& m, ClockId id, Hz f) {
  auto l = m.limit_for(id);
  return !l || (f >= l->min_hz && f <= l->max_hz);
}

inline std::vector<Partial> enumerate(const PlatformModel& m, ClockId id, const std::set<std::uint16_t>& unavailable) {
  const auto& d = m.clock(id);
  std::vector<Partial> out;
  auto push = [&](const Partial& base, TopologyEntry e, Hz f) {
    if (!within_limit(m, id, f)) return;
    Partial p = base;
    p.path.push_back(std::move(e));
    p.f = f;
    p.sum += f;
    out.push_back(std::move(p));
  };
  switch (d.kind) {
    case ClockKind::Source: {
      if (unavailable.count(id.value)) return out;
      if (d.caps.scalable) {
        for (auto v : mapping_domain(d.mapping)) push({}, {.clock = id, .scale = v, .enabled = true}, static_cast<Hz>(v));
      } else {
        push({}, {.clock = id, .enabled = true}, d.source_frequency.value_or(0));
      }
      return out;
    }
    case ClockKind::Mux:
      for (ClockId p : d.parent_options)
        for (const auto& sub : enumerate(m, p, unavailable)) push(sub, {.clock = id, .parent = p, .enabled = true}, sub.f);
      return out;
    case ClockKind::Scaler: {
      const ClockId p = d.parent_options.front();
      const auto dom = mapping_domain(d.mapping);
      for (const auto& sub : enumerate(m, p, unavailable)) {
        for (auto k : dom) {
          const auto uk = static_cast<Hz>(k);
          Hz f = sub.f;
          if (d.op == ScaleOp::Multiply) f = sub.f * uk;
          else if (d.op == ScaleOp::Divide) {
            if (uk == 0 || sub.f % uk != 0) continue;
            f = sub.f / uk;
          }
          push(sub, {.clock = id, .parent = p, .scale = k, .enabled = true}, f);
        }
      }
      return out;
    }
    case ClockKind::Gate:
    case ClockKind::Consumer: {
      const ClockId p = d.parent_options.front();
      for (const auto& sub : enumerate(m, p, unavailable)) push(sub, {.clock = id, .parent = p, .enabled = true}, sub.f);
      return out;
    }
  }
  return out;
}

}  // namespace detail

/// Every valid core configuration, one representative per
/// (frequency, source kind, scaling point), sorted by that key.
inline std::vector<CoreConfig> explore_core_configs(const PlatformModel& m,
                                                    const std::set<std::uint16_t>& unavailable_sources = {}) {
  using Key = std::tuple<Hz, std::uint8_t, std::uint16_t>;
  std::map<Key, std::pair<Hz, CoreConfig>> best;
  for (auto& p : detail::enumerate(m, m.core, unavailable_sources)) {
    auto c = detail::annotate(m, std::move(p.path), p.f);
    if (!c) continue;
    Key k{c->frequency, static_cast<std::uint8_t>(c->source_kind), c->scaling_point.value};
    auto it = best.find(k);
    if (it == best.end() || p.sum < it->second.first) best.insert_or_assign(k, std::pair{p.sum, std::move(*c)});
  }
  std::vector<CoreConfig> out;
  out.reserve(best.size());
  for (auto& [k, v] : best) {
    v.second.id = out.size();
    out.push_back(std::move(v.second));
  }
  return out;
}

/// Gateable clocks that can feed the core, are on, and would drive nothing
/// once the core runs on `path`. Closest to the core first.
inline std::vector<ClockId> releasable(const PlatformModel& m, const std::vector<TopologyEntry>& topo,
                                       const std::vector<ClockId>& path) {
  std::vector<ClockId> out;
  const auto live = live_clocks(m, topo);
  const auto anc = ancestors_topological(m, m.core);
  for (auto it = anc.rbegin(); it != anc.rend(); ++it) {
    const ClockId c = *it;
    if (std::find(path.begin(), path.end(), c) != path.end()) continue;
    if (m.clock(c).field.enable_bit && topo[c.value].enabled && !live[c.value]) out.push_back(c);
  }
  return out;
}

/// Full topology after a transition from `cur` to `cfg`, including the
/// release of clocks the new path no longer needs.
inline std::vector<TopologyEntry> projected_topology(const PlatformModel& m, std::vector<TopologyEntry> cur,
                                                     const CoreConfig& cfg) {
  std::vector<ClockId> path;
  for (const auto& e : cfg.topology) {
    auto& t = cur[e.clock.value];
    if (e.parent) t.parent = e.parent;
    if (e.scale) t.scale = e.scale;
    t.enabled = true;
    path.push_back(e.clock);
  }
  for (ClockId c : releasable(m, cur, path)) cur[c.value].enabled = false;
  return cur;
}

enum class PhaseKind : std::uint8_t {
  SetVoltageRange,
  SetWaitStates,
  SwitchParent,
  SetScaler,
  EnableClock,
  DisableClock,
  SaveState,
  RestoreState,
};

inline std::string_view phase_name(PhaseKind k) {
  switch (k) {
    case PhaseKind::SetVoltageRange: return "SetVoltageRange";
    case PhaseKind::SetWaitStates: return "SetWaitStates";
    case PhaseKind::SwitchParent: return "SwitchParent";
    case PhaseKind::SetScaler: return "SetScaler";
    case PhaseKind::EnableClock: return "EnableClock";
    case PhaseKind::DisableClock: return "DisableClock";
    case PhaseKind::SaveState: return "SaveState";
    case PhaseKind::RestoreState: return "RestoreState";
  }
  return "?";
}

/// `value` is the range index, wait-state count, parent id or logical
/// scale depending on the kind.
struct Phase {
  PhaseKind kind = PhaseKind::SaveState;
  std::optional<ClockId> clock;
  std::int64_t value = 0;
  friend bool operator==(const Phase&, const Phase&) = default;
};

inline std::string describe(const PlatformModel& m, const Phase& p) {
  std::string s(phase_name(p.kind));
  switch (p.kind) {
    case PhaseKind::SetVoltageRange: return s + "(" + m.voltage_ranges.at(p.value).id + ")";
    case PhaseKind::SetWaitStates: return s + "(" + std::to_string(p.value) + ")";
    case PhaseKind::SwitchParent:
      return s + "(" + m.clock(*p.clock).name + "->" + m.clock(ClockId{static_cast<std::uint16_t>(p.value)}).name + ")";
    case PhaseKind::SetScaler: return s + "(" + m.clock(*p.clock).name + "," + std::to_string(p.value) + ")";
    case PhaseKind::EnableClock:
    case PhaseKind::DisableClock: return s + "(" + m.clock(*p.clock).name + ")";
    default: return s;
  }
}

struct TransitionPlan {
  std::vector<Phase> phases;
  CoreConfig target;
  PowerSetting target_power;
  std::vector<ClockId> touched;  // clocks whose subtree observers are notified
  bool empty() const { return phases.empty(); }
};

struct TransitionReport {
  Nanos elapsed_ns = 0;
  std::size_t phases_run = 0;
  std::size_t register_writes = 0;
};

/// Pre-hooks may veto (return false); post-hooks only observe.
struct HookRegistration {
  ClockId clock;
  std::function<bool(const CoreConfig&)> pre;
  std::function<void(const CoreConfig&)> post;
};

/// Called after every executed phase with the state at that boundary.
using PhaseObserver = std::function<void(const ClockState&, const Phase&)>;

class TransitionManager {
 public:
  explicit TransitionManager(ClockState& state) : state_(state) {}

  ClockState& state() { return state_; }
  const ClockState& state() const { return state_; }
  const PlatformModel& model() const { return state_.model(); }

  const std::vector<CoreConfig>& explore() {
    if (!cache_) {
      cache_ = explore_core_configs(model(), unavailable_);
      ++generation_;
    }
    return *cache_;
  }

  /// Incremented whenever the exploration is recomputed.
  std::size_t generation() const { return generation_; }
  bool cache_valid() const { return cache_.has_value(); }
  void invalidate() { cache_.reset(); }

  /// Marks a source as unusable (unpopulated crystal, failed oscillator).
  void set_source_available(ClockId src, bool available) {
    if (model().clock(src).kind != ClockKind::Source) fail(Errc::InvalidArgument, "not a source");
    const bool changed = available ? unavailable_.erase(src.value) > 0 : unavailable_.insert(src.value).second;
    if (changed) invalidate();
  }

  std::size_t register_hook(HookRegistration h) {
    model().clock(h.clock);
    hooks_.emplace_back(next_hook_, std::move(h));
    return next_hook_++;
  }
  void unregister_hook(std::size_t id) {
    std::erase_if(hooks_, [&](const auto& h) { return h.first == id; });
  }

  void set_policy(Policy p) { policy_ = p; }
  Policy policy() const { return policy_; }
  void set_timeout_multiplier(unsigned k) { timeout_multiplier_ = k; }
  void set_phase_observer(PhaseObserver obs) { observer_ = std::move(obs); }
  std::optional<ClockId> last_veto() const { return last_veto_; }
  bool in_transition() const { return busy_; }

  CoreConfig current_core_config() const {
    const auto& m = model();
    auto path = active_path(m, state_.topology(), m.core);
    if (!path) fail(Errc::Unconfigured, "core path not configured");
    std::vector<TopologyEntry> entries;
    for (auto it = path->rbegin(); it != path->rend(); ++it) {
      auto e = state_.topology()[it->value];
      if (!m.clock(e.clock).caps.scalable) e.scale.reset();
      e.enabled = true;
      entries.push_back(e);
    }
    auto c = detail::annotate(m, std::move(entries), state_.core_frequency());
    if (!c) fail(Errc::ConstraintViolation, "current core frequency admits no voltage range");
    return *c;
  }

  /// Explored entry whose topology equals the live core path, if any.
  std::optional<std::size_t> current_config_id() {
    const auto cur = current_core_config();
    for (const auto& c : explore())
      if (c.topology == cur.topology) return c.id;
    return std::nullopt;
  }

  TransitionPlan plan(const CoreConfig& target) {
    const auto& all = explore();
    if (target.id >= all.size() || all[target.id].topology != target.topology)
      fail(Errc::Unreachable, "target is not an explored core configuration");
    return build_plan(target, std::nullopt);
  }

  TransitionPlan plan(std::size_t config_id) {
    const auto& all = explore();
    if (config_id >= all.size()) fail(Errc::Unreachable, "no explored configuration " + std::to_string(config_id));
    return build_plan(all[config_id], std::nullopt);
  }

  /// Plan towards a configuration that need not be an explored
  /// representative, such as one captured with current_core_config() before
  /// an assessment. `power` overrides the policy's voltage/wait-state choice.
  TransitionPlan plan_to(const CoreConfig& target, std::optional<PowerSetting> power = std::nullopt) const {
    if (power) {
      auto v = state_.check_constraints(target.frequency, power->range, power->ws);
      if (!v.empty()) fail(Errc::ConstraintViolation, v.front());
    }
    return build_plan(target, power);
  }

  TransitionReport execute(const TransitionPlan& plan) {
    if (busy_) fail(Errc::Reentrant, "transition manager re-entered from a hook");
    busy_ = true;
    struct Release {
      bool& flag;
      ~Release() { flag = false; }
    } release{busy_};

    auto& regs = state_.registers();
    const Nanos t0 = regs.now();
    const std::size_t w0 = regs.write_count();
    last_veto_.reset();

    const auto notified = hooks_to_notify(plan);
    const auto before = current_core_config();
    std::vector<std::uint32_t> snapshot;
    std::size_t run = 0;
    auto finish = [&] { return TransitionReport{regs.now() - t0, run, regs.write_count() - w0}; };

    auto veto_check = [&] {
      for (auto* h : notified) {
        if (h->pre && !h->pre(plan.target)) {
          last_veto_ = h->clock;
          fail(Errc::Vetoed, "transition vetoed by '" + model().clock(h->clock).name + "'");
        }
      }
    };

    if (plan.empty()) {
      veto_check();
      for (auto* h : notified)
        if (h->post) h->post(plan.target);
      return finish();
    }

    try {
      for (const auto& ph : plan.phases) {
        if (ph.kind == PhaseKind::SaveState) {
          snapshot = regs.words();
          charge_cycles(model().costs.save_cycles);
          ++run;
          observe(ph);
          veto_check();
          continue;
        }
        run_phase(ph, snapshot);
        ++run;
        observe(ph);
      }
    } catch (const Error& e) {
      if (e.code() == Errc::Vetoed) throw;
      if (!snapshot.empty()) restore(snapshot);
      for (auto* h : notified)
        if (h->post) h->post(before);
      throw;
    }
    for (auto* h : notified)
      if (h->post) h->post(plan.target);
    return finish();
  }

  TransitionReport transition_to(std::size_t config_id) { return execute(plan(config_id)); }

 private:
  std::vector<const HookRegistration*> hooks_to_notify(const TransitionPlan& plan) const {
    std::vector<const HookRegistration*> out;
    const auto& m = model();
    for (const auto& [id, h] : hooks_) {
      auto chain = active_path(m, state_.topology(), h.clock).value_or(std::vector<ClockId>{h.clock});
      const bool hit = std::any_of(chain.begin(), chain.end(), [&](ClockId c) {
        return std::find(plan.touched.begin(), plan.touched.end(), c) != plan.touched.end();
      });
      if (hit) out.push_back(&h);
    }
    return out;
  }

  void observe(const Phase& ph) {
    if (observer_) observer_(state_, ph);
  }

  void charge_cycles(std::uint64_t cycles) {
    Hz f = 0;
    try {
      f = state_.core_frequency();
    } catch (const Error&) {
    }
    if (f == 0 || cycles == 0) return;
    state_.registers().advance_time(static_cast<Nanos>((cycles * 1'000'000'000ull + f - 1) / f));
  }

  void wait_ready(std::size_t reg, unsigned bit, const std::string& what) {
    auto& regs = state_.registers();
    const Nanos start = regs.now();
    const Nanos limit = static_cast<Nanos>(timeout_multiplier_) * regs.ready_delay(reg, bit).value_or(0);
    while (!((regs.words()[reg] >> bit) & 1u)) {
      auto d = regs.pending_deadline(reg, bit);
      if (d && *d - start <= limit) {
        regs.advance_time(*d - regs.now());
        continue;
      }
      regs.advance_time(std::max<Nanos>(0, start + limit - regs.now()));
      fail(Errc::ReadyTimeout, what + " not ready after " + std::to_string(limit) + " ns");
    }
  }

  void run_phase(const Phase& ph, const std::vector<std::uint32_t>& snapshot) {
    const auto& m = model();
    switch (ph.kind) {
      case PhaseKind::SetVoltageRange:
        state_.write_voltage_range(static_cast<std::size_t>(ph.value));
        if (const auto& f = m.power.voltage_field; f && f->ready_bit)
          wait_ready(f->register_index, *f->ready_bit, "voltage regulator");
        break;
      case PhaseKind::SetWaitStates: state_.write_wait_states(static_cast<std::uint32_t>(ph.value)); break;
      case PhaseKind::SwitchParent:
        state_.write_parent(*ph.clock, ClockId{static_cast<std::uint16_t>(ph.value)});
        break;
      case PhaseKind::SetScaler: state_.write_scale(*ph.clock, ph.value); break;
      case PhaseKind::EnableClock: {
        const auto& d = m.clock(*ph.clock);
        if (!state_.topology()[ph.clock->value].enabled) state_.write_enable(*ph.clock, true);
        if (d.field.ready_bit) wait_ready(d.field.register_index, *d.field.ready_bit, "clock '" + d.name + "'");
        break;
      }
      case PhaseKind::DisableClock: state_.write_enable(*ph.clock, false); break;
      case PhaseKind::RestoreState: restore(snapshot); break;
      case PhaseKind::SaveState: break;
    }
    charge_cycles(m.costs.phase_cycles);
    auto v = state_.violations_for(state_.topology(), state_.voltage_range(), state_.wait_states());
    if (!v.empty()) fail(Errc::ConstraintViolation, "phase boundary after " + describe(m, ph) + ": " + v.front());
    if (!state_.clock_ready(m.core)) fail(Errc::ConstraintViolation, "core not driven by a ready clock after " + describe(m, ph));
  }

  /// Rewrites the saved words and lets every oscillator and PLL settle again.
  /// Ready flags are hardware-owned; a behavior whose flag did not come back
  /// is re-triggered by cycling its enable bit.
  void restore(const std::vector<std::uint32_t>& snapshot) {
    auto& regs = state_.registers();
    for (std::size_t i = 0; i < snapshot.size(); ++i)
      if (regs.words()[i] != snapshot[i]) regs.write_word(i, snapshot[i]);
    regs.settle();
    for (const auto& b : model().ready_behaviors) {
      const std::uint32_t bit = 1u << b.ready_bit;
      if ((regs.words()[b.ready_register] & bit) == (snapshot[b.ready_register] & bit) || !b.enable_bit) continue;
      const std::uint32_t w = regs.words()[b.watch_register];
      regs.write_word(b.watch_register, w & ~(1u << *b.enable_bit));
      regs.write_word(b.watch_register, w);
    }
    regs.settle();
    state_.resync();
  }

  TransitionPlan build_plan(const CoreConfig& target, std::optional<PowerSetting> power) const {
    const auto& m = model();
    const auto& cur = state_.topology();
    TransitionPlan plan;
    plan.target = target;
    plan.target_power = power ? *power : target.power(m, policy_);

    std::vector<TopologyEntry> tgt = cur;
    std::vector<ClockId> path;
    for (const auto& e : target.topology) {
      auto& t = tgt[e.clock.value];
      if (e.parent) t.parent = e.parent;
      if (e.scale) t.scale = e.scale;
      t.enabled = true;
      path.push_back(e.clock);
    }
    auto on_path = [&](ClockId c) { return std::find(path.begin(), path.end(), c) != path.end(); };

    // Root: the on-the-fly mux nearest the core on the target path.
    std::optional<std::size_t> root_pos;
    for (std::size_t i = path.size(); i-- > 0;) {
      const auto& d = m.clock(path[i]);
      if (d.kind == ClockKind::Mux && d.caps.on_the_fly) {
        root_pos = i;
        break;
      }
    }
    const bool root = root_pos.has_value();
    const ClockId root_id = root ? path[*root_pos] : ClockId{};

    std::vector<ClockId> changed;
    for (ClockId c : path) {
      const auto& a = cur[c.value];
      const auto& b = tgt[c.value];
      if ((m.clock(c).kind == ClockKind::Mux && a.parent != b.parent) || (m.clock(c).caps.scalable && a.scale != b.scale))
        changed.push_back(c);
    }
    auto is_changed = [&](ClockId c) { return std::find(changed.begin(), changed.end(), c) != changed.end(); };

    // A gateable clock needs (re)enabling when off or when one of the
    // changed fields is watched by its ready behavior.
    auto relocks = [&](ClockId g) {
      const auto& d = m.clock(g);
      if (!d.field.ready_bit) return false;
      for (const auto& b : m.ready_behaviors) {
        if (b.ready_register != d.field.register_index || b.ready_bit != *d.field.ready_bit) continue;
        for (ClockId c : changed) {
          const auto& f = m.clock(c).field;
          if (f.register_index == b.watch_register && (f.mask() & b.watch_mask)) return true;
        }
      }
      return false;
    };
    std::vector<ClockId> enables;
    for (ClockId c : path)
      if (m.clock(c).field.enable_bit && (!cur[c.value].enabled || relocks(c))) enables.push_back(c);

    const auto live = live_clocks(m, cur);
    const auto cur_core_path = active_path(m, cur, m.core).value_or(std::vector<ClockId>{});
    auto live_fixed_below = [&](ClockId c) {
      // non-on-the-fly clocks strictly below `c` on the running core path
      auto it = std::find(cur_core_path.begin(), cur_core_path.end(), c);
      if (it == cur_core_path.end()) return false;
      return std::any_of(cur_core_path.begin(), it, [&](ClockId x) { return !m.clock(x).caps.on_the_fly && m.clock(x).kind != ClockKind::Consumer; });
    };
    bool detour = false;
    for (ClockId c : changed) {
      if ((root && c == root_id) || !live[c.value]) continue;
      if (!m.clock(c).caps.on_the_fly || live_fixed_below(c)) detour = true;
    }
    for (ClockId g : enables)
      if (live[g.value] && !m.clock(g).caps.on_the_fly) detour = true;
    if (detour) {
      const auto& opts = root ? m.clock(root_id).parent_options : std::vector<ClockId>{};
      if (!root || std::find(opts.begin(), opts.end(), m.fallback_source) == opts.end())
        fail(Errc::Unreachable, "no on-the-fly mux can route the core to the fallback source");
    }

    // Simulate the clock phases to find the highest intermediate frequency.
    auto work = cur;
    Hz fmax = state_.core_frequency();
    std::vector<Phase> clock_phases;
    auto apply = [&](std::vector<TopologyEntry>& t, const Phase& p) {
      switch (p.kind) {
        case PhaseKind::SwitchParent: t[p.clock->value].parent = ClockId{static_cast<std::uint16_t>(p.value)}; break;
        case PhaseKind::SetScaler: t[p.clock->value].scale = p.value; break;
        case PhaseKind::EnableClock: t[p.clock->value].enabled = true; break;
        case PhaseKind::DisableClock: t[p.clock->value].enabled = false; break;
        default: break;
      }
    };
    auto exact_after = [&](const Phase& p) {
      auto t = work;
      apply(t, p);
      try {
        frequency_in(m, t, m.core);
      } catch (const Error& e) {
        if (e.code() == Errc::DivisionInexact) return false;
      }
      return true;
    };
    auto emit = [&](Phase p) {
      apply(work, p);
      clock_phases.push_back(p);
      fmax = std::max(fmax, frequency_in(m, work, m.core));
    };
    // Scaler steps below the root may move when their planned slot would
    // leave the core at an inexact division.
    std::vector<Phase> deferred, later;
    auto flush_deferred = [&] {
      for (bool progress = true; progress;) {
        progress = false;
        for (auto it = deferred.begin(); it != deferred.end(); ++it) {
          if (!exact_after(*it)) continue;
          emit(*it);
          deferred.erase(it);
          progress = true;
          break;
        }
      }
    };
    auto emit_movable = [&](Phase p) {
      if (exact_after(p)) emit(p);
      else deferred.push_back(p);
    };
    auto emit_fixed = [&](Phase p) {
      while (!exact_after(p)) {
        auto* pool = &deferred;
        auto it = std::find_if(deferred.begin(), deferred.end(), exact_after);
        if (it == deferred.end()) {
          pool = &later;
          it = std::find_if(later.begin(), later.end(), exact_after);
          if (it == later.end()) break;
        }
        emit(*it);
        pool->erase(it);
      }
      emit(p);
      flush_deferred();
    };
    auto set_phase = [&](ClockId c) {
      if (m.clock(c).kind == ClockKind::Mux)
        return Phase{PhaseKind::SwitchParent, c, tgt[c.value].parent->value};
      return Phase{PhaseKind::SetScaler, c, *tgt[c.value].scale};
    };
    // Below the root: lowering steps go before the root switch, raising ones after.
    auto lowers = [&](ClockId c) {
      const auto& d = m.clock(c);
      const auto a = cur[c.value].scale.value_or(1);
      const auto b = tgt[c.value].scale.value_or(1);
      return d.op == ScaleOp::Divide ? b > a : b < a;
    };
    std::vector<ClockId> upstream, below;
    for (std::size_t i = 0; i < path.size(); ++i) {
      if (!is_changed(path[i]) || (root && path[i] == root_id)) continue;
      (root_pos && i > *root_pos ? below : upstream).push_back(path[i]);
    }

    for (ClockId c : below) {
      if (lowers(c)) emit_movable(set_phase(c));
      else later.push_back(set_phase(c));
    }
    if (detour) {
      if (!work[m.fallback_source.value].enabled) emit_fixed({PhaseKind::EnableClock, m.fallback_source, 0});
      if (work[root_id.value].parent != m.fallback_source)
        emit_fixed({PhaseKind::SwitchParent, root_id, m.fallback_source.value});
    }
    for (ClockId c : upstream) emit_fixed(set_phase(c));
    for (ClockId g : enables) {
      const bool done = std::any_of(clock_phases.begin(), clock_phases.end(), [&](const Phase& p) {
        return p.kind == PhaseKind::EnableClock && p.clock == g;
      });
      if (!done || relocks(g)) emit_fixed({PhaseKind::EnableClock, g, 0});
    }
    if (root && work[root_id.value].parent != tgt[root_id.value].parent)
      emit_fixed({PhaseKind::SwitchParent, root_id, tgt[root_id.value].parent->value});
    for (const auto& p : later) emit_movable(p);
    flush_deferred();
    for (const auto& p : deferred) emit(p);
    for (ClockId c : releasable(m, work, path)) emit({PhaseKind::DisableClock, c, 0});

    // Power envelope: admit the current, every intermediate and the target
    // frequency. Raise voltage then wait states before; lower wait states
    // then voltage after.
    const PowerSetting from{state_.voltage_range(), state_.wait_states()};
    const PowerSetting to = plan.target_power;
    auto lv = lowest_voltage_range(m, fmax);
    if (!lv) fail(Errc::Unreachable, "intermediate frequency exceeds every voltage range");
    PowerSetting env;
    env.range = std::min({from.range, to.range, *lv});
    env.ws = std::max({from.ws, to.ws, *m.flash_table.required_wait_states(env.range, fmax)});

    std::vector<Phase> phases;
    if (env.range != from.range) phases.push_back({PhaseKind::SetVoltageRange, std::nullopt, static_cast<std::int64_t>(env.range)});
    if (env.ws != from.ws) phases.push_back({PhaseKind::SetWaitStates, std::nullopt, env.ws});
    phases.insert(phases.end(), clock_phases.begin(), clock_phases.end());
    if (to.ws != env.ws) phases.push_back({PhaseKind::SetWaitStates, std::nullopt, to.ws});
    if (to.range != env.range) phases.push_back({PhaseKind::SetVoltageRange, std::nullopt, static_cast<std::int64_t>(to.range)});

    plan.touched = path;
    for (const auto& p : clock_phases)
      if (p.clock && !on_path(*p.clock)) plan.touched.push_back(*p.clock);
    if (!phases.empty()) {
      phases.insert(phases.begin(), Phase{PhaseKind::SaveState, std::nullopt, 0});
      plan.phases = std::move(phases);
    }
    return plan;
  }

  ClockState& state_;
  std::optional<std::vector<CoreConfig>> cache_;
  std::size_t generation_ = 0;
  std::set<std::uint16_t> unavailable_;
  std::vector<std::pair<std::size_t, HookRegistration>> hooks_;
  std::size_t next_hook_ = 0;
  Policy policy_ = Policy::LowVoltage;
  unsigned timeout_multiplier_ = 10;
  PhaseObserver observer_;
  std::optional<ClockId> last_veto_;
  bool busy_ = false;
};

}  // namespace clktree
