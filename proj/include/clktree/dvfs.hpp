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

// Per-task scheduler statistics, Load and PU metrics, stepped frequency
// assessment and charge-optimal configuration selection.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "clktree/energy.hpp"
#include "clktree/error.hpp"
#include "clktree/transitions.hpp"

namespace clktree {

using TaskId = std::uint32_t;

struct FrequencySample {
  Nanos busy_ns = 0;
  Nanos idle_ns = 0;
  std::uint64_t switches = 0;
  std::uint64_t activations = 0;
};

class TaskStats {
 public:
  void record_slice(TaskId task, Hz freq, Nanos busy_ns, Nanos idle_ns, std::uint64_t switches,
                    std::uint64_t activations = 0) {
    if (busy_ns < 0 || idle_ns < 0) fail(Errc::InvalidArgument, "negative slice duration");
    auto& s = data_[task][freq];
    s.busy_ns += busy_ns;
    s.idle_ns += idle_ns;
    s.switches += switches;
    s.activations += activations;
  }

  const FrequencySample* sample(TaskId task, Hz freq) const {
    auto t = data_.find(task);
    if (t == data_.end()) return nullptr;
    auto f = t->second.find(freq);
    return f == t->second.end() ? nullptr : &f->second;
  }

  std::vector<Hz> frequencies(TaskId task) const {
    std::vector<Hz> out;
    if (auto t = data_.find(task); t != data_.end())
      for (const auto& [f, s] : t->second) out.push_back(f);
    return out;
  }

  double load(TaskId task, Hz freq) const {
    const auto* s = sample(task, freq);
    if (!s || s->busy_ns + s->idle_ns == 0) fail(Errc::NoData, "no time recorded for task " + std::to_string(task));
    return static_cast<double>(s->busy_ns) / static_cast<double>(s->busy_ns + s->idle_ns);
  }

  /// Mean busy time per completed activation, in ns.
  double busy_per_activation(TaskId task, Hz freq) const {
    const auto* s = sample(task, freq);
    if (!s || s->activations == 0)
      fail(Errc::NoData, "no activations of task " + std::to_string(task) + " at " + std::to_string(freq) + " Hz");
    return static_cast<double>(s->busy_ns) / static_cast<double>(s->activations);
  }

  void clear() { data_.clear(); }

 private:
  std::map<TaskId, std::map<Hz, FrequencySample>> data_;
};

/// Unit-generic forms: with std::chrono durations and a frequency type whose
/// quotient is a plain number, both results are dimensionless.
template <class Duration>
auto load_fraction(Duration busy, Duration idle) {
  return busy / (busy + idle);
}

template <class Duration, class Frequency>
auto performance_utilization(Duration busy_f1, Duration busy_f2, Frequency f1, Frequency f2) {
  return (busy_f1 / busy_f2) * (f1 / f2);
}

inline double assess_pu(const TaskStats& stats, TaskId task, Hz f1, Hz f2) {
  if (!(f1 < f2)) fail(Errc::InvalidArgument, "assess_pu needs f1 < f2");
  const double t1 = stats.busy_per_activation(task, f1);
  const double t2 = stats.busy_per_activation(task, f2);
  if (t2 == 0.0) fail(Errc::ZeroBusy, "no busy time at " + std::to_string(f2) + " Hz");
  return performance_utilization(t1, t2, static_cast<double>(f1), static_cast<double>(f2));
}

struct PairwisePU {
  Hz f1 = 0;
  Hz f2 = 0;
  double pu = 0.0;
};

enum class RecordStatus : std::uint8_t { Ok, NoData };

/// `pu` is the span value over (f_low, f_high) and serves as the task's
/// signature; pairwise values over consecutive frequencies are kept for
/// diagnostics.
struct PURecord {
  TaskId task = 0;
  Hz f_low = 0;
  Hz f_high = 0;
  double pu = 0.0;
  std::vector<PairwisePU> pairwise;
  Nanos assessed_at = 0;
  RecordStatus status = RecordStatus::NoData;
};

inline PURecord build_record(const TaskStats& stats, TaskId task, std::vector<Hz> freqs, Nanos now) {
  std::sort(freqs.begin(), freqs.end());
  freqs.erase(std::unique(freqs.begin(), freqs.end()), freqs.end());
  PURecord r{.task = task, .assessed_at = now};
  if (freqs.size() < 2) return r;
  r.f_low = freqs.front();
  r.f_high = freqs.back();
  try {
    for (std::size_t i = 0; i + 1 < freqs.size(); ++i)
      r.pairwise.push_back({freqs[i], freqs[i + 1], assess_pu(stats, task, freqs[i], freqs[i + 1])});
    r.pu = assess_pu(stats, task, r.f_low, r.f_high);
    r.status = RecordStatus::Ok;
  } catch (const Error& e) {
    if (e.code() != Errc::NoData && e.code() != Errc::ZeroBusy) throw;
    r.pairwise.clear();
    r.pu = 0.0;
  }
  return r;
}

/// What the controller knows about a task beyond its measured timing.
struct TaskProfile {
  double alpha = 1.0;
  MemoryClass memory = MemoryClass::Reg;
  std::optional<Nanos> period_ns;
};

struct FrequencyDecision {
  TaskId task = 0;
  CoreConfig target;
  PowerSetting power;
  double estimated_charge_c = 0.0;
  bool stale = false;
  double pu_at_decision = 0.0;
  std::size_t generation = 0;
};

struct AssessmentOptions {
  std::uint64_t window_activations = 10;
  Nanos window_ns = 50'000'000;
  bool pin_power = true;     // keep range and wait states fixed while stepping
  std::vector<Hz> frequencies;  // empty: the platform's assessment set
};

/// A core configuration plus the voltage/wait-state setting to run it with.
struct DispatchTarget {
  CoreConfig config;
  PowerSetting power;
};

class DvfsController {
 public:
  explicit DvfsController(TransitionManager& tm, AssessmentOptions opts = {}) : tm_(tm), opts_(std::move(opts)) {
    candidates_ = tm_.model().evaluation_frequencies;
  }

  TaskStats& stats() { return stats_; }
  const TaskStats& stats() const { return stats_; }
  const TaskStats& assessment_stats() const { return assess_stats_; }
  TransitionManager& transitions() { return tm_; }

  void set_profile(TaskId task, TaskProfile p) {
    profiles_[task] = p;
    if (auto it = decisions_.find(task); it != decisions_.end()) it->second.stale = true;
  }
  const TaskProfile& profile(TaskId task) const {
    static const TaskProfile fallback{};
    auto it = profiles_.find(task);
    return it == profiles_.end() ? fallback : it->second;
  }

  /// Frequencies selection may choose from; empty means every explored one.
  void set_candidate_frequencies(std::vector<Hz> f) {
    candidates_ = std::move(f);
    for (auto& [t, d] : decisions_) d.stale = true;
  }
  void set_staleness_threshold(double v) { staleness_threshold_ = v; }

  void begin_assessment(std::vector<TaskId> tasks, Nanos now) {
    auto freqs = opts_.frequencies.empty() ? tm_.model().assessment_frequencies : opts_.frequencies;
    std::sort(freqs.begin(), freqs.end());
    freqs.erase(std::unique(freqs.begin(), freqs.end()), freqs.end());
    const auto cur = tm_.current_core_config();
    std::vector<CoreConfig> steps;
    std::vector<Hz> usable;
    for (Hz f : freqs) {
      if (auto c = step_config(f, cur)) {
        steps.push_back(*c);
        usable.push_back(f);
      }
    }
    if (usable.size() < 2) fail(Errc::InsufficientFrequencies, "assessment needs at least two reachable frequencies");
    restore_ = DispatchTarget{cur, {tm_.state().voltage_range(), tm_.state().wait_states()}};
    tasks_ = std::move(tasks);
    steps_ = std::move(steps);
    step_freqs_ = std::move(usable);
    pinned_.reset();
    if (opts_.pin_power) {
      const auto& m = tm_.model();
      const auto r = lowest_voltage_range(m, step_freqs_.back());
      pinned_ = PowerSetting{*r, *m.flash_table.required_wait_states(*r, step_freqs_.back())};
    }
    assess_stats_.clear();
    step_ = 0;
    step_start_ = now;
    assessing_ = true;
  }

  bool assessing() const { return assessing_; }
  std::optional<std::size_t> assessment_step() const { return assessing_ ? std::optional{step_} : std::nullopt; }
  const std::vector<Hz>& assessment_frequencies() const { return step_freqs_; }

  /// Where the core should be when `task` is dispatched at `now`; nullopt
  /// keeps the current configuration.
  std::optional<DispatchTarget> before_dispatch(TaskId task, Nanos now) {
    if (assessing_) {
      maybe_advance(now);
      if (assessing_) return DispatchTarget{steps_[step_], step_power(steps_[step_])};
      return restore_;
    }
    const auto* r = record(task);
    if (!r || r->status != RecordStatus::Ok) return restore_;
    const auto& d = select_frequency(task);
    return DispatchTarget{d.target, d.power};
  }

  void after_slice(TaskId task, Hz f, Nanos busy, Nanos idle, std::uint64_t switches, std::uint64_t activations,
                   Nanos now) {
    stats_.record_slice(task, f, busy, idle, switches, activations);
    if (assessing_) {
      if (std::find(step_freqs_.begin(), step_freqs_.end(), f) != step_freqs_.end() && f == step_freqs_[step_])
        assess_stats_.record_slice(task, f, busy, idle, switches, activations);
      maybe_advance(now);
    }
  }

  /// Ends the current assessment step regardless of the window.
  void force_advance(Nanos now) {
    if (assessing_) advance(now);
  }

  const std::vector<PURecord>& records() const { return records_; }
  const PURecord* record(TaskId task) const {
    for (const auto& r : records_)
      if (r.task == task) return &r;
    return nullptr;
  }

  /// Feeds a fresh PU measurement; a drift beyond the threshold marks the
  /// cached decision stale.
  void observe_pu(TaskId task, double pu) {
    if (auto it = decisions_.find(task); it != decisions_.end() &&
                                         std::abs(pu - it->second.pu_at_decision) > staleness_threshold_)
      it->second.stale = true;
  }

  const FrequencyDecision* cached_decision(TaskId task) const {
    auto it = decisions_.find(task);
    return it == decisions_.end() ? nullptr : &it->second;
  }

  bool decision_stale(TaskId task) const {
    const auto* d = cached_decision(task);
    return !d || d->stale || d->generation != tm_.generation() || !tm_.cache_valid();
  }

  const FrequencyDecision& select_frequency(TaskId task) {
    const auto* r = record(task);
    if (!r || r->status != RecordStatus::Ok) fail(Errc::NotAssessed, "task " + std::to_string(task) + " has no PU record");
    if (!decision_stale(task)) return decisions_.at(task);

    const auto& m = tm_.model();
    const auto& configs = tm_.explore();
    const auto& prof = profile(task);
    const auto model = timing_model(*r, prof);
    const double alpha = prof.alpha * m.energy.memory_alpha[static_cast<std::size_t>(prof.memory)];

    std::optional<FrequencyDecision> best;
    std::optional<FrequencyDecision> fastest;
    for (const auto& c : configs) {
      if (!candidates_.empty() && std::find(candidates_.begin(), candidates_.end(), c.frequency) == candidates_.end())
        continue;
      const auto power = c.power(m, tm_.policy());
      const double f = static_cast<double>(c.frequency);
      const double t = model.cycles * wait_state_factor(m.energy, prof.memory, power.ws) / f + model.fixed_s +
                       m.energy.context_switch_cycles / f;
      const auto topo = projected_topology(m, tm_.state().topology(), c);
      const double v = m.voltage_ranges[power.range].core_voltage;
      const double i = instantaneous_current(m.energy, alpha, c.frequency, v, true) + overhead_current(m, topo, power.range);
      FrequencyDecision d{task, c, power, i * t, false, r->pu, 0};
      if (!fastest || c.frequency > fastest->target.frequency) fastest = d;
      if (prof.period_ns && t * 1e9 > static_cast<double>(*prof.period_ns)) continue;
      if (!best || better(d, *best)) best = d;
    }
    if (!best) best = fastest;
    if (!best) fail(Errc::Unreachable, "no candidate configuration");
    tm_.explore();
    best->generation = tm_.generation();
    return decisions_[task] = *best;
  }

  /// Two-component timing fitted to the span samples: t(f) = cycles/f + fixed_s.
  struct TimingModel {
    double cycles = 0.0;   // at zero wait states
    double fixed_s = 0.0;
  };

  TimingModel timing_model(const PURecord& r, const TaskProfile& prof) const {
    const auto& m = tm_.model();
    const double f1 = static_cast<double>(r.f_low), f2 = static_cast<double>(r.f_high);
    const double t1 = assess_stats_.sample(r.task, r.f_low) ? assess_stats_.busy_per_activation(r.task, r.f_low) * 1e-9
                                                             : stats_.busy_per_activation(r.task, r.f_low) * 1e-9;
    const double t2 = assess_stats_.sample(r.task, r.f_high) ? assess_stats_.busy_per_activation(r.task, r.f_high) * 1e-9
                                                              : stats_.busy_per_activation(r.task, r.f_high) * 1e-9;
    double w = (t1 - t2) / (1.0 / f1 - 1.0 / f2);
    w = std::max(0.0, w);
    double fixed = std::max(0.0, t2 - w / f2);
    // Samples include dispatch costs; selection adds one back per candidate.
    const auto* hs = assess_stats_.sample(r.task, r.f_high) ? assess_stats_.sample(r.task, r.f_high)
                                                              : stats_.sample(r.task, r.f_high);
    const double per_act = hs && hs->activations ? static_cast<double>(hs->switches) / hs->activations : 1.0;
    w = std::max(0.0, w - m.energy.context_switch_cycles * per_act);
    const std::uint32_t ws = pinned_ ? pinned_->ws : tm_.state().wait_states();
    return {w / wait_state_factor(m.energy, prof.memory, ws), fixed};
  }

 private:
  static bool better(const FrequencyDecision& a, const FrequencyDecision& b) {
    const double scale = std::max(std::abs(a.estimated_charge_c), std::abs(b.estimated_charge_c));
    if (std::abs(a.estimated_charge_c - b.estimated_charge_c) > 1e-12 * scale)
      return a.estimated_charge_c < b.estimated_charge_c;
    if (a.target.frequency != b.target.frequency) return a.target.frequency < b.target.frequency;
    return a.target.id < b.target.id;
  }

  /// Explored config at `f`, preferring the running source and source kind.
  std::optional<CoreConfig> step_config(Hz f, const CoreConfig& cur) {
    std::optional<CoreConfig> best;
    auto rank = [&](const CoreConfig& c) { return std::tuple{c.source != cur.source, c.source_kind != cur.source_kind, c.id}; };
    for (const auto& c : tm_.explore())
      if (c.frequency == f && (!best || rank(c) < rank(*best))) best = c;
    return best;
  }

  PowerSetting step_power(const CoreConfig& c) const {
    return pinned_ ? *pinned_ : c.power(tm_.model(), tm_.policy());
  }

  void maybe_advance(Nanos now) {
    if (!assessing_) return;
    const Hz f = step_freqs_[step_];
    bool all = !tasks_.empty();
    for (TaskId t : tasks_) {
      const auto* s = assess_stats_.sample(t, f);
      if (!s || s->activations < opts_.window_activations) all = false;
    }
    if (all || now - step_start_ >= opts_.window_ns) advance(now);
  }

  void advance(Nanos now) {
    ++step_;
    step_start_ = now;
    if (step_ < steps_.size()) return;
    assessing_ = false;
    for (TaskId t : tasks_) {
      auto rec = build_record(assess_stats_, t, step_freqs_, now);
      std::erase_if(records_, [&](const PURecord& r) { return r.task == t; });
      if (rec.status == RecordStatus::Ok) observe_pu(t, rec.pu);
      records_.push_back(std::move(rec));
    }
  }

  TransitionManager& tm_;
  AssessmentOptions opts_;
  TaskStats stats_;
  TaskStats assess_stats_;
  std::map<TaskId, TaskProfile> profiles_;
  std::map<TaskId, FrequencyDecision> decisions_;
  std::vector<PURecord> records_;
  std::vector<Hz> candidates_;
  double staleness_threshold_ = 0.05;

  bool assessing_ = false;
  std::vector<TaskId> tasks_;
  std::vector<CoreConfig> steps_;
  std::vector<Hz> step_freqs_;
  std::optional<PowerSetting> pinned_;
  std::optional<DispatchTarget> restore_;
  std::size_t step_ = 0;
  Nanos step_start_ = 0;
};

}  // namespace clktree
