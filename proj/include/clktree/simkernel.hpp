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

// Deterministic discrete-event simulator: periodic tasks under a
// cooperative round-robin scheduler, a piecewise-constant current meter,
// DVFS at dispatch boundaries, and the named workload scenarios.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "clktree/dvfs.hpp"
#include "clktree/energy.hpp"
#include "clktree/error.hpp"
#include "clktree/platforms.hpp"
#include "clktree/transitions.hpp"

namespace clktree {

enum class StepKind : std::uint8_t {
  Compute,   // amount: cycles, stretched by flash wait states
  BusyWait,  // amount: ns, core active
  Spi,       // amount: bytes, core busy-polls the transfer
  Sleep,     // amount: ns, task blocked
};

struct Step {
  StepKind kind = StepKind::Compute;
  std::uint64_t amount = 0;
};

struct TaskSpec {
  TaskId id = 0;
  std::string name;
  double alpha = 1.0;
  MemoryClass memory = MemoryClass::Reg;
  Nanos period_ns = 0;  // 0: released again as soon as the previous activation ends
  Nanos offset_ns = 0;
  std::uint64_t max_activations = 0;  // 0: unbounded
  std::vector<Step> steps;
};

/// Duration of `cycles` at `hz` with a multiplicative stretch; exact
/// integer arithmetic when the stretch is 1.
inline Nanos cycles_to_ns(std::uint64_t cycles, Hz hz, double stretch = 1.0) {
  if (hz == 0) fail(Errc::InvalidArgument, "core is not clocked");
  if (stretch == 1.0) {
    const unsigned __int128 num = static_cast<unsigned __int128>(cycles) * 1'000'000'000u + hz / 2;
    return static_cast<Nanos>(num / hz);
  }
  return std::llround(static_cast<double>(cycles) * stretch * 1e9 / static_cast<double>(hz));
}

inline constexpr Hz kSpiTargetHz = 5'000'000;
inline constexpr std::uint32_t kRadioFramingBytes = 47;
inline constexpr std::uint32_t kRadioMaxPayload = 256;
inline constexpr Hz kRadioBitRate = 250'000;

/// Smallest power-of-two prescaler (at least 2) bringing core_hz down to the
/// SPI target rate.
inline std::uint32_t spi_prescaler(Hz core_hz) {
  std::uint32_t p = 2;
  while (core_hz > std::uint64_t{kSpiTargetHz} * p) p *= 2;
  return p;
}

inline double spi_rate(Hz core_hz, std::uint32_t prescaler) {
  return std::min(static_cast<double>(kSpiTargetHz), static_cast<double>(core_hz) / prescaler);
}

inline Nanos spi_duration_ns(std::uint64_t bytes, Hz core_hz, std::uint32_t prescaler) {
  return std::llround(static_cast<double>(bytes) * 8.0 * 1e9 / spi_rate(core_hz, prescaler));
}

inline Nanos air_time_ns(std::uint32_t payload) {
  const std::uint64_t bits = std::uint64_t{payload + kRadioFramingBytes} * 8;
  return static_cast<Nanos>(bits * 1'000'000'000 / kRadioBitRate);
}

struct RadioPhases {
  Nanos compute_ns = 0;
  Nanos spi_ns = 0;
  Nanos air_ns = 0;
};

inline constexpr std::uint64_t kRadioComputeCycles = 1000;
inline constexpr std::uint32_t kRadioPollBytes = 48;

inline RadioPhases radio_model(std::uint32_t payload, Hz core_hz, std::uint32_t prescaler) {
  if (payload > kRadioMaxPayload) fail(Errc::PayloadTooLarge, std::to_string(payload) + " B exceeds 256 B");
  if (core_hz == 0 || prescaler == 0) fail(Errc::InvalidArgument, "core clock and prescaler must be nonzero");
  const std::uint32_t frame = payload + kRadioFramingBytes;
  return {cycles_to_ns(kRadioComputeCycles, core_hz), spi_duration_ns(frame, core_hz, prescaler), air_time_ns(payload)};
}

struct SimOptions {
  bool dvfs = false;
  Policy policy = Policy::LowVoltage;
  std::uint64_t seed = 0;
  Nanos duration_ns = 0;  // 0: run until every bounded task is done
  double jitter = 0.0;    // relative spread applied to compute cycles
  AssessmentOptions assessment;
  bool record_trace = true;
};

struct TraceSegment {
  Nanos start_ns = 0;
  Nanos duration_ns = 0;
  double current_a = 0.0;
  Hz core_hz = 0;
  std::size_t bucket = 0;  // task index, then idle, then kernel
  bool busy = false;
};

struct TaskTotals {
  double charge_c = 0.0;
  Nanos busy_ns = 0;
  Nanos idle_ns = 0;
  std::uint64_t activations = 0;
};

struct WindowTotals {
  Nanos start_ns = 0;
  Nanos end_ns = 0;
  std::vector<TaskTotals> tasks;  // per task, then idle, then kernel
  double charge_c = 0.0;
};

class Simulator {
 public:
  Simulator(ClockState state, std::vector<TaskSpec> tasks, SimOptions opts)
      : state_(std::move(state)), tm_(state_), tasks_(std::move(tasks)), opts_(std::move(opts)), rng_(opts_.seed) {
    if (tasks_.empty()) fail(Errc::InvalidArgument, "scenario has no tasks");
    tm_.set_policy(opts_.policy);
    if (opts_.dvfs) dvfs_ = std::make_unique<DvfsController>(tm_, opts_.assessment);
    runs_.resize(tasks_.size());
    totals_.resize(tasks_.size() + 2);
    selected_.resize(tasks_.size(), 0);
    const Nanos t0 = now();
    for (std::size_t i = 0; i < tasks_.size(); ++i) runs_[i].release = t0 + tasks_[i].offset_ns;
  }

  Simulator(const Simulator&) = delete;
  Simulator& operator=(const Simulator&) = delete;

  std::size_t idle_bucket() const { return tasks_.size(); }
  std::size_t kernel_bucket() const { return tasks_.size() + 1; }

  ClockState& state() { return state_; }
  TransitionManager& transitions() { return tm_; }
  DvfsController* dvfs() { return dvfs_.get(); }
  const DvfsController* dvfs() const { return dvfs_.get(); }
  const std::vector<TaskSpec>& tasks() const { return tasks_; }
  const std::vector<TraceSegment>& segments() const { return segments_; }
  const std::vector<TaskTotals>& totals() const { return totals_; }
  Hz selected_hz(std::size_t task_index) const { return selected_[task_index]; }
  Nanos start_ns() const { return start_; }
  Nanos end_ns() const { return end_; }
  std::optional<Nanos> assessment_end() const { return assessment_end_; }
  std::size_t transitions_run() const { return transitions_run_; }
  Nanos completion_ns() const { return completion_; }
  double supply_voltage() const { return state_.model().energy.supply_voltage; }

  void run() {
    if (ran_) fail(Errc::InvalidArgument, "simulator already ran");
    ran_ = true;
    start_ = now();
    if (dvfs_) {
      std::vector<TaskId> ids;
      for (const auto& t : tasks_) ids.push_back(t.id);
      dvfs_->begin_assessment(ids, now());
    }
    const Nanos limit = opts_.duration_ns > 0 ? start_ + opts_.duration_ns : std::numeric_limits<Nanos>::max();
    std::size_t rr = 0;
    std::optional<std::size_t> last;
    while (now() < limit) {
      if (all_done()) break;
      auto pick = pick_ready(rr);
      if (!pick) {
        const Nanos wake = std::min(next_event(), limit);
        if (wake == std::numeric_limits<Nanos>::max()) break;
        idle_until(wake, last);
        continue;
      }
      rr = (*pick + 1) % tasks_.size();
      dispatch(*pick);
      last = *pick;
    }
    end_ = now();
  }

  /// Charge and time restricted to [from, to).
  WindowTotals window(Nanos from, Nanos to) const {
    WindowTotals w{from, to, std::vector<TaskTotals>(tasks_.size() + 2), 0.0};
    for (const auto& s : segments_) {
      const Nanos a = std::max(from, s.start_ns), b = std::min(to, s.start_ns + s.duration_ns);
      if (b <= a) continue;
      const double q = s.current_a * static_cast<double>(b - a) * 1e-9;
      auto& t = w.tasks[s.bucket];
      t.charge_c += q;
      (s.busy ? t.busy_ns : t.idle_ns) += b - a;
      w.charge_c += q;
    }
    for (const auto& [task, at] : completions_)
      if (at > from && at <= to) ++w.tasks[task].activations;
    return w;
  }

  void write_trace_csv(std::ostream& os) const {
    os << "time_ns,current_a,core_hz,task\n";
    char buf[64];
    for (const auto& s : segments_) {
      std::snprintf(buf, sizeof buf, "%.9e", s.current_a);
      os << s.start_ns << ',' << buf << ',' << s.core_hz << ',' << bucket_name(s.bucket) << '\n';
    }
  }

  std::string bucket_name(std::size_t b) const {
    if (b < tasks_.size()) return tasks_[b].name;
    return b == idle_bucket() ? "idle" : "kernel";
  }

 private:
  struct Run {
    Nanos release = 0;
    std::uint64_t started = 0;  // activations begun
    bool active = false;
    std::size_t step = 0;
    Nanos blocked_until = 0;
    std::uint64_t cycles_override = 0;  // jittered cycles for the current compute step
  };

  Nanos now() const { return state_.registers().now(); }

  bool finished(std::size_t i) const {
    const auto& t = tasks_[i];
    return t.max_activations && runs_[i].started >= t.max_activations && !runs_[i].active;
  }

  bool all_done() const {
    bool bounded = false;
    for (std::size_t i = 0; i < tasks_.size(); ++i) {
      if (!tasks_[i].max_activations) continue;
      bounded = true;
      if (!finished(i)) return false;
    }
    return bounded && opts_.duration_ns == 0;
  }

  bool ready(std::size_t i) const {
    const auto& r = runs_[i];
    if (r.active) return r.blocked_until <= now();
    return !finished(i) && r.release <= now();
  }

  std::optional<std::size_t> pick_ready(std::size_t from) const {
    for (std::size_t k = 0; k < tasks_.size(); ++k) {
      const std::size_t i = (from + k) % tasks_.size();
      if (ready(i)) return i;
    }
    return std::nullopt;
  }

  Nanos next_event() const {
    Nanos t = std::numeric_limits<Nanos>::max();
    for (std::size_t i = 0; i < tasks_.size(); ++i) {
      if (runs_[i].active) t = std::min(t, runs_[i].blocked_until);
      else if (!finished(i)) t = std::min(t, runs_[i].release);
    }
    return t;
  }

  void meter(Nanos dt, double current, std::size_t bucket, bool busy) {
    if (dt <= 0) return;
    const Nanos t = now();
    state_.registers().advance_time(dt);
    auto& tot = totals_[bucket];
    tot.charge_c += current * static_cast<double>(dt) * 1e-9;
    (busy ? tot.busy_ns : tot.idle_ns) += dt;
    if (!opts_.record_trace) return;
    const Hz hz = state_.core_frequency();
    if (!segments_.empty()) {
      auto& p = segments_.back();
      if (p.start_ns + p.duration_ns == t && p.current_a == current && p.core_hz == hz && p.bucket == bucket &&
          p.busy == busy) {
        p.duration_ns += dt;
        return;
      }
    }
    segments_.push_back({t, dt, current, hz, bucket, busy});
  }

  double idle_current() const {
    const auto op = operating_point(state_);
    return state_.model().energy.static_current + op.overhead_a;
  }

  double active_current(const TaskSpec& t) const {
    const auto& e = state_.model().energy;
    const auto op = operating_point(state_);
    const double a = t.alpha * e.memory_alpha[static_cast<std::size_t>(t.memory)];
    return instantaneous_current(e, a, op.core_hz, op.core_voltage, true) + op.overhead_a;
  }

  void idle_until(Nanos wake, std::optional<std::size_t> last) {
    const Nanos dt = wake - now();
    if (dt <= 0) return;
    const Hz f = state_.core_frequency();
    meter(dt, idle_current(), idle_bucket(), false);
    if (last) {
      totals_[*last].idle_ns += dt;
      if (dvfs_) {
        dvfs_->after_slice(tasks_[*last].id, f, 0, dt, 0, 0, now());
        note_assessment();
      }
    }
  }

  void apply_dvfs(std::size_t i) {
    if (!dvfs_) return;
    auto target = dvfs_->before_dispatch(tasks_[i].id, now());
    note_assessment();
    if (!target) return;
    const auto cur = tm_.current_core_config();
    if (cur.topology == target->config.topology && state_.voltage_range() == target->power.range &&
        state_.wait_states() == target->power.ws)
      return;
    const auto plan = tm_.plan_to(target->config, target->power);
    if (plan.empty()) return;
    // Transition time is metered at the idle level of the configuration
    // being left.
    const double i_idle = idle_current();
    const Hz f = state_.core_frequency();
    const Nanos t0 = now();
    const auto rep = tm_.execute(plan);
    ++transitions_run_;
    const Nanos dt = rep.elapsed_ns;
    // execute() advanced the register clock; book the interval afterwards.
    totals_[kernel_bucket()].charge_c += i_idle * static_cast<double>(dt) * 1e-9;
    totals_[kernel_bucket()].busy_ns += dt;
    if (dt > 0 && opts_.record_trace) segments_.push_back({t0, dt, i_idle, f, kernel_bucket(), true});
  }

  std::uint64_t jittered(std::uint64_t cycles) {
    if (opts_.jitter <= 0.0 || cycles == 0) return cycles;
    // Manual mapping keeps the sequence identical across standard libraries.
    const double u = static_cast<double>(rng_() >> 11) * 0x1.0p-53;
    const double scale = 1.0 + opts_.jitter * (2.0 * u - 1.0);
    return static_cast<std::uint64_t>(std::llround(static_cast<double>(cycles) * std::max(0.0, scale)));
  }

  void dispatch(std::size_t i) {
    auto& r = runs_[i];
    const auto& t = tasks_[i];
    if (!r.active) {
      r.active = true;
      r.step = 0;
      r.blocked_until = 0;
      ++r.started;
      r.cycles_override = 0;
    }
    apply_dvfs(i);
    const auto& e = state_.model().energy;
    const Hz f = state_.core_frequency();
    selected_[i] = f;
    Nanos busy = 0;
    auto run_for = [&](Nanos dt) {
      meter(dt, active_current(t), i, true);
      busy += dt;
    };
    run_for(cycles_to_ns(static_cast<std::uint64_t>(e.context_switch_cycles), f));
    bool blocked = false;
    while (r.step < t.steps.size() && !blocked) {
      const auto& s = t.steps[r.step];
      switch (s.kind) {
        case StepKind::Compute: {
          const std::uint64_t c = jittered(s.amount);
          run_for(cycles_to_ns(c, f, wait_state_factor(e, t.memory, state_.wait_states())));
          break;
        }
        case StepKind::BusyWait:
          run_for(static_cast<Nanos>(s.amount));
          break;
        case StepKind::Spi:
          run_for(spi_duration_ns(s.amount, f, spi_prescaler(f)));
          break;
        case StepKind::Sleep:
          r.blocked_until = now() + static_cast<Nanos>(s.amount);
          blocked = true;
          break;
      }
      ++r.step;
    }
    std::uint64_t done = 0;
    if (r.step >= t.steps.size()) {
      // A trailing sleep still belongs to the activation; it ends on wake-up
      // without another dispatch.
      const Nanos end = blocked ? r.blocked_until : now();
      r.active = false;
      done = 1;
      ++totals_[i].activations;
      completions_.push_back({i, end});
      completion_ = std::max(completion_, end);
      r.release = t.period_ns > 0 ? std::max(r.release + t.period_ns, end) : end;
    }
    if (dvfs_) {
      dvfs_->after_slice(t.id, f, busy, 0, 1, done, now());
      note_assessment();
    }
  }

  void note_assessment() {
    if (dvfs_ && !dvfs_->assessing() && !assessment_end_) assessment_end_ = now();
  }

  ClockState state_;
  TransitionManager tm_;
  std::vector<TaskSpec> tasks_;
  SimOptions opts_;
  std::mt19937_64 rng_;
  std::unique_ptr<DvfsController> dvfs_;
  std::vector<Run> runs_;
  std::vector<TaskTotals> totals_;
  std::vector<Hz> selected_;
  std::vector<TraceSegment> segments_;
  std::vector<std::pair<std::size_t, Nanos>> completions_;
  Nanos start_ = 0;
  Nanos end_ = 0;
  Nanos completion_ = 0;
  std::optional<Nanos> assessment_end_;
  std::size_t transitions_run_ = 0;
  bool ran_ = false;
};

}  // namespace clktree
