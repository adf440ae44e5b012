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

// Named workloads, the synthetic two-component benchmark family, and
// helpers that run a scenario at a pinned configuration or sweep one
// activation across explored configurations.

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "clktree/simkernel.hpp"

namespace clktree {

/// Two-component workload: W scalable cycles followed by T of busy-waiting.
struct WorkloadSpec {
  TaskId id = 0;
  double alpha = 1.0;
  std::uint64_t scalable_cycles = 0;
  Nanos timebound_ns = 0;
  Nanos period_ns = 0;
  MemoryClass memory = MemoryClass::Reg;
};

inline constexpr std::uint64_t kSynthMaxCycles = 594'000;
inline constexpr Nanos kSynthTimeboundNs = 150'000'000;

/// Sweeps the scalable fraction s = i/(n-1) from pure wait to pure compute.
inline std::vector<WorkloadSpec> synth_benchmark(std::size_t n) {
  if (n < 2) fail(Errc::InvalidArgument, "synthetic suite needs at least two tasks");
  std::vector<WorkloadSpec> out;
  for (std::size_t i = 0; i < n; ++i) {
    WorkloadSpec w;
    w.id = static_cast<TaskId>(i);
    w.scalable_cycles = static_cast<std::uint64_t>(i) * kSynthMaxCycles / (n - 1);
    w.timebound_ns = static_cast<Nanos>(n - 1 - i) * kSynthTimeboundNs / static_cast<Nanos>(n - 1);
    out.push_back(w);
  }
  return out;
}

inline TaskSpec to_task(const WorkloadSpec& w, std::string name) {
  if (w.scalable_cycles == 0 && w.timebound_ns == 0) fail(Errc::InvalidArgument, "workload has no work");
  TaskSpec t{.id = w.id, .name = std::move(name), .alpha = w.alpha, .memory = w.memory, .period_ns = w.period_ns};
  if (w.scalable_cycles) t.steps.push_back({StepKind::Compute, w.scalable_cycles});
  if (w.timebound_ns) t.steps.push_back({StepKind::BusyWait, static_cast<std::uint64_t>(w.timebound_ns)});
  return t;
}

struct ScenarioParams {
  std::uint32_t payload = 64;
  std::size_t tasks = 100;
  std::uint64_t packets = 50;
  std::string op = "add";
  std::string mem = "reg";
};

struct Scenario {
  std::string name;
  std::vector<TaskSpec> tasks;
  Nanos duration_ns = 0;
  std::optional<AssessmentOptions> assessment;  // overrides the default window
};

inline constexpr Nanos kProducerConsumerPeriod = 20'000'000;

inline std::vector<std::string> scenario_names() {
  return {"producer_consumer", "synthetic_suite", "radio_send", "radio_recv", "micro"};
}

inline MemoryClass parse_memory_class(const std::string& s) {
  if (s == "reg") return MemoryClass::Reg;
  if (s == "ram") return MemoryClass::Ram;
  if (s == "flash") return MemoryClass::Flash;
  fail(Errc::UnknownScenario, "unknown memory class '" + s + "'");
}

/// Relative switching activity of the micro-benchmark instructions.
inline double op_alpha(const std::string& op) {
  if (op == "add") return 1.0;
  if (op == "mul") return 1.05;
  if (op == "div") return 0.6;
  fail(Errc::UnknownScenario, "unknown micro operation '" + op + "'");
}

inline Scenario make_scenario(const std::string& name, const ScenarioParams& p = {}) {
  Scenario s{name, {}, 0, std::nullopt};
  if (name == "producer_consumer") {
    // The producer mostly polls a slow sensor; the consumer filters the data.
    s.tasks.push_back({.id = 0,
                       .name = "producer",
                       .memory = MemoryClass::Ram,
                       .period_ns = kProducerConsumerPeriod,
                       .steps = {{StepKind::Compute, 12'000}, {StepKind::BusyWait, 6'000'000}}});
    s.tasks.push_back({.id = 1,
                       .name = "consumer",
                       .memory = MemoryClass::Flash,
                       .period_ns = kProducerConsumerPeriod,
                       .steps = {{StepKind::Compute, 400'000}}});
    s.duration_ns = 2'000'000'000;
  } else if (name == "synthetic_suite") {
    for (const auto& w : synth_benchmark(p.tasks)) {
      auto t = to_task(w, "synth" + std::to_string(w.id));
      t.max_activations = 60;
      s.tasks.push_back(std::move(t));
    }
    // One activation of every task per step; a single round of the suite
    // outlasts the default 50 ms window.
    s.assessment = AssessmentOptions{.window_activations = 1, .window_ns = 600'000'000'000};
  } else if (name == "radio_send" || name == "radio_recv") {
    if (p.payload > kRadioMaxPayload) fail(Errc::PayloadTooLarge, std::to_string(p.payload) + " B exceeds 256 B");
    const std::uint64_t frame = p.payload + kRadioFramingBytes;
    const auto air = static_cast<std::uint64_t>(air_time_ns(p.payload));
    TaskSpec t{.id = 0, .max_activations = p.packets};
    if (name == "radio_send") {
      t.name = "sender";
      t.steps = {{StepKind::Compute, kRadioComputeCycles}, {StepKind::Spi, frame + kRadioPollBytes}, {StepKind::Sleep, air}};
    } else {
      t.name = "receiver";
      t.steps = {{StepKind::Sleep, air}, {StepKind::Spi, frame}, {StepKind::Compute, kRadioComputeCycles}};
    }
    s.tasks.push_back(std::move(t));
  } else if (name == "micro") {
    s.tasks.push_back({.id = 0,
                       .name = p.op + "_" + p.mem,
                       .alpha = op_alpha(p.op),
                       .memory = parse_memory_class(p.mem),
                       .period_ns = 10'000'000,
                       .steps = {{StepKind::Compute, 100'000}}});
    s.duration_ns = 1'000'000'000;
  } else {
    fail(Errc::UnknownScenario, "unknown scenario '" + name + "'");
  }
  return s;
}

/// Booted state moved to `cfg` with the given voltage/wait-state setting.
inline ClockState state_at(std::shared_ptr<const PlatformModel> m, const CoreConfig& cfg, PowerSetting power) {
  ClockState st(std::move(m));
  TransitionManager tm(st);
  const auto plan = tm.plan_to(cfg, power);
  if (!plan.empty()) tm.execute(plan);
  return st;
}

inline std::unique_ptr<Simulator> simulate(ClockState st, const Scenario& sc, SimOptions opts) {
  if (opts.duration_ns == 0) opts.duration_ns = sc.duration_ns;
  if (sc.assessment) opts.assessment = *sc.assessment;
  auto sim = std::make_unique<Simulator>(std::move(st), sc.tasks, std::move(opts));
  sim->run();
  return sim;
}

/// A scenario run plus, with DVFS on, the same-seed baseline with DVFS off.
/// The steady window starts at the first period boundary after assessment
/// and covers the span both runs simulated.
struct ScenarioRun {
  Scenario scenario;
  SimOptions options;
  std::unique_ptr<Simulator> sim;
  std::unique_ptr<Simulator> baseline;
  Nanos steady_start = 0;
  Nanos steady_end = 0;
};

inline ScenarioRun run_scenario(const std::string& platform, const std::string& scenario, const ScenarioParams& params,
                                SimOptions opts) {
  auto m = get_platform(platform);
  ScenarioRun r{make_scenario(scenario, params), opts, nullptr, nullptr, 0, 0};
  r.sim = simulate(ClockState(m), r.scenario, opts);
  r.steady_start = r.sim->start_ns();
  r.steady_end = r.sim->end_ns();
  if (opts.dvfs) {
    SimOptions base = opts;
    base.dvfs = false;
    r.baseline = simulate(ClockState(m), r.scenario, base);
    Nanos period = 0;
    for (const auto& t : r.scenario.tasks) period = std::max(period, t.period_ns);
    const Nanos t0 = r.sim->start_ns();
    Nanos st = r.sim->assessment_end().value_or(r.sim->end_ns());
    if (period > 0) st = t0 + (st - t0 + period - 1) / period * period;
    r.steady_start = std::min(st, r.sim->end_ns());
    r.steady_end = std::min(r.sim->end_ns(), r.baseline->end_ns());
    r.steady_end = std::max(r.steady_end, r.steady_start);
  }
  return r;
}

struct SweepPoint {
  CoreConfig config;
  PowerSetting power;
  double charge_c = 0.0;  // busy charge of one activation
  Nanos busy_ns = 0;
};

/// For each frequency, the explored configuration with the least charge
/// for one activation of each task. Result is indexed [task][frequency].
/// `only` restricts the sweep to one source kind (frequency scaling within
/// a fixed topology family).
inline std::vector<std::map<Hz, SweepPoint>> sweep_best(std::shared_ptr<const PlatformModel> m,
                                                         const std::vector<TaskSpec>& tasks, Policy policy,
                                                         const std::vector<Hz>& frequencies,
                                                         std::optional<SourceKind> only = std::nullopt) {
  std::vector<std::map<Hz, SweepPoint>> out(tasks.size());
  ClockState boot(m);
  TransitionManager tm(boot);
  tm.set_policy(policy);
  const auto configs = tm.explore();
  for (const auto& c : configs) {
    if (std::find(frequencies.begin(), frequencies.end(), c.frequency) == frequencies.end()) continue;
    if (only && c.source_kind != *only) continue;
    const auto power = c.power(*m, policy);
    const ClockState base = state_at(m, c, power);
    for (std::size_t i = 0; i < tasks.size(); ++i) {
      auto t = tasks[i];
      t.period_ns = 0;
      t.offset_ns = 0;
      t.max_activations = 1;
      Simulator sim(base, {t}, SimOptions{.policy = policy, .record_trace = false});
      sim.run();
      const auto& tot = sim.totals()[0];
      auto& slot = out[i][c.frequency];
      const bool better = slot.config.topology.empty() || tot.charge_c < slot.charge_c ||
                          (tot.charge_c == slot.charge_c && c.id < slot.config.id);
      if (better) slot = {c, power, tot.charge_c, tot.busy_ns};
    }
  }
  return out;
}

}  // namespace clktree
