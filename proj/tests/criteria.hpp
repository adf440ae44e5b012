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

// One check per acceptance criterion. Each returns a verdict plus a short
// measurement summary; sizes are parameters so unit tests can run reduced
// versions of the same checks.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "clktree.hpp"
#include "oracles.hpp"

namespace criteria {

using namespace clktree;

struct Verdict {
  bool pass = false;
  std::string detail;
};

inline std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

inline bool rel_close(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max({std::abs(a), std::abs(b), 1e-300});
}

/// Random well-formed mapping: a range with any modifier or a lookup table.
inline ValueMapping random_mapping(std::mt19937_64& rng) {
  auto pick = [&](std::int64_t lo, std::int64_t hi) {
    return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
  };
  switch (pick(0, 3)) {
    case 0: {
      const auto lo = pick(0, 200);
      return RangeMapping{lo, lo + pick(0, 300), Modifier::ZeroBased, 0};
    }
    case 1: {
      const auto off = pick(-32, 31);
      const auto lo = std::max<std::int64_t>(off, 0) + pick(0, 50);
      return RangeMapping{lo, lo + pick(0, 200), Modifier::Offset, off};
    }
    case 2: {
      const auto a = pick(0, 20);
      return RangeMapping{std::int64_t{1} << a, std::int64_t{1} << (a + pick(0, 10)), Modifier::Log2, 0};
    }
    default: {
      LutMapping l;
      std::int64_t v = pick(-5, 100);
      std::vector<std::uint32_t> regs(static_cast<std::size_t>(pick(1, 16)));
      for (std::size_t i = 0; i < regs.size(); ++i) regs[i] = static_cast<std::uint32_t>(i);
      std::shuffle(regs.begin(), regs.end(), rng);
      const auto stride = static_cast<std::uint32_t>(pick(1, 5));
      for (auto r : regs) {
        l.entries.push_back({v, r * stride});
        v += pick(1, 1000);
      }
      return l;
    }
  }
}

inline std::size_t roundtrip_failures(const ValueMapping& m) {
  std::size_t bad = 0;
  for (auto v : mapping_domain(m)) {
    try {
      const auto r = encode_logical(m, v);
      if (decode_register(m, r) != v || encode_logical(m, decode_register(m, r)) != r) ++bad;
    } catch (const Error&) {
      ++bad;
    }
  }
  return bad;
}

inline Verdict encoding_roundtrip(std::size_t random_mappings = 1000, std::uint64_t seed = 1) {
  std::size_t checked = 0, bad = 0;
  for (const auto& name : platform_names()) {
    for (const auto& c : get_platform(name)->clocks) {
      if (!std::holds_alternative<RangeMapping>(c.mapping) && !std::holds_alternative<LutMapping>(c.mapping)) continue;
      bad += roundtrip_failures(c.mapping);
      ++checked;
    }
  }
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < random_mappings; ++i) {
    const auto m = random_mapping(rng);
    if (!mapping_violations(m).empty()) {
      ++bad;
      continue;
    }
    bad += roundtrip_failures(m);
    ++checked;
  }
  return {bad == 0 && checked >= random_mappings, std::to_string(checked) + " mappings, " + std::to_string(bad) + " failures"};
}

inline Verdict descriptor_budget() {
  static_assert(sizeof(decltype(pack_field(RegisterFieldDescriptor{}))) * 8 == 32);
  static_assert(sizeof(decltype(pack_range(RangeMapping{}))) * 8 == 32);
  static_assert(sizeof(decltype(pack_scaler(RegisterFieldDescriptor{}, RangeMapping{}))) * 8 <= 64);
  std::size_t fields = 0, scalers = 0, bad = 0;
  for (const auto& name : platform_names()) {
    const auto m = get_platform(name);
    std::vector<RegisterFieldDescriptor> all;
    for (const auto& c : m->clocks) {
      all.push_back(c.field);
      if (const auto* r = std::get_if<RangeMapping>(&c.mapping); r && c.kind == ClockKind::Scaler) {
        const auto words = pack_scaler(c.field, *r);
        if (unpack_field(words[0]) != c.field || unpack_range(words[1]) != *r) ++bad;
        ++scalers;
      }
    }
    if (m->power.voltage_field) all.push_back(*m->power.voltage_field);
    all.push_back(m->power.wait_state_field);
    for (const auto& f : all) {
      const std::uint32_t w = pack_field(f);
      if ((w >> kPackedFieldBits) != 0 || unpack_field(w) != f) ++bad;
      ++fields;
    }
  }
  return {bad == 0, std::to_string(fields) + " fields in 32 bits, " + std::to_string(scalers) +
                        " range scalers in 64 bits, " + std::to_string(bad) + " failures"};
}

/// Random single-clock edits and whole-configuration transitions; every
/// accepted state is compared against the raw-register tree walk.
inline Verdict frequency_oracle(std::size_t per_platform = 1000, std::uint64_t seed = 2) {
  std::size_t checked = 0, bad = 0;
  for (const auto& name : platform_names()) {
    const auto m = get_platform(name);
    const auto doc = oracle::platform_document(name);
    ClockState st(m);
    TransitionManager tm(st);
    std::mt19937_64 rng(seed);
    const std::size_t n = tm.explore().size();
    std::size_t done = 0, attempts = 0;
    while (done < per_platform && attempts < per_platform * 50) {
      ++attempts;
      try {
        if (rng() % 3 == 0) {
          tm.set_policy(rng() % 2 ? Policy::FastFlash : Policy::LowVoltage);
          tm.transition_to(rng() % n);
        } else {
          const auto& c = m->clocks[rng() % m->clocks.size()];
          if (c.kind == ClockKind::Mux) {
            st.set_parent(c.id, c.parent_options[rng() % c.parent_options.size()]);
          } else if (c.caps.scalable) {
            const auto dom = mapping_domain(c.mapping);
            st.set_scaler(c.id, dom[rng() % dom.size()]);
          } else {
            continue;
          }
          st.registers().settle();
        }
      } catch (const Error&) {
        continue;
      }
      const auto want = oracle::frequency(doc, st.registers().words(), m->clock(m->core).name);
      if (!want || *want != st.core_frequency()) ++bad;
      ++done;
    }
    checked += done;
  }
  return {bad == 0 && checked == 2 * per_platform,
          std::to_string(checked) + " configurations, " + std::to_string(bad) + " mismatches"};
}

inline Verdict exploration_completeness() {
  std::size_t bad = 0;
  std::string sizes;
  for (const auto& name : platform_names()) {
    const auto m = get_platform(name);
    std::set<oracle::ConfigKey> got;
    for (const auto& c : explore_core_configs(*m)) {
      got.insert({c.frequency, std::string(source_kind_name(c.source_kind)), m->clock(c.scaling_point).name});
    }
    const auto want = oracle::enumerate_core_configs(oracle::platform_document(name));
    if (got != want || got.size() != explore_core_configs(*m).size()) ++bad;
    sizes += name + " " + std::to_string(got.size()) + "/" + std::to_string(want.size()) + " ";
    if (name == "vpa") {
      for (Hz f : {8'000'000ull, 16'000'000ull, 24'000'000ull, 40'000'000ull, 48'000'000ull, 80'000'000ull})
        if (std::none_of(got.begin(), got.end(), [&](const auto& k) { return std::get<0>(k) == f; })) ++bad;
    }
  }
  return {bad == 0, sizes + "(explored/brute force)"};
}

struct FuzzCounts {
  std::size_t transitions = 0;
  std::size_t boundaries = 0;
  std::size_t violations = 0;
  std::size_t unclocked = 0;
  std::size_t vetoes = 0;
  std::size_t timeouts = 0;
  std::size_t masked = 0;  // the lost ready event was re-triggered by a later write
  std::size_t bad_restores = 0;
};

/// Every phase boundary must satisfy the platform constraints with a
/// clocked, ready core. Every 20th transition is vetoed and every 20th
/// (offset by 10) runs with a ready flag that never rises.
inline FuzzCounts transition_fuzz(const std::string& name, std::size_t count, std::uint64_t seed) {
  FuzzCounts k;
  const auto m = get_platform(name);
  ClockState st(m);
  TransitionManager tm(st);
  const std::size_t n = tm.explore().size();
  tm.set_phase_observer([&](const ClockState& s, const Phase&) {
    ++k.boundaries;
    Hz f = 0;
    try {
      f = s.core_frequency();
    } catch (const Error&) {
      ++k.unclocked;
      return;
    }
    if (!s.clock_ready(m->core)) ++k.unclocked;
    if (!s.check_constraints(f, s.voltage_range(), s.wait_states()).empty()) ++k.violations;
  });
  bool veto = false;
  tm.register_hook({m->core, [&](const CoreConfig&) { return !veto; }, nullptr});
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < count; ++i) {
    tm.set_policy(rng() % 2 ? Policy::FastFlash : Policy::LowVoltage);
    const std::size_t target = rng() % n;
    const auto plan = tm.plan(target);
    veto = i % 20 == 0 && !plan.empty();
    const bool fault = i % 20 == 10 && std::any_of(plan.phases.begin(), plan.phases.end(), [&](const Phase& p) {
      return p.kind == PhaseKind::EnableClock && m->clock(*p.clock).field.ready_bit;
    });
    if (fault) st.registers().inject_ready_fault();
    const auto snapshot = st.registers().words();
    const Hz before = st.core_frequency();
    ++k.transitions;
    try {
      tm.execute(plan);
      if (veto || (fault && st.registers().fault_armed())) {
        st.registers().disarm_ready_fault();
        if (veto) ++k.bad_restores;
      } else if (fault) {
        ++k.masked;
      }
    } catch (const Error& e) {
      if (e.code() == Errc::Vetoed) ++k.vetoes;
      else if (e.code() == Errc::ReadyTimeout) ++k.timeouts;
      else ++k.violations;
      if (st.registers().words() != snapshot || st.core_frequency() != before) ++k.bad_restores;
    }
    veto = false;
  }
  return k;
}

inline Verdict transition_safety(std::size_t per_platform = 10'000, std::uint64_t seed = 3) {
  bool ok = true;
  std::string detail;
  for (const auto& name : platform_names()) {
    const auto k = transition_fuzz(name, per_platform, seed);
    ok = ok && k.violations == 0 && k.unclocked == 0 && k.bad_restores == 0 && k.vetoes > 0 && k.timeouts > 0;
    detail += name + ": " + std::to_string(k.transitions) + " transitions, " + std::to_string(k.boundaries) +
              " boundaries, " + std::to_string(k.violations + k.unclocked) + " violations, " +
              std::to_string(k.vetoes) + " vetoes, " + std::to_string(k.timeouts) + " timeouts (" +
              std::to_string(k.masked) + " faults masked by a later relock), " +
              std::to_string(k.bad_restores) + " bad restores; ";
  }
  return {ok, detail};
}

/// Every duration is a whole number of ns at every MHz frequency used here
/// when cycle counts are multiples of 24; the context switch follows suit.
inline constexpr std::uint32_t kIntegralContextSwitch = 240;

inline bool integral_ns(std::uint64_t cycles, Hz f) { return (cycles * 1'000'000'000ull) % f == 0; }

inline std::shared_ptr<const PlatformModel> with_energy(const std::string& name, double static_a, double tree_f,
                                                        double bias_a) {
  auto m = std::make_shared<PlatformModel>(*get_platform(name));
  m->energy.static_current = static_a;
  m->energy.tree_capacitance = tree_f;
  m->energy.rc_bias_current = m->energy.crystal_bias_current = m->energy.pll_bias_current = bias_a;
  m->energy.context_switch_cycles = kIntegralContextSwitch;
  return m;
}

/// Span PU records from the synthetic suite, per platform.
struct SuiteRun {
  std::vector<PURecord> records;
  std::vector<Hz> optimal;  // charge-optimal evaluation frequency per task
  std::vector<std::map<Hz, SweepPoint>> sweep;
};

inline SuiteRun synthetic_suite(const std::string& name, std::size_t tasks = 100) {
  SuiteRun out;
  const auto m = get_platform(name);
  ScenarioParams p;
  p.tasks = tasks;
  const auto sc = make_scenario("synthetic_suite", p);
  auto sim = simulate(ClockState(m), sc, SimOptions{.dvfs = true, .record_trace = false});
  out.records = sim->dvfs()->records();
  std::sort(out.records.begin(), out.records.end(), [](const auto& a, const auto& b) { return a.task < b.task; });
  out.sweep = sweep_best(m, sc.tasks, Policy::LowVoltage, m->evaluation_frequencies);
  for (const auto& s : out.sweep) {
    Hz best = 0;
    double q = 0;
    for (const auto& [f, pt] : s)
      if (best == 0 || pt.charge_c < q) best = f, q = pt.charge_c;
    out.optimal.push_back(best);
  }
  return out;
}

inline Verdict pu_correctness(const std::map<std::string, SuiteRun>& suites) {
  std::size_t checked = 0, bad = 0;
  double worst = 0;
  // Closed form over the two-component family at the statistics level.
  const std::vector<double> freqs{8e6, 16e6, 20e6, 24e6, 32e6, 40e6, 48e6, 64e6, 80e6};
  for (std::uint64_t w = 0; w <= 2'400'000; w += 24'000 * 7) {
    for (std::int64_t t = 0; t <= 40'000'000; t += 3'333'331) {
      if (w == 0 && t == 0) continue;
      for (std::size_t a = 0; a < freqs.size(); ++a) {
        for (std::size_t b = a + 1; b < freqs.size(); ++b) {
          TaskStats s;
          for (double f : {freqs[a], freqs[b]}) {
            const auto ns = static_cast<Nanos>(static_cast<double>(w) * 1e9 / f) + t;
            s.record_slice(0, static_cast<Hz>(f), 5 * ns, 0, 5, 5);
          }
          const double got = assess_pu(s, 0, static_cast<Hz>(freqs[a]), static_cast<Hz>(freqs[b]));
          const double want = oracle::two_component_pu(static_cast<double>(w), static_cast<double>(t) * 1e-9, freqs[a], freqs[b]);
          worst = std::max(worst, std::abs(got - want) / want);
          if (!rel_close(got, want, 1e-9)) ++bad;
          if (t == 0 && !rel_close(got, 1.0, 1e-9)) ++bad;
          if (w == 0 && !rel_close(got, freqs[a] / freqs[b], 1e-9)) ++bad;
          ++checked;
        }
      }
    }
  }
  // Same family measured end to end in the simulator, context switch included.
  for (const auto& name : platform_names()) {
    const auto m = with_energy(name, get_platform(name)->energy.static_current, 0, 0);
    ClockState boot(m);
    TransitionManager tm(boot);
    const auto& configs = tm.explore();
    const auto ctx = m->energy.context_switch_cycles;
    for (std::uint64_t w : {24ull * 1000, 24ull * 25'000}) {
      for (Nanos t : {Nanos{0}, Nanos{1'000'000}, Nanos{9'876'543}}) {
        TaskStats s;
        for (Hz f : m->assessment_frequencies) {
          const auto it = std::find_if(configs.begin(), configs.end(), [&](const CoreConfig& c) { return c.frequency == f; });
          TaskSpec task{.id = 0, .name = "w", .max_activations = 3, .steps = {{StepKind::Compute, w}}};
          if (t) task.steps.push_back({StepKind::BusyWait, static_cast<std::uint64_t>(t)});
          Simulator sim(state_at(m, *it, it->power(*m, Policy::LowVoltage)), {task}, SimOptions{.record_trace = false});
          sim.run();
          s.record_slice(0, f, sim.totals()[0].busy_ns, 0, 3, sim.totals()[0].activations);
        }
        const auto& fs = m->assessment_frequencies;
        for (std::size_t a = 0; a + 1 < fs.size(); ++a) {
          const double got = assess_pu(s, 0, fs[a], fs.back());
          const double want = oracle::two_component_pu(static_cast<double>(w + ctx), static_cast<double>(t) * 1e-9,
                                                       static_cast<double>(fs[a]), static_cast<double>(fs.back()));
          worst = std::max(worst, std::abs(got - want) / want);
          if (!rel_close(got, want, 1e-9)) ++bad;
          ++checked;
        }
      }
    }
  }
  // Bounds on the measured suite.
  std::size_t suite = 0, out_of_bounds = 0;
  for (const auto& [name, run] : suites) {
    for (const auto& r : run.records) {
      ++suite;
      const double lo = static_cast<double>(r.f_low) / static_cast<double>(r.f_high);
      if (r.status != RecordStatus::Ok || r.pu < lo * (1 - 1e-9) || r.pu > 1 + 1e-9) ++out_of_bounds;
    }
  }
  return {bad == 0 && out_of_bounds == 0 && suite > 0,
          std::to_string(checked) + " closed-form cases, max rel err " + fmt("%.2e", worst) + ", " +
              std::to_string(suite) + " suite records, " + std::to_string(out_of_bounds) + " out of bounds"};
}

/// Tasks sharing an optimal frequency form one group. The relation is
/// monotone when no pair of tasks is discordant and the group-level rank
/// correlation (mean PU per group against frequency) is 1.
struct Monotonicity {
  double group_rho = 0;
  double task_rho = 0;
  std::size_t discordant = 0;
  std::size_t groups = 0;
};

inline Monotonicity monotonicity_of(const SuiteRun& run) {
  Monotonicity out;
  std::vector<double> pu, f;
  for (std::size_t i = 0; i < run.records.size(); ++i) {
    pu.push_back(run.records[i].pu);
    f.push_back(static_cast<double>(run.optimal[i]));
  }
  for (std::size_t i = 0; i < pu.size(); ++i)
    for (std::size_t j = 0; j < pu.size(); ++j)
      if (pu[i] < pu[j] && f[i] > f[j]) ++out.discordant;
  std::map<double, std::pair<double, std::size_t>> groups;
  for (std::size_t i = 0; i < pu.size(); ++i) {
    groups[f[i]].first += pu[i];
    ++groups[f[i]].second;
  }
  std::vector<double> gf, gpu;
  for (const auto& [freq, acc] : groups) {
    gf.push_back(freq);
    gpu.push_back(acc.first / static_cast<double>(acc.second));
  }
  out.groups = groups.size();
  out.group_rho = groups.size() >= 2 ? oracle::spearman(gpu, gf) : 0.0;
  out.task_rho = oracle::spearman(pu, f);
  return out;
}

inline Verdict monotonicity(const std::map<std::string, SuiteRun>& suites) {
  bool ok = true;
  std::string detail;
  for (const auto& [name, run] : suites) {
    const auto mono = monotonicity_of(run);
    ok = ok && mono.discordant == 0 && mono.groups >= 2 && rel_close(mono.group_rho, 1.0, 1e-12);
    detail += name + ": group rho " + fmt("%.3f", mono.group_rho) + " over " + std::to_string(mono.groups) +
              " frequencies, " + std::to_string(mono.discordant) + " discordant pairs, task rho " +
              fmt("%.3f", mono.task_rho) + "; ";
  }
  return {ok, detail};
}

inline Verdict energy_identities() {
  std::size_t checked = 0, bad = 0;
  double worst = 0;
  for (const auto& name : platform_names()) {
    // Frequency independence: pure compute, no static, tree or bias power,
    // fixed core voltage.
    {
      const auto m = with_energy(name, 0, 0, 0);
      ClockState boot(m);
      TransitionManager tm(boot);
      const auto ctx = m->energy.context_switch_cycles;
      const std::uint64_t w = 24ull * 50'000 - ctx;
      const double v = m->voltage_ranges[0].core_voltage;
      const double closed = m->energy.capacitance_eff * v * v * static_cast<double>(w + ctx);
      for (const auto& c : tm.explore()) {
        if (!integral_ns(w, c.frequency) || !integral_ns(ctx, c.frequency)) continue;
        const PowerSetting pw{0, *m->flash_table.required_wait_states(0, c.frequency)};
        if (c.frequency > m->voltage_ranges[0].max_frequency) continue;
        TaskSpec task{.id = 0, .name = "c", .max_activations = 1, .steps = {{StepKind::Compute, w}}};
        Simulator sim(state_at(m, c, pw), {task}, SimOptions{.record_trace = false});
        sim.run();
        const double e = sim.totals()[0].charge_c * m->energy.supply_voltage;
        worst = std::max(worst, std::abs(e - closed) / closed);
        if (!rel_close(e, closed, 1e-9)) ++bad;
        ++checked;
      }
    }
    // Integrator against closed form for a periodic task with compute,
    // busy wait and sleep, static current on.
    {
      const auto m = with_energy(name, 2e-3, 0, 0);
      ClockState boot(m);
      TransitionManager tm(boot);
      const auto& e = m->energy;
      const std::uint64_t w = 24ull * 1'000;
      const Nanos busy_wait = 700'000, sleep = 1'300'000, period = 6'000'000;
      const std::uint64_t acts = 7;
      for (const auto& c : tm.explore()) {
        // Activations must fit their period; the kernel does not preempt.
        if (c.frequency < 8'000'000) continue;
        if (!integral_ns(w, c.frequency) || !integral_ns(e.context_switch_cycles, c.frequency)) continue;
        const auto pw = c.power(*m, Policy::LowVoltage);
        TaskSpec task{.id = 0, .name = "p", .period_ns = period, .max_activations = acts,
                      .steps = {{StepKind::Compute, w}, {StepKind::BusyWait, static_cast<std::uint64_t>(busy_wait)},
                                {StepKind::Sleep, static_cast<std::uint64_t>(sleep)}}};
        Simulator sim(state_at(m, c, pw), {task}, SimOptions{.duration_ns = static_cast<Nanos>(acts) * period});
        sim.run();
        const double v = m->voltage_ranges[pw.range].core_voltage;
        const double f = static_cast<double>(c.frequency);
        const double busy_s = static_cast<double>(acts) * (static_cast<double>(w + e.context_switch_cycles) / f +
                                                            static_cast<double>(busy_wait) * 1e-9);
        const double total_s = static_cast<double>(acts * period) * 1e-9;
        const double i_active = e.memory_alpha[0] * e.capacitance_eff * v * v * f / e.supply_voltage + e.static_current;
        const double closed = i_active * busy_s + e.static_current * (total_s - busy_s);
        double sum = 0;
        for (const auto& t : sim.totals()) sum += t.charge_c;
        const double win = sim.window(sim.start_ns(), sim.end_ns()).charge_c;
        worst = std::max(worst, std::abs(sum - closed) / closed);
        if (!rel_close(sum, closed, 1e-9) || !rel_close(win, closed, 1e-9)) ++bad;
        ++checked;
      }
    }
  }
  return {bad == 0 && checked > 0, std::to_string(checked) + " cases, max rel err " + fmt("%.2e", worst)};
}

inline double avg_power(const WindowTotals& w, std::size_t bucket, double vs) {
  const auto& t = w.tasks[bucket];
  const Nanos span = w.end_ns - w.start_ns;
  return span > 0 ? t.charge_c * vs / (static_cast<double>(span) * 1e-9) : 0.0;
}

inline Verdict producer_consumer() {
  auto run = run_scenario("vpa", "producer_consumer", {}, SimOptions{.dvfs = true});
  const auto on = run.sim->window(run.steady_start, run.steady_end);
  const auto off = run.baseline->window(run.steady_start, run.steady_end);
  const double vs = run.sim->supply_voltage();
  // The producer (task 0) is the low-PU task.
  const double p_red = 1 - avg_power(on, 0, vs) / avg_power(off, 0, vs);
  const double e_red = 1 - on.charge_c / off.charge_c;
  const auto* rec = run.sim->dvfs()->record(0);
  const bool low_pu = rec && rec->pu < run.sim->dvfs()->record(1)->pu;
  return {low_pu && p_red > 0.70 && e_red >= 0.35 && e_red <= 0.45,
          "producer avg power -" + fmt("%.1f%%", 100 * p_red) + ", total energy -" + fmt("%.1f%%", 100 * e_red) +
              " over the steady window"};
}

/// Mean E(lowest)/E(highest) over tasks whose optimum is the lowest frequency.
inline std::pair<double, std::size_t> lowest_subset_ratio(const SuiteRun& run, const PlatformModel& m) {
  const Hz lo = m.evaluation_frequencies.front(), hi = m.evaluation_frequencies.back();
  double sum = 0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < run.optimal.size(); ++i) {
    if (run.optimal[i] != lo) continue;
    sum += run.sweep[i].at(lo).charge_c / run.sweep[i].at(hi).charge_c;
    ++n;
  }
  return {n ? sum / static_cast<double>(n) : 0.0, n};
}

inline Verdict lowest_frequency_savings(const std::map<std::string, SuiteRun>& suites) {
  const auto [ratio, n] = lowest_subset_ratio(suites.at("vpb"), *get_platform("vpb"));
  const auto [ratio_a, n_a] = lowest_subset_ratio(suites.at("vpa"), *get_platform("vpa"));
  return {n > 0 && ratio >= 0.35 && ratio <= 0.40,
          "vpb: " + std::to_string(n) + " tasks at the lowest frequency use " + fmt("%.1f%%", 100 * ratio) +
              " of their highest-frequency energy (vpa: " + std::to_string(n_a) + " tasks, " +
              fmt("%.1f%%", 100 * ratio_a) + ")"};
}

inline Verdict radio_bound() {
  const auto m = get_platform("vpa");
  ClockState boot(m);
  TransitionManager tm(boot);
  const auto& configs = tm.explore();
  auto pick = [&](Hz f, SourceKind k) -> const CoreConfig& {
    auto it = std::find_if(configs.begin(), configs.end(),
                           [&](const CoreConfig& c) { return c.frequency == f && c.source_kind == k; });
    if (it == configs.end()) fail(Errc::Unreachable, "missing configuration");
    return *it;
  };
  ScenarioParams p;
  p.payload = 64;
  const auto sc = make_scenario("radio_send", p);
  auto run = [&](const CoreConfig& c) {
    auto s = simulate(state_at(m, c, c.power(*m, Policy::LowVoltage)), sc, SimOptions{.record_trace = false});
    return std::pair{s->totals()[0].charge_c, s->completion_ns() - s->start_ns()};
  };
  const auto [e_full, t_full] = run(pick(80'000'000, SourceKind::PllFromRc));
  const auto [e_half, t_half] = run(pick(40'000'000, SourceKind::PllFromRc));
  const double e_red = 1 - e_half / e_full;
  const double t_inc = static_cast<double>(t_half) / static_cast<double>(t_full) - 1;
  double min_gain = 1;
  for (Hz f : {8'000'000ull, 16'000'000ull, 24'000'000ull, 48'000'000ull}) {
    const auto [e_pll, t_pll] = run(pick(f, SourceKind::PllFromRc));
    const auto [e_rc, t_rc] = run(pick(f, SourceKind::Rc));
    min_gain = std::min(min_gain, 1 - e_rc / e_pll);
  }
  return {e_red >= 0.35 && t_inc <= 0.10 && min_gain >= 0.05,
          "80->40 MHz: energy -" + fmt("%.1f%%", 100 * e_red) + ", completion +" + fmt("%.2f%%", 100 * t_inc) +
              "; RC source vs PLL at equal frequency: at least -" + fmt("%.1f%%", 100 * min_gain)};
}

inline std::pair<std::string, std::string> simulate_outputs(const std::string& platform, const std::string& scenario,
                                                            const ScenarioParams& p, const SimOptions& o) {
  auto run = run_scenario(platform, scenario, p, o);
  std::ostringstream trace;
  run.sim->write_trace_csv(trace);
  return {report_json(platform, p, run).dump(2), trace.str()};
}

inline Verdict determinism() {
  struct Case {
    std::string platform, scenario;
    ScenarioParams params;
    SimOptions options;
  };
  ScenarioParams radio;
  radio.payload = 64;
  ScenarioParams micro;
  micro.op = "div";
  micro.mem = "flash";
  ScenarioParams suite;
  suite.tasks = 12;
  const std::vector<Case> cases{
      {"vpa", "radio_send", radio, SimOptions{.dvfs = true, .seed = 7}},
      {"vpa", "producer_consumer", {}, SimOptions{.dvfs = true, .seed = 3, .jitter = 0.1}},
      {"vpb", "micro", micro, SimOptions{.dvfs = true, .policy = Policy::FastFlash, .seed = 11, .jitter = 0.05}},
      {"vpb", "synthetic_suite", suite, SimOptions{.dvfs = true, .seed = 5, .jitter = 0.2}},
      {"vpb", "radio_recv", radio, SimOptions{.seed = 1}},
  };
  std::size_t same = 0;
  for (const auto& c : cases) {
    const auto a = simulate_outputs(c.platform, c.scenario, c.params, c.options);
    const auto b = simulate_outputs(c.platform, c.scenario, c.params, c.options);
    if (a == b) ++same;
  }
  return {same == cases.size(), std::to_string(same) + "/" + std::to_string(cases.size()) + " invocations identical"};
}

}  // namespace criteria
