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

// JSON renderings of exploration results, transition plans, PU records and
// simulation reports. Key order is fixed so output is byte-stable.

#include <json.hpp>

#include <string>
#include <vector>

#include "clktree/dvfs.hpp"
#include "clktree/scenarios.hpp"
#include "clktree/transitions.hpp"

namespace clktree {

using ordered_json = nlohmann::ordered_json;

inline ordered_json config_json(const PlatformModel& m, const CoreConfig& c, Policy policy) {
  ordered_json path = ordered_json::array();
  for (const auto& e : c.topology) {
    ordered_json n{{"clock", m.clock(e.clock).name}};
    if (e.parent) n["parent"] = m.clock(*e.parent).name;
    if (e.scale) n["scale"] = *e.scale;
    path.push_back(n);
  }
  const auto p = c.power(m, policy);
  return {{"id", c.id},
          {"frequency_hz", c.frequency},
          {"source_kind", source_kind_name(c.source_kind)},
          {"source", m.clock(c.source).name},
          {"scaling_point", m.clock(c.scaling_point).name},
          {"label", config_label(m, c)},
          {"min_voltage_range", m.voltage_ranges[c.min_range].id},
          {"min_wait_states", c.min_ws},
          {"policy", policy_name(policy)},
          {"voltage_range", m.voltage_ranges[p.range].id},
          {"wait_states", p.ws},
          {"path", path}};
}

inline ordered_json configs_json(const PlatformModel& m, const std::vector<CoreConfig>& cs, Policy policy) {
  ordered_json a = ordered_json::array();
  for (const auto& c : cs) a.push_back(config_json(m, c, policy));
  return a;
}

inline ordered_json plan_json(const PlatformModel& m, const TransitionPlan& plan) {
  ordered_json phases = ordered_json::array();
  for (const auto& p : plan.phases) phases.push_back(describe(m, p));
  return {{"target", plan.target.id},
          {"frequency_hz", plan.target.frequency},
          {"voltage_range", m.voltage_ranges[plan.target_power.range].id},
          {"wait_states", plan.target_power.ws},
          {"phases", phases}};
}

inline ordered_json records_json(const std::vector<PURecord>& rs) {
  ordered_json a = ordered_json::array();
  for (const auto& r : rs) {
    ordered_json pw = ordered_json::array();
    for (const auto& p : r.pairwise) pw.push_back({{"f1_hz", p.f1}, {"f2_hz", p.f2}, {"pu", p.pu}});
    a.push_back({{"task", r.task},
                 {"status", r.status == RecordStatus::Ok ? "ok" : "no_data"},
                 {"f_low_hz", r.f_low},
                 {"f_high_hz", r.f_high},
                 {"pu", r.pu},
                 {"pairwise", pw},
                 {"assessed_at_ns", r.assessed_at}});
  }
  return a;
}

namespace detail {

inline double pct_change(double now, double base) { return base == 0.0 ? 0.0 : 100.0 * (now - base) / base; }

inline ordered_json window_json(const Simulator& sim, const WindowTotals& w) {
  const double vs = sim.supply_voltage();
  ordered_json per = ordered_json::array();
  for (std::size_t i = 0; i < sim.tasks().size(); ++i) {
    const auto& t = w.tasks[i];
    per.push_back({{"id", sim.tasks()[i].id},
                   {"name", sim.tasks()[i].name},
                   {"energy_j", t.charge_c * vs},
                   {"charge_c", t.charge_c},
                   {"busy_ns", t.busy_ns},
                   {"idle_ns", t.idle_ns},
                   {"activations", t.activations},
                   {"avg_power_w", t.busy_ns ? t.charge_c * vs / (static_cast<double>(t.busy_ns) * 1e-9) : 0.0},
                   {"selected_hz", sim.selected_hz(i)}});
  }
  const auto& idle = w.tasks[sim.idle_bucket()];
  const auto& kern = w.tasks[sim.kernel_bucket()];
  return {{"start_ns", w.start_ns},
          {"end_ns", w.end_ns},
          {"per_task", per},
          {"totals",
           {{"energy_j", w.charge_c * vs},
            {"charge_c", w.charge_c},
            {"duration_ns", w.end_ns - w.start_ns},
            {"idle_energy_j", idle.charge_c * vs},
            {"idle_ns", idle.idle_ns},
            {"kernel_energy_j", kern.charge_c * vs},
            {"kernel_ns", kern.busy_ns}}}};
}

}  // namespace detail

/// Report document: whole-run per-task figures and totals, plus the steady
/// window and its deltas against the DVFS-off baseline when DVFS is on.
inline ordered_json report_json(const std::string& platform, const ScenarioParams& params, const ScenarioRun& run) {
  const auto& sim = *run.sim;
  const auto whole = detail::window_json(sim, sim.window(sim.start_ns(), sim.end_ns()));
  ordered_json options{{"dvfs", run.options.dvfs ? "on" : "off"},
                       {"policy", policy_name(run.options.policy)},
                       {"seed", run.options.seed},
                       {"jitter", run.options.jitter},
                       {"duration_ns", run.options.duration_ns ? run.options.duration_ns : run.scenario.duration_ns},
                       {"payload", params.payload},
                       {"tasks", params.tasks},
                       {"packets", params.packets},
                       {"op", params.op},
                       {"mem", params.mem}};
  ordered_json totals = whole["totals"];
  totals["completion_ns"] = sim.completion_ns() - sim.start_ns();
  totals["transitions"] = sim.transitions_run();
  ordered_json doc{{"scenario", run.scenario.name},
                   {"platform", platform},
                   {"options", options},
                   {"per_task", whole["per_task"]},
                   {"totals", totals}};
  ordered_json deltas = nullptr;
  if (run.baseline) {
    const auto a = sim.window(run.steady_start, run.steady_end);
    const auto b = run.baseline->window(run.steady_start, run.steady_end);
    const auto sa = detail::window_json(sim, a);
    const auto sb = detail::window_json(*run.baseline, b);
    ordered_json per = ordered_json::array();
    for (std::size_t i = 0; i < sim.tasks().size(); ++i)
      per.push_back({{"id", sim.tasks()[i].id},
                     {"energy_pct", detail::pct_change(sa["per_task"][i]["energy_j"], sb["per_task"][i]["energy_j"])},
                     {"avg_power_pct",
                      detail::pct_change(sa["per_task"][i]["avg_power_w"], sb["per_task"][i]["avg_power_w"])}});
    deltas = {{"window_start_ns", run.steady_start},
              {"window_end_ns", run.steady_end},
              {"energy_pct", detail::pct_change(sa["totals"]["energy_j"], sb["totals"]["energy_j"])},
              {"per_task", per},
              {"steady", sa},
              {"baseline_steady", sb}};
    ordered_json rec = records_json(sim.dvfs()->records());
    doc["assessment"] = {{"end_ns", sim.assessment_end().value_or(sim.end_ns())}, {"records", rec}};
  }
  doc["baseline_deltas"] = deltas;
  return doc;
}

}  // namespace clktree
