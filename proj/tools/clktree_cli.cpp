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


// Command-line front end: tree inspection, register-level get/set,
// exploration, transitions, PU assessment, simulation and benchmarks.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "clktree.hpp"

namespace {

using namespace clktree;

Policy parse_policy(const std::string& s) { return s == "ff" ? Policy::FastFlash : Policy::LowVoltage; }

std::shared_ptr<const PlatformModel> load_platform(const std::string& name, const std::string& file) {
  if (file.empty()) return get_platform(name);
  std::ifstream in(file);
  if (!in) fail(Errc::InvalidArgument, "cannot open '" + file + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::InvalidModel, std::string("cannot parse platform file: ") + e.what());
  }
  return std::make_shared<const PlatformModel>(platform_from_json(j));
}

std::string hz_text(Hz f) {
  char buf[32];
  if (f >= 1'000'000 && f % 1000 == 0) std::snprintf(buf, sizeof buf, "%.3f MHz", static_cast<double>(f) / 1e6);
  else std::snprintf(buf, sizeof buf, "%llu Hz", static_cast<unsigned long long>(f));
  return buf;
}

std::string frequency_text(const ClockState& st, ClockId id) {
  try {
    return hz_text(st.clock_frequency(id));
  } catch (const Error& e) {
    return e.code() == Errc::ClockDisabled ? "off" : std::string(e.name());
  }
}

std::string node_text(const ClockState& st, ClockId id) {
  const auto& m = st.model();
  const auto& d = m.clock(id);
  const auto& e = st.topology()[id.value];
  std::string s = d.name + " [" + std::string(kind_name(d.kind));
  if (e.scale && d.kind == ClockKind::Scaler)
    s += d.op == ScaleOp::Multiply ? " x" + std::to_string(*e.scale) : " /" + std::to_string(*e.scale);
  s += "] " + frequency_text(st, id);
  if (!e.enabled) s += " disabled";
  if (d.kind == ClockKind::Mux && d.parent_options.size() > 1) {
    s += " (options:";
    for (ClockId p : d.parent_options) s += " " + m.clock(p).name;
    s += ")";
  }
  return s;
}

void render_tree(std::ostream& os, const ClockState& st) {
  const auto& m = st.model();
  os << m.name << ": core " << hz_text(st.core_frequency()) << ", range " << m.voltage_ranges[st.voltage_range()].id
     << ", " << st.wait_states() << " wait states\n";
  std::map<std::uint16_t, std::vector<ClockId>> kids;
  for (const auto& d : m.clocks) {
    if (d.kind == ClockKind::Source) continue;
    const auto& p = st.topology()[d.id.value].parent;
    if (p) kids[p->value].push_back(d.id);
  }
  auto walk = [&](auto&& self, ClockId id, int depth) -> void {
    os << std::string(2 * depth, ' ') << node_text(st, id) << '\n';
    for (ClockId c : kids[id.value]) self(self, c, depth + 1);
  };
  for (const auto& d : m.clocks)
    if (d.kind == ClockKind::Source) walk(walk, d.id, 0);
}

nlohmann::ordered_json clock_json(const ClockState& st, ClockId id) {
  const auto& m = st.model();
  const auto& d = m.clock(id);
  const auto& e = st.topology()[id.value];
  nlohmann::ordered_json j{{"clock", d.name}, {"kind", kind_name(d.kind)}};
  try {
    j["frequency_hz"] = st.clock_frequency(id);
  } catch (const Error&) {
    j["frequency_hz"] = nullptr;
  }
  j["parent"] = e.parent ? nlohmann::ordered_json(m.clock(*e.parent).name) : nlohmann::ordered_json(nullptr);
  j["scale"] = e.scale ? nlohmann::ordered_json(*e.scale) : nlohmann::ordered_json(nullptr);
  j["enabled"] = e.enabled;
  j["ready"] = st.clock_ready(id);
  return j;
}

void print_clock(std::ostream& os, const ClockState& st, ClockId id, bool json) {
  if (json) {
    os << clock_json(st, id).dump(2) << '\n';
    return;
  }
  const auto j = clock_json(st, id);
  os << "clock     " << j["clock"].get<std::string>() << '\n'
     << "frequency " << frequency_text(st, id) << '\n'
     << "parent    " << (j["parent"].is_null() ? "-" : j["parent"].get<std::string>()) << '\n'
     << "scale     " << (j["scale"].is_null() ? "-" : std::to_string(j["scale"].get<std::int64_t>())) << '\n'
     << "enabled   " << (j["enabled"].get<bool>() ? "yes" : "no") << '\n'
     << "ready     " << (j["ready"].get<bool>() ? "yes" : "no") << '\n';
}

void print_configs(std::ostream& os, const PlatformModel& m, const std::vector<CoreConfig>& cs, Policy p) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%5s %14s %-10s %-18s %-6s %-6s %-6s %-3s\n", "id", "frequency_hz", "source", "label",
                "min_v", "min_ws", "range", "ws");
  os << buf;
  for (const auto& c : cs) {
    const auto pw = c.power(m, p);
    std::snprintf(buf, sizeof buf, "%5zu %14llu %-10s %-18s %-6s %-6u %-6s %-3u\n", c.id,
                  static_cast<unsigned long long>(c.frequency), std::string(source_kind_name(c.source_kind)).c_str(),
                  config_label(m, c).c_str(), m.voltage_ranges[c.min_range].id.c_str(), c.min_ws,
                  m.voltage_ranges[pw.range].id.c_str(), pw.ws);
    os << buf;
  }
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(Errc::InvalidArgument, "cannot write '" + path + "'");
  out << content;
}

struct ScenarioFlags {
  std::string scenario;
  ScenarioParams params;
  std::string policy = "lv";
  std::uint64_t seed = 0;
  double jitter = 0.0;
  double duration_ms = 0.0;

  void add(CLI::App* c, bool scenario_required = true) {
    auto* o = c->add_option("--scenario", scenario, "producer_consumer | synthetic_suite | radio_send | radio_recv | micro");
    if (scenario_required) o->required();
    c->add_option("--payload", params.payload, "radio payload in bytes")->capture_default_str();
    c->add_option("--tasks", params.tasks, "synthetic suite size")->capture_default_str();
    c->add_option("--packets", params.packets, "radio packets to send or receive")->capture_default_str();
    c->add_option("--op", params.op, "micro operation: add | mul | div")->capture_default_str();
    c->add_option("--mem", params.mem, "micro memory class: reg | ram | flash")->capture_default_str();
    c->add_option("--policy", policy, "lv | ff")->check(CLI::IsMember({"lv", "ff"}))->capture_default_str();
    c->add_option("--seed", seed, "random seed")->capture_default_str();
    c->add_option("--jitter", jitter, "relative compute-cycle jitter")->check(CLI::Range(0.0, 1.0));
    c->add_option("--duration-ms", duration_ms, "override the scenario duration")->check(CLI::NonNegativeNumber);
  }

  SimOptions options(bool dvfs) const {
    SimOptions o;
    o.dvfs = dvfs;
    o.policy = parse_policy(policy);
    o.seed = seed;
    o.jitter = jitter;
    o.duration_ns = static_cast<Nanos>(duration_ms * 1e6);
    return o;
  }
};

int run(int argc, char** argv) {
  CLI::App app{"clktree: clock tree configuration, DVFS and energy simulation"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  std::string platform, platform_file;
  bool json = false;
  auto add_platform = [&](CLI::App* c) {
    c->add_option("--platform", platform, "vpa | vpb")->required();
    c->add_flag("--json", json, "machine-readable output");
  };

  auto* tree = app.add_subcommand("tree", "render the clock tree with its boot topology");
  tree->add_option("--platform", platform, "vpa | vpb");
  tree->add_option("--platform-file", platform_file, "platform JSON document");
  tree->add_flag("--json", json, "print the platform JSON document");

  std::string clock, value;
  bool force = false;
  auto* get = app.add_subcommand("get", "read one clock's state");
  add_platform(get);
  get->add_option("--clock", clock, "clock name")->required();

  auto* set = app.add_subcommand("set", "apply one checked configuration step and print the result");
  add_platform(set);
  set->add_option("--clock", clock, "clock name")->required();
  set->add_option("--value", value, "scale value, parent name, or on|off for gates")->required();
  set->add_flag("--force", force, "allow disabling a gate that still has running consumers");

  std::string policy = "lv";
  std::vector<std::string> unavailable;
  auto* explore = app.add_subcommand("explore", "enumerate core clock configurations");
  add_platform(explore);
  explore->add_option("--policy", policy, "lv | ff")->check(CLI::IsMember({"lv", "ff"}))->capture_default_str();
  explore->add_option("--unavailable", unavailable, "sources to exclude")->delimiter(',');

  std::size_t to = 0;
  std::optional<std::size_t> from;
  std::string reg_trace;
  auto* transition = app.add_subcommand("transition", "execute a transition from the boot configuration");
  add_platform(transition);
  transition->add_option("--to", to, "target configuration id")->required();
  transition->add_option("--from", from, "configuration to move to first");
  transition->add_option("--policy", policy, "lv | ff")->check(CLI::IsMember({"lv", "ff"}))->capture_default_str();
  transition->add_option("--register-trace", reg_trace, "write register accesses as CSV");

  ScenarioFlags sf;
  auto* assess = app.add_subcommand("assess", "run PU assessment on a scenario");
  add_platform(assess);
  sf.add(assess);

  std::string dvfs = "off", out, trace;
  auto* simulate_cmd = app.add_subcommand("simulate", "simulate a scenario and write a report");
  simulate_cmd->add_option("--platform", platform, "vpa | vpb")->required();
  sf.add(simulate_cmd);
  simulate_cmd->add_option("--dvfs", dvfs, "on | off")->check(CLI::IsMember({"on", "off"}))->capture_default_str();
  simulate_cmd->add_option("--out", out, "report JSON path (default: stdout)");
  simulate_cmd->add_option("--trace", trace, "current trace CSV path");

  std::size_t count = 200;
  std::uint64_t seed = 0;
  auto* bench = app.add_subcommand("bench", "random transitions; simulated latency statistics");
  add_platform(bench);
  bench->add_option("--count", count, "number of transitions")->capture_default_str();
  bench->add_option("--seed", seed, "random seed")->capture_default_str();
  bench->add_option("--policy", policy, "lv | ff")->check(CLI::IsMember({"lv", "ff"}))->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  auto& os = std::cout;
  if (tree->parsed()) {
    if (platform.empty() == platform_file.empty()) {
      std::cerr << "tree: give exactly one of --platform or --platform-file\n";
      return 2;
    }
    auto m = load_platform(platform, platform_file);
    if (json) {
      os << platform_to_json(*m).dump(2) << '\n';
      return 0;
    }
    ClockState st(m);
    render_tree(os, st);
    return 0;
  }

  auto m = load_platform(platform, "");
  if (get->parsed()) {
    ClockState st(m);
    print_clock(os, st, m->id_of(clock), json);
  } else if (set->parsed()) {
    ClockState st(m);
    const ClockId id = m->id_of(clock);
    const auto& d = m->clock(id);
    if (d.kind == ClockKind::Mux) {
      st.set_parent(id, m->id_of(value));
    } else if (d.caps.scalable) {
      std::int64_t v = 0;
      try {
        std::size_t pos = 0;
        v = std::stoll(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
      } catch (const std::exception&) {
        fail(Errc::InvalidArgument, "'" + value + "' is not an integer");
      }
      st.set_scaler(id, v);
    } else if (d.caps.gateable) {
      if (value != "on" && value != "off") fail(Errc::InvalidArgument, "gate value must be on or off");
      st.set_gate(id, value == "on", force);
    } else {
      fail(Errc::NotCapable, "clock '" + d.name + "' has no settable property");
    }
    print_clock(os, st, id, json);
    if (!json) os << "core      " << hz_text(st.core_frequency()) << '\n';
  } else if (explore->parsed()) {
    ClockState st(m);
    TransitionManager tm(st);
    tm.set_policy(parse_policy(policy));
    for (const auto& u : unavailable) tm.set_source_available(m->id_of(u), false);
    const auto& cs = tm.explore();
    if (json) os << configs_json(*m, cs, tm.policy()).dump(2) << '\n';
    else print_configs(os, *m, cs, tm.policy());
  } else if (transition->parsed()) {
    ClockState st(m);
    TransitionManager tm(st);
    tm.set_policy(parse_policy(policy));
    if (from) tm.transition_to(*from);
    st.registers().enable_trace(!reg_trace.empty());
    const auto plan = tm.plan(to);
    const auto rep = tm.execute(plan);
    if (json) {
      auto j = plan_json(*m, plan);
      j["elapsed_ns"] = rep.elapsed_ns;
      j["phases_run"] = rep.phases_run;
      j["register_writes"] = rep.register_writes;
      j["core_hz"] = st.core_frequency();
      os << j.dump(2) << '\n';
    } else {
      for (const auto& p : plan.phases) os << describe(*m, p) << '\n';
      os << "core " << hz_text(st.core_frequency()) << ", elapsed " << rep.elapsed_ns << " ns, " << rep.register_writes
         << " register writes\n";
    }
    if (!reg_trace.empty()) {
      std::ostringstream s;
      st.registers().write_trace_csv(s);
      write_file(reg_trace, s.str());
    }
  } else if (assess->parsed()) {
    auto r = run_scenario(platform, sf.scenario, sf.params, sf.options(true));
    const auto& recs = r.sim->dvfs()->records();
    if (json) {
      os << records_json(recs).dump(2) << '\n';
    } else {
      char buf[128];
      std::snprintf(buf, sizeof buf, "%6s %-10s %-8s %12s %12s %10s\n", "task", "name", "status", "f_low_hz", "f_high_hz", "pu");
      os << buf;
      for (const auto& rec : recs) {
        std::string name;
        for (const auto& t : r.sim->tasks())
          if (t.id == rec.task) name = t.name;
        std::snprintf(buf, sizeof buf, "%6u %-10s %-8s %12llu %12llu %10.6f\n", rec.task, name.c_str(),
                      rec.status == RecordStatus::Ok ? "ok" : "no_data", static_cast<unsigned long long>(rec.f_low),
                      static_cast<unsigned long long>(rec.f_high), rec.pu);
        os << buf;
      }
    }
  } else if (simulate_cmd->parsed()) {
    auto r = run_scenario(platform, sf.scenario, sf.params, sf.options(dvfs == "on"));
    const auto doc = report_json(platform, sf.params, r).dump(2) + "\n";
    if (out.empty()) os << doc;
    else write_file(out, doc);
    if (!trace.empty()) {
      std::ostringstream s;
      r.sim->write_trace_csv(s);
      write_file(trace, s.str());
    }
  } else if (bench->parsed()) {
    ClockState st(m);
    TransitionManager tm(st);
    tm.set_policy(parse_policy(policy));
    const std::size_t n = tm.explore().size();
    std::mt19937_64 rng(seed);
    Nanos lo = 0, hi = 0;
    double sum_ns = 0, sum_phases = 0, sum_writes = 0;
    for (std::size_t i = 0; i < count; ++i) {
      const auto rep = tm.transition_to(static_cast<std::size_t>(rng() % n));
      lo = i == 0 ? rep.elapsed_ns : std::min(lo, rep.elapsed_ns);
      hi = std::max(hi, rep.elapsed_ns);
      sum_ns += static_cast<double>(rep.elapsed_ns);
      sum_phases += static_cast<double>(rep.phases_run);
      sum_writes += static_cast<double>(rep.register_writes);
    }
    const double c = count ? static_cast<double>(count) : 1.0;
    nlohmann::ordered_json j{{"platform", m->name},  {"configs", n},
                             {"transitions", count}, {"seed", seed},
                             {"min_ns", lo},         {"max_ns", hi},
                             {"mean_ns", sum_ns / c}, {"mean_phases", sum_phases / c},
                             {"mean_register_writes", sum_writes / c}};
    if (json) os << j.dump(2) << '\n';
    else
      for (const auto& [k, v] : j.items()) os << k << ' ' << v.dump() << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const clktree::Error& e) {
    std::cerr << "ERROR " << e.name() << ": " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "ERROR Internal: " << e.what() << '\n';
    return 1;
  }
}
