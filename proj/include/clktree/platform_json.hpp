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

// Versioned JSON form of a PlatformModel. Clocks are referenced by name.

#include <json.hpp>

#include <string>

#include "clktree/error.hpp"
#include "clktree/platform.hpp"

namespace clktree {

inline constexpr int kPlatformSchemaVersion = 1;

namespace detail {

using nlohmann::json;

inline const char* kind_key(ClockKind k) {
  switch (k) {
    case ClockKind::Source: return "source";
    case ClockKind::Gate: return "gate";
    case ClockKind::Mux: return "mux";
    case ClockKind::Scaler: return "scaler";
    case ClockKind::Consumer: return "consumer";
  }
  return "";
}

inline const char* tech_key(ClockTech t) {
  switch (t) {
    case ClockTech::Generic: return "generic";
    case ClockTech::RcOscillator: return "rc";
    case ClockTech::CrystalOscillator: return "crystal";
    case ClockTech::Pll: return "pll";
  }
  return "";
}

inline const char* op_key(ScaleOp o) {
  switch (o) {
    case ScaleOp::None: return "none";
    case ScaleOp::Multiply: return "multiply";
    case ScaleOp::Divide: return "divide";
    case ScaleOp::Frequency: return "frequency";
  }
  return "";
}

inline const char* modifier_key(Modifier m) {
  switch (m) {
    case Modifier::ZeroBased: return "zero_based";
    case Modifier::Offset: return "offset";
    case Modifier::Log2: return "log2";
  }
  return "";
}

template <class E, std::size_t N>
E parse_key(const std::string& s, const char* (&fn)(E), const E (&all)[N], const char* what) {
  for (E e : all)
    if (s == fn(e)) return e;
  fail(Errc::InvalidModel, std::string("unknown ") + what + " '" + s + "'");
}

inline json field_json(const RegisterFieldDescriptor& f) {
  json j{{"register", f.register_index}, {"shift", f.shift}, {"width", f.width}};
  if (f.enable_bit) j["enable_bit"] = *f.enable_bit;
  if (f.ready_bit) j["ready_bit"] = *f.ready_bit;
  return j;
}

inline RegisterFieldDescriptor field_from(const json& j) {
  RegisterFieldDescriptor f;
  f.register_index = j.at("register").get<std::uint8_t>();
  f.shift = j.at("shift").get<std::uint8_t>();
  f.width = j.at("width").get<std::uint8_t>();
  if (j.contains("enable_bit")) f.enable_bit = j["enable_bit"].get<std::uint8_t>();
  if (j.contains("ready_bit")) f.ready_bit = j["ready_bit"].get<std::uint8_t>();
  return f;
}

inline json mapping_json(const ValueMapping& m) {
  if (const auto* r = std::get_if<RangeMapping>(&m))
    return {{"type", "range"}, {"min", r->min}, {"max", r->max}, {"modifier", modifier_key(r->modifier)}, {"offset", r->offset}};
  if (const auto* l = std::get_if<LutMapping>(&m)) {
    json e = json::array();
    for (const auto& x : l->entries) e.push_back({x.logical, x.reg});
    return {{"type", "lut"}, {"entries", e}};
  }
  if (const auto* f = std::get_if<FixedFrequency>(&m)) return {{"type", "fixed"}, {"hz", f->hz}};
  return {{"type", "none"}};
}

inline ValueMapping mapping_from(const json& j) {
  const auto t = j.at("type").get<std::string>();
  if (t == "range") {
    static const Modifier all[] = {Modifier::ZeroBased, Modifier::Offset, Modifier::Log2};
    return RangeMapping{j.at("min").get<std::int64_t>(), j.at("max").get<std::int64_t>(),
                        parse_key(j.at("modifier").get<std::string>(), modifier_key, all, "modifier"),
                        j.at("offset").get<std::int64_t>()};
  }
  if (t == "lut") {
    LutMapping l;
    for (const auto& e : j.at("entries")) l.entries.push_back({e.at(0).get<std::int64_t>(), e.at(1).get<std::uint32_t>()});
    return l;
  }
  if (t == "fixed") return FixedFrequency{j.at("hz").get<Hz>()};
  if (t == "none") return std::monostate{};
  fail(Errc::InvalidModel, "unknown mapping type '" + t + "'");
}

}  // namespace detail

inline nlohmann::json platform_to_json(const PlatformModel& m) {
  using nlohmann::json;
  using namespace detail;
  auto name = [&](ClockId id) { return m.clock(id).name; };

  json regs = json::array();
  for (std::size_t i = 0; i < m.reset_values.size(); ++i)
    regs.push_back({{"name", i < m.register_names.size() ? m.register_names[i] : "R" + std::to_string(i)},
                    {"reset", m.reset_values[i]}});

  json ready = json::array();
  for (const auto& b : m.ready_behaviors) {
    json j{{"watch_register", b.watch_register}, {"watch_mask", b.watch_mask}, {"ready_register", b.ready_register},
           {"ready_bit", b.ready_bit}, {"delay_ns", b.delay_ns}};
    if (b.enable_bit) j["enable_bit"] = *b.enable_bit;
    ready.push_back(j);
  }

  json clocks = json::array();
  for (const auto& c : m.clocks) {
    json parents = json::array();
    for (ClockId p : c.parent_options) parents.push_back(name(p));
    json j{{"id", c.id.value},
           {"name", c.name},
           {"kind", kind_key(c.kind)},
           {"caps",
            {{"gateable", c.caps.gateable}, {"muxable", c.caps.muxable}, {"scalable", c.caps.scalable},
             {"on_the_fly", c.caps.on_the_fly}}},
           {"tech", tech_key(c.tech)},
           {"op", op_key(c.op)},
           {"field", field_json(c.field)},
           {"mapping", mapping_json(c.mapping)},
           {"parents", parents}};
    if (c.source_frequency) j["source_frequency"] = *c.source_frequency;
    clocks.push_back(j);
  }

  json ranges = json::array();
  for (const auto& r : m.voltage_ranges)
    ranges.push_back({{"id", r.id}, {"core_voltage", r.core_voltage}, {"max_hz", r.max_frequency}});
  json limits = json::array();
  for (const auto& l : m.limits) limits.push_back({{"clock", name(l.clock)}, {"min_hz", l.min_hz}, {"max_hz", l.max_hz}});
  json power{{"voltage_codes", m.power.voltage_codes}, {"wait_state_field", field_json(m.power.wait_state_field)}};
  if (m.power.voltage_field) power["voltage_field"] = field_json(*m.power.voltage_field);

  json entries = json::array();
  for (const auto& e : m.default_config.entries) {
    json j{{"clock", name(e.clock)}, {"enabled", e.enabled}};
    if (e.parent) j["parent"] = name(*e.parent);
    if (e.scale) j["scale"] = *e.scale;
    entries.push_back(j);
  }

  const auto& p = m.energy;
  return {
      {"schema_version", kPlatformSchemaVersion},
      {"name", m.name},
      {"registers", regs},
      {"ready_behaviors", ready},
      {"clocks", clocks},
      {"core", name(m.core)},
      {"fallback_source", name(m.fallback_source)},
      {"constraints",
       {{"voltage_ranges", ranges}, {"flash_wait_states", m.flash_table.max_hz}, {"clock_limits", limits}, {"power", power}}},
      {"default_config",
       {{"entries", entries}, {"voltage_range", m.default_config.voltage_range}, {"wait_states", m.default_config.wait_states}}},
      {"energy",
       {{"capacitance_eff", p.capacitance_eff},
        {"static_current", p.static_current},
        {"supply_voltage", p.supply_voltage},
        {"tree_capacitance", p.tree_capacitance},
        {"rc_bias_current", p.rc_bias_current},
        {"crystal_bias_current", p.crystal_bias_current},
        {"pll_bias_current", p.pll_bias_current},
        {"memory_alpha", p.memory_alpha},
        {"wait_state_penalty", p.wait_state_penalty},
        {"context_switch_cycles", p.context_switch_cycles}}},
      {"transition_costs", {{"save_cycles", m.costs.save_cycles}, {"phase_cycles", m.costs.phase_cycles}}},
      {"evaluation_frequencies", m.evaluation_frequencies},
      {"assessment_frequencies", m.assessment_frequencies},
  };
}

/// Parses and validates; structural problems raise InvalidModel.
inline PlatformModel platform_from_json(const nlohmann::json& j) {
  using namespace detail;
  try {
    if (j.at("schema_version").get<int>() != kPlatformSchemaVersion)
      fail(Errc::InvalidModel, "unsupported schema_version");
    PlatformModel m;
    m.name = j.at("name").get<std::string>();
    for (const auto& r : j.at("registers")) {
      m.register_names.push_back(r.at("name").get<std::string>());
      m.reset_values.push_back(r.at("reset").get<std::uint32_t>());
    }
    for (const auto& b : j.at("ready_behaviors")) {
      ReadyBehavior rb{b.at("watch_register").get<std::uint8_t>(), b.at("watch_mask").get<std::uint32_t>(), std::nullopt,
                       b.at("ready_register").get<std::uint8_t>(), b.at("ready_bit").get<std::uint8_t>(),
                       b.at("delay_ns").get<Nanos>()};
      if (b.contains("enable_bit")) rb.enable_bit = b["enable_bit"].get<std::uint8_t>();
      m.ready_behaviors.push_back(rb);
    }
    const auto& cj = j.at("clocks");
    auto lookup = [&](const std::string& n) -> ClockId {
      for (std::size_t i = 0; i < cj.size(); ++i)
        if (cj[i].at("name").get<std::string>() == n) return ClockId{static_cast<std::uint16_t>(i)};
      fail(Errc::InvalidModel, "unknown clock '" + n + "'");
    };
    static const ClockKind kinds[] = {ClockKind::Source, ClockKind::Gate, ClockKind::Mux, ClockKind::Scaler,
                                      ClockKind::Consumer};
    static const ClockTech techs[] = {ClockTech::Generic, ClockTech::RcOscillator, ClockTech::CrystalOscillator,
                                      ClockTech::Pll};
    static const ScaleOp ops[] = {ScaleOp::None, ScaleOp::Multiply, ScaleOp::Divide, ScaleOp::Frequency};
    for (const auto& c : cj) {
      ClockDescriptor d;
      d.id = ClockId{c.at("id").get<std::uint16_t>()};
      d.name = c.at("name").get<std::string>();
      d.kind = parse_key(c.at("kind").get<std::string>(), kind_key, kinds, "clock kind");
      const auto& caps = c.at("caps");
      d.caps = {caps.at("gateable").get<bool>(), caps.at("muxable").get<bool>(), caps.at("scalable").get<bool>(),
                caps.at("on_the_fly").get<bool>()};
      d.tech = parse_key(c.at("tech").get<std::string>(), tech_key, techs, "clock tech");
      d.op = parse_key(c.at("op").get<std::string>(), op_key, ops, "scale op");
      d.field = field_from(c.at("field"));
      d.mapping = mapping_from(c.at("mapping"));
      for (const auto& p : c.at("parents")) d.parent_options.push_back(lookup(p.get<std::string>()));
      if (c.contains("source_frequency")) d.source_frequency = c["source_frequency"].get<Hz>();
      m.clocks.push_back(std::move(d));
    }
    m.core = lookup(j.at("core").get<std::string>());
    m.fallback_source = lookup(j.at("fallback_source").get<std::string>());
    const auto& k = j.at("constraints");
    for (const auto& r : k.at("voltage_ranges"))
      m.voltage_ranges.push_back({r.at("id").get<std::string>(), r.at("core_voltage").get<double>(), r.at("max_hz").get<Hz>()});
    m.flash_table.max_hz = k.at("flash_wait_states").get<std::vector<std::vector<Hz>>>();
    for (const auto& l : k.at("clock_limits"))
      m.limits.push_back({lookup(l.at("clock").get<std::string>()), l.at("min_hz").get<Hz>(), l.at("max_hz").get<Hz>()});
    const auto& pw = k.at("power");
    if (pw.contains("voltage_field")) m.power.voltage_field = field_from(pw["voltage_field"]);
    m.power.voltage_codes = pw.at("voltage_codes").get<std::vector<std::uint32_t>>();
    m.power.wait_state_field = field_from(pw.at("wait_state_field"));
    const auto& dc = j.at("default_config");
    for (const auto& e : dc.at("entries")) {
      TopologyEntry t{lookup(e.at("clock").get<std::string>()), std::nullopt, std::nullopt, e.at("enabled").get<bool>()};
      if (e.contains("parent")) t.parent = lookup(e["parent"].get<std::string>());
      if (e.contains("scale")) t.scale = e["scale"].get<std::int64_t>();
      m.default_config.entries.push_back(t);
    }
    m.default_config.voltage_range = dc.at("voltage_range").get<std::size_t>();
    m.default_config.wait_states = dc.at("wait_states").get<std::uint32_t>();
    const auto& e = j.at("energy");
    m.energy.capacitance_eff = e.at("capacitance_eff").get<double>();
    m.energy.static_current = e.at("static_current").get<double>();
    m.energy.supply_voltage = e.at("supply_voltage").get<double>();
    m.energy.tree_capacitance = e.at("tree_capacitance").get<double>();
    m.energy.rc_bias_current = e.at("rc_bias_current").get<double>();
    m.energy.crystal_bias_current = e.at("crystal_bias_current").get<double>();
    m.energy.pll_bias_current = e.at("pll_bias_current").get<double>();
    m.energy.memory_alpha = e.at("memory_alpha").get<std::array<double, 3>>();
    m.energy.wait_state_penalty = e.at("wait_state_penalty").get<std::array<double, 3>>();
    m.energy.context_switch_cycles = e.at("context_switch_cycles").get<std::uint32_t>();
    const auto& tc = j.at("transition_costs");
    m.costs = {tc.at("save_cycles").get<std::uint32_t>(), tc.at("phase_cycles").get<std::uint32_t>()};
    m.evaluation_frequencies = j.at("evaluation_frequencies").get<std::vector<Hz>>();
    m.assessment_frequencies = j.at("assessment_frequencies").get<std::vector<Hz>>();
    if (auto v = validate_model(m); !v.empty()) fail(Errc::InvalidModel, v.front());
    return m;
  } catch (const nlohmann::json::exception& ex) {
    fail(Errc::InvalidModel, std::string("malformed platform JSON: ") + ex.what());
  }
}

}  // namespace clktree
