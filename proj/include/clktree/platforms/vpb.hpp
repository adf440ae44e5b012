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

// VP-B: virtual analogue of a 40 MHz Cortex-M4 MCU with a banded RC
// oscillator, a 40 MHz crystal and two prescalers between the source mux
// and the core. One regulator range; only flash wait states adapt.

#include "clktree/platform.hpp"

namespace clktree::platforms {

inline PlatformModel make_vpb() {
  constexpr Hz MHz = 1'000'000;
  enum : std::uint8_t { CMU_HFRCOCTRL, CMU_HFXOCTRL, CMU_LFRCOCTRL, CMU_HFCLKSEL, CMU_PRESC, CMU_CLKEN, MSC_READCTRL };

  PlatformModel m;
  m.name = "vpb";
  m.register_names = {"CMU_HFRCOCTRL", "CMU_HFXOCTRL", "CMU_LFRCOCTRL", "CMU_HFCLKSEL",
                      "CMU_PRESC",     "CMU_CLKEN",    "MSC_READCTRL"};
  // HFRCO on+ready in the 19 MHz band, HFCLK from HFRCO, prescalers /1.
  m.reset_values = {0x0000'0063, 0, 0, 0x0000'0001, 0, 0, 0};

  m.ready_behaviors = {
      {.watch_register = CMU_HFRCOCTRL, .watch_mask = 1u << 0, .enable_bit = 0, .ready_register = CMU_HFRCOCTRL, .ready_bit = 1, .delay_ns = 10'000},
      {.watch_register = CMU_HFXOCTRL, .watch_mask = 1u << 0, .enable_bit = 0, .ready_register = CMU_HFXOCTRL, .ready_bit = 1, .delay_ns = 2'000'000},
      {.watch_register = CMU_LFRCOCTRL, .watch_mask = 1u << 0, .enable_bit = 0, .ready_register = CMU_LFRCOCTRL, .ready_bit = 1, .delay_ns = 10'000},
  };

  auto id = [](std::uint16_t v) { return ClockId{v}; };
  enum : std::uint16_t { HFRCO, HFXO, LFRCO, HFCLK_SEL, HFPRESC, HFCOREPRESC, CORE, USART_GATE, USART, LETIMER_GATE, LETIMER };

  LutMapping bands{{{1 * MHz, 0}, {2 * MHz, 1}, {4 * MHz, 2}, {7 * MHz, 3}, {13 * MHz, 4},
                    {16 * MHz, 5}, {19 * MHz, 6}, {26 * MHz, 7}, {32 * MHz, 8}, {38 * MHz, 9}}};

  m.clocks = {
      {.id = id(HFRCO), .name = "hfrco", .kind = ClockKind::Source,
       .caps = {.gateable = true, .scalable = true, .on_the_fly = true}, .tech = ClockTech::RcOscillator,
       .op = ScaleOp::Frequency, .field = {CMU_HFRCOCTRL, 4, 4, 0, 1}, .mapping = bands},
      {.id = id(HFXO), .name = "hfxo", .kind = ClockKind::Source, .caps = {.gateable = true},
       .tech = ClockTech::CrystalOscillator, .field = {CMU_HFXOCTRL, 0, 0, 0, 1}, .mapping = FixedFrequency{40 * MHz},
       .source_frequency = 40 * MHz},
      {.id = id(LFRCO), .name = "lfrco", .kind = ClockKind::Source, .caps = {.gateable = true},
       .tech = ClockTech::RcOscillator, .field = {CMU_LFRCOCTRL, 0, 0, 0, 1}, .mapping = FixedFrequency{32'768},
       .source_frequency = 32'768},
      {.id = id(HFCLK_SEL), .name = "hfclk_sel", .kind = ClockKind::Mux, .caps = {.muxable = true, .on_the_fly = true},
       .field = {CMU_HFCLKSEL, 0, 2}, .mapping = LutMapping{{{0, 1}, {1, 2}}},
       .parent_options = {id(HFRCO), id(HFXO)}},
      {.id = id(HFPRESC), .name = "hfpresc", .kind = ClockKind::Scaler, .caps = {.scalable = true, .on_the_fly = true},
       .op = ScaleOp::Divide, .field = {CMU_PRESC, 8, 4}, .mapping = RangeMapping{1, 16, Modifier::ZeroBased},
       .parent_options = {id(HFCLK_SEL)}},
      {.id = id(HFCOREPRESC), .name = "hfcorepresc", .kind = ClockKind::Scaler,
       .caps = {.scalable = true, .on_the_fly = true}, .op = ScaleOp::Divide, .field = {CMU_PRESC, 16, 3},
       .mapping = RangeMapping{1, 16, Modifier::Log2}, .parent_options = {id(HFPRESC)}},
      {.id = id(CORE), .name = "core", .kind = ClockKind::Consumer, .parent_options = {id(HFCOREPRESC)}},
      {.id = id(USART_GATE), .name = "usart_gate", .kind = ClockKind::Gate,
       .caps = {.gateable = true, .on_the_fly = true}, .field = {CMU_CLKEN, 0, 0, 1, std::nullopt},
       .parent_options = {id(HFPRESC)}},
      {.id = id(USART), .name = "usart", .kind = ClockKind::Consumer, .parent_options = {id(USART_GATE)}},
      {.id = id(LETIMER_GATE), .name = "letimer_gate", .kind = ClockKind::Gate,
       .caps = {.gateable = true, .on_the_fly = true}, .field = {CMU_CLKEN, 0, 0, 0, std::nullopt},
       .parent_options = {id(LFRCO)}},
      {.id = id(LETIMER), .name = "letimer", .kind = ClockKind::Consumer, .parent_options = {id(LETIMER_GATE)}},
  };

  m.voltage_ranges = {{"R0", 1.2, 40 * MHz}};
  m.flash_table.max_hz = {{20 * MHz, 40 * MHz}};
  m.power.wait_state_field = {MSC_READCTRL, 0, 2};
  m.core = id(CORE);
  m.fallback_source = id(HFRCO);

  // Crystal straight through: 40 MHz.
  m.default_config.entries = {
      {.clock = id(HFXO), .enabled = true},
      {.clock = id(HFRCO), .scale = 19 * MHz, .enabled = false},
      {.clock = id(HFCLK_SEL), .parent = id(HFXO)},
      {.clock = id(HFPRESC), .parent = id(HFCLK_SEL), .scale = 1},
      {.clock = id(HFCOREPRESC), .parent = id(HFPRESC), .scale = 1},
      {.clock = id(USART_GATE), .parent = id(HFPRESC), .enabled = true},
      {.clock = id(LFRCO), .enabled = true},
      {.clock = id(LETIMER_GATE), .parent = id(LFRCO), .enabled = true},
  };
  m.default_config.voltage_range = 0;
  m.default_config.wait_states = 1;

  m.energy = {
      .capacitance_eff = 7.0e-10,
      .static_current = 1.0e-3,
      .supply_voltage = 3.3,
      .tree_capacitance = 1.0e-11,
      .rc_bias_current = 5.0e-5,
      .crystal_bias_current = 3.0e-4,
      .pll_bias_current = 0.0,
      .memory_alpha = {1.0, 1.05, 1.6},
      .wait_state_penalty = {0.0, 0.0, 0.15},
      .context_switch_cycles = 200,
  };
  m.costs = {.save_cycles = 500, .phase_cycles = 100};
  m.evaluation_frequencies = {8 * MHz, 16 * MHz, 20 * MHz, 32 * MHz, 40 * MHz};
  m.assessment_frequencies = {8 * MHz, 16 * MHz, 20 * MHz, 32 * MHz, 40 * MHz};
  return m;
}

}  // namespace clktree::platforms
