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

// VP-A: virtual analogue of an 80 MHz Cortex-M4 low-power MCU with a
// multi-speed RC oscillator, a 16 MHz RC, an 8 MHz crystal, a PLL and two
// regulator ranges. All numbers are calibration data for the simulator.

#include "clktree/platform.hpp"

namespace clktree::platforms {

inline PlatformModel make_vpa() {
  constexpr Hz MHz = 1'000'000;
  enum : std::uint8_t { RCC_CR, RCC_CFGR, RCC_PLLCFGR, RCC_ENR, RCC_CSR, PWR_CR1, FLASH_ACR };

  PlatformModel m;
  m.name = "vpa";
  m.register_names = {"RCC_CR", "RCC_CFGR", "RCC_PLLCFGR", "RCC_ENR", "RCC_CSR", "PWR_CR1", "FLASH_ACR"};
  // MSI on+ready at 4 MHz, PLLN=16, regulator range 1 settled.
  m.reset_values = {0x0000'0063, 0x0000'0000, 0x0000'1000, 0x0000'0000, 0x0000'0000, 0x0001'0200, 0x0000'0000};

  m.ready_behaviors = {
      {.watch_register = RCC_CR, .watch_mask = 1u << 0, .enable_bit = 0, .ready_register = RCC_CR, .ready_bit = 1, .delay_ns = 10'000},
      {.watch_register = RCC_CR, .watch_mask = 1u << 8, .enable_bit = 8, .ready_register = RCC_CR, .ready_bit = 10, .delay_ns = 10'000},
      {.watch_register = RCC_CR, .watch_mask = 1u << 16, .enable_bit = 16, .ready_register = RCC_CR, .ready_bit = 17, .delay_ns = 2'000'000},
      {.watch_register = RCC_PLLCFGR, .watch_mask = 0x1600'7F73u, .enable_bit = 28, .ready_register = RCC_PLLCFGR, .ready_bit = 29, .delay_ns = 200'000},
      {.watch_register = RCC_CSR, .watch_mask = 1u << 0, .enable_bit = 0, .ready_register = RCC_CSR, .ready_bit = 1, .delay_ns = 10'000},
      // 200 mV between the ranges at 20 us per 100 mV.
      {.watch_register = PWR_CR1, .watch_mask = 0x3u << 9, .enable_bit = std::nullopt, .ready_register = PWR_CR1, .ready_bit = 16, .delay_ns = 40'000},
  };

  auto id = [](std::uint16_t v) { return ClockId{v}; };
  enum : std::uint16_t { MSI, HSI16, HSE, LSI, PLL_SRC, PLL_M, PLL_N, PLL_R, SYSCLK, HPRE, CORE, PPRE2, SPI1_GATE, SPI1, LPTIM_GATE, LPTIM };

  LutMapping msi_bands{{{100'000, 0}, {200'000, 1}, {400'000, 2}, {800'000, 3}, {1 * MHz, 4}, {2 * MHz, 5},
                        {4 * MHz, 6}, {8 * MHz, 7}, {16 * MHz, 8}, {24 * MHz, 9}, {32 * MHz, 10}, {48 * MHz, 11}}};
  LutMapping ahb_div{{{1, 0}, {2, 8}, {4, 9}, {8, 10}, {16, 11}}};
  LutMapping apb_div{{{1, 0}, {2, 4}, {4, 5}, {8, 6}, {16, 7}}};

  m.clocks = {
      {.id = id(MSI), .name = "msi", .kind = ClockKind::Source,
       .caps = {.gateable = true, .scalable = true, .on_the_fly = true}, .tech = ClockTech::RcOscillator,
       .op = ScaleOp::Frequency, .field = {RCC_CR, 4, 4, 0, 1}, .mapping = msi_bands},
      {.id = id(HSI16), .name = "hsi16", .kind = ClockKind::Source, .caps = {.gateable = true},
       .tech = ClockTech::RcOscillator, .field = {RCC_CR, 0, 0, 8, 10}, .mapping = FixedFrequency{16 * MHz},
       .source_frequency = 16 * MHz},
      {.id = id(HSE), .name = "hse", .kind = ClockKind::Source, .caps = {.gateable = true},
       .tech = ClockTech::CrystalOscillator, .field = {RCC_CR, 0, 0, 16, 17}, .mapping = FixedFrequency{8 * MHz},
       .source_frequency = 8 * MHz},
      {.id = id(LSI), .name = "lsi", .kind = ClockKind::Source, .caps = {.gateable = true},
       .tech = ClockTech::RcOscillator, .field = {RCC_CSR, 0, 0, 0, 1}, .mapping = FixedFrequency{32'000},
       .source_frequency = 32'000},
      {.id = id(PLL_SRC), .name = "pll_src", .kind = ClockKind::Mux, .caps = {.muxable = true},
       .field = {RCC_PLLCFGR, 0, 2}, .mapping = LutMapping{{{0, 1}, {1, 2}, {2, 3}}},
       .parent_options = {id(MSI), id(HSI16), id(HSE)}},
      {.id = id(PLL_M), .name = "pll_m", .kind = ClockKind::Scaler, .caps = {.scalable = true},
       .op = ScaleOp::Divide, .field = {RCC_PLLCFGR, 4, 3}, .mapping = RangeMapping{1, 8, Modifier::ZeroBased},
       .parent_options = {id(PLL_SRC)}},
      {.id = id(PLL_N), .name = "pll_n", .kind = ClockKind::Scaler, .caps = {.gateable = true, .scalable = true},
       .tech = ClockTech::Pll, .op = ScaleOp::Multiply, .field = {RCC_PLLCFGR, 8, 7, 28, 29},
       .mapping = RangeMapping{8, 86, Modifier::Offset, 0}, .parent_options = {id(PLL_M)}},
      {.id = id(PLL_R), .name = "pll_r", .kind = ClockKind::Scaler, .caps = {.scalable = true},
       .op = ScaleOp::Divide, .field = {RCC_PLLCFGR, 25, 2}, .mapping = LutMapping{{{2, 0}, {4, 1}, {6, 2}, {8, 3}}},
       .parent_options = {id(PLL_N)}},
      {.id = id(SYSCLK), .name = "sysclk", .kind = ClockKind::Mux, .caps = {.muxable = true, .on_the_fly = true},
       .field = {RCC_CFGR, 0, 2}, .mapping = RangeMapping{0, 3, Modifier::ZeroBased},
       .parent_options = {id(MSI), id(HSI16), id(HSE), id(PLL_R)}},
      {.id = id(HPRE), .name = "hpre", .kind = ClockKind::Scaler, .caps = {.scalable = true, .on_the_fly = true},
       .op = ScaleOp::Divide, .field = {RCC_CFGR, 4, 4}, .mapping = ahb_div, .parent_options = {id(SYSCLK)}},
      {.id = id(CORE), .name = "core", .kind = ClockKind::Consumer, .parent_options = {id(HPRE)}},
      {.id = id(PPRE2), .name = "ppre2", .kind = ClockKind::Scaler, .caps = {.scalable = true, .on_the_fly = true},
       .op = ScaleOp::Divide, .field = {RCC_CFGR, 11, 3}, .mapping = apb_div, .parent_options = {id(HPRE)}},
      {.id = id(SPI1_GATE), .name = "spi1_gate", .kind = ClockKind::Gate,
       .caps = {.gateable = true, .on_the_fly = true}, .field = {RCC_ENR, 0, 0, 1, std::nullopt},
       .parent_options = {id(PPRE2)}},
      {.id = id(SPI1), .name = "spi1", .kind = ClockKind::Consumer, .parent_options = {id(SPI1_GATE)}},
      {.id = id(LPTIM_GATE), .name = "lptim_gate", .kind = ClockKind::Gate,
       .caps = {.gateable = true, .on_the_fly = true}, .field = {RCC_ENR, 0, 0, 0, std::nullopt},
       .parent_options = {id(LSI)}},
      {.id = id(LPTIM), .name = "lptim", .kind = ClockKind::Consumer, .parent_options = {id(LPTIM_GATE)}},
  };

  m.voltage_ranges = {{"R1", 1.2, 80 * MHz}, {"R2", 1.0, 26 * MHz}};
  m.flash_table.max_hz = {{16 * MHz, 32 * MHz, 48 * MHz, 64 * MHz, 80 * MHz}, {8 * MHz, 16 * MHz, 26 * MHz}};
  m.limits = {
      {id(MSI), 0, 48 * MHz},
      {id(PLL_M), 4 * MHz, 16 * MHz},     // VCO input
      {id(PLL_N), 64 * MHz, 344 * MHz},   // VCO output
      {id(PLL_R), 0, 80 * MHz},
  };
  m.power.voltage_field = RegisterFieldDescriptor{PWR_CR1, 9, 2, std::nullopt, 16};
  m.power.voltage_codes = {1, 2};
  m.power.wait_state_field = {FLASH_ACR, 0, 3};
  m.core = id(CORE);
  m.fallback_source = id(MSI);

  // MSI 48 MHz -> PLL (/6 x20 /2) -> 80 MHz in range 1.
  m.default_config.entries = {
      {.clock = id(MSI), .scale = 48 * MHz, .enabled = true},
      {.clock = id(PLL_SRC), .parent = id(MSI)},
      {.clock = id(PLL_M), .parent = id(PLL_SRC), .scale = 6},
      {.clock = id(PLL_N), .parent = id(PLL_M), .scale = 20, .enabled = true},
      {.clock = id(PLL_R), .parent = id(PLL_N), .scale = 2},
      {.clock = id(SYSCLK), .parent = id(PLL_R)},
      {.clock = id(HPRE), .parent = id(SYSCLK), .scale = 1},
      {.clock = id(PPRE2), .parent = id(HPRE), .scale = 1},
      {.clock = id(SPI1_GATE), .parent = id(PPRE2), .enabled = true},
      {.clock = id(LSI), .enabled = true},
      {.clock = id(LPTIM_GATE), .parent = id(LSI), .enabled = true},
  };
  m.default_config.voltage_range = 0;
  m.default_config.wait_states = 4;

  m.energy = {
      .capacitance_eff = 3.0e-10,
      .static_current = 3.0e-3,
      .supply_voltage = 3.3,
      .tree_capacitance = 1.5e-11,
      .rc_bias_current = 6.0e-5,
      .crystal_bias_current = 4.5e-4,
      .pll_bias_current = 5.0e-4,
      .memory_alpha = {1.0, 1.1, 1.35},
      .wait_state_penalty = {0.0, 0.0, 0.08},
      .context_switch_cycles = 200,
  };
  m.costs = {.save_cycles = 600, .phase_cycles = 120};
  m.evaluation_frequencies = {8 * MHz, 16 * MHz, 24 * MHz, 32 * MHz, 40 * MHz, 48 * MHz, 64 * MHz, 80 * MHz};
  m.assessment_frequencies = {8 * MHz, 16 * MHz, 24 * MHz, 48 * MHz, 80 * MHz};
  return m;
}

}  // namespace clktree::platforms
