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

#include <gtest/gtest.h>

#include <sstream>

#include "test_util.hpp"

using namespace clktree;

namespace {

std::shared_ptr<const PlatformModel> vpa() { return get_platform("vpa"); }

TEST(Timing, CyclesToNs) {
  EXPECT_EQ(cycles_to_ns(80, 80'000'000), 1000);
  EXPECT_EQ(cycles_to_ns(3, 48'000'000), 63);
  EXPECT_EQ(cycles_to_ns(1000, 8'000'000, 1.5), 187'500);
  EXPECT_ERRC(cycles_to_ns(1, 0), InvalidArgument);
}

TEST(Radio, AirTime) {
  EXPECT_EQ(air_time_ns(64), static_cast<Nanos>((64 + 47) * 8 * 1e9 / 250e3));
  EXPECT_EQ(air_time_ns(64), 3'552'000);
}

TEST(Radio, SpiSaturates) {
  const auto slow = spi_duration_ns(100, 10'000'000, 2);
  for (Hz f : {16'000'000ull, 40'000'000ull, 80'000'000ull}) EXPECT_EQ(spi_duration_ns(100, f, 2), slow);
  EXPECT_GT(spi_duration_ns(100, 8'000'000, 2), slow);
  for (Hz f : {8'000'000ull, 16'000'000ull, 24'000'000ull, 80'000'000ull})
    EXPECT_GE(spi_duration_ns(100, f, spi_prescaler(f)), slow);
  EXPECT_EQ(spi_prescaler(80'000'000), 16u);
  EXPECT_EQ(spi_prescaler(8'000'000), 2u);
}

TEST(Radio, Errors) {
  EXPECT_ERRC(radio_model(300, 80'000'000, 16), PayloadTooLarge);
  EXPECT_ERRC(radio_model(64, 0, 16), InvalidArgument);
  const auto p = radio_model(64, 80'000'000, 16);
  EXPECT_EQ(p.air_ns, air_time_ns(64));
  EXPECT_EQ(p.compute_ns, cycles_to_ns(kRadioComputeCycles, 80'000'000));
  EXPECT_EQ(p.spi_ns, spi_duration_ns(111, 80'000'000, 16));
}

TEST(Simulator, SingleComputeActivation) {
  const auto m = vpa();
  ClockState st(m);
  const Hz f = st.core_frequency();
  const double v = m->voltage_ranges[st.voltage_range()].core_voltage;
  const double overhead = overhead_current(*m, st.topology(), st.voltage_range());
  Simulator sim(std::move(st), {{.id = 0, .name = "t", .max_activations = 1, .steps = {{StepKind::Compute, 800'000}}}}, {});
  sim.run();
  const Nanos busy = cycles_to_ns(m->energy.context_switch_cycles, f) + cycles_to_ns(800'000, f);
  const auto& t = sim.totals()[0];
  EXPECT_EQ(t.busy_ns, busy);
  EXPECT_EQ(t.activations, 1u);
  const double i = m->energy.capacitance_eff * v * v * static_cast<double>(f) / m->energy.supply_voltage +
                   m->energy.static_current + overhead;
  EXPECT_NEAR(t.charge_c, i * static_cast<double>(busy) * 1e-9, 1e-15);
  EXPECT_EQ(sim.completion_ns() - sim.start_ns(), busy);
}

TEST(Simulator, IdleChargesStaticAndOverhead) {
  const auto m = vpa();
  ClockState st(m);
  const double idle_i = m->energy.static_current + overhead_current(*m, st.topology(), st.voltage_range());
  Simulator sim(std::move(st),
                {{.id = 0, .name = "t", .period_ns = 1'000'000, .steps = {{StepKind::BusyWait, 100'000}}}},
                {.duration_ns = 10'000'000});
  sim.run();
  const auto& idle = sim.totals()[sim.idle_bucket()];
  EXPECT_GT(idle.idle_ns, 0);
  EXPECT_NEAR(idle.charge_c, idle_i * static_cast<double>(idle.idle_ns) * 1e-9, 1e-15);
  EXPECT_EQ(sim.totals()[0].activations, 10u);
  EXPECT_EQ(sim.end_ns() - sim.start_ns(), 10'000'000);
}

TEST(Simulator, TrailingSleepEndsActivation) {
  const auto sc = make_scenario("radio_send", {.packets = 1});
  auto sim = simulate(ClockState(vpa()), sc, {});
  const Hz f = sim->state().core_frequency();
  const auto ph = radio_model(64, f, spi_prescaler(f));
  const Nanos spi = spi_duration_ns(64 + kRadioFramingBytes + kRadioPollBytes, f, spi_prescaler(f));
  const Nanos want = cycles_to_ns(vpa()->energy.context_switch_cycles, f) + ph.compute_ns + spi + ph.air_ns;
  EXPECT_EQ(sim->completion_ns() - sim->start_ns(), want);
  EXPECT_EQ(sim->totals()[0].activations, 1u);
}

TEST(Simulator, OverrunReleasesOnCompletion) {
  Simulator sim(ClockState(vpa()),
                {{.id = 0, .name = "t", .period_ns = 1'000'000, .max_activations = 3, .steps = {{StepKind::BusyWait, 2'500'000}}}},
                {});
  sim.run();
  const Nanos ctx = cycles_to_ns(vpa()->energy.context_switch_cycles, 80'000'000);
  EXPECT_EQ(sim.completion_ns() - sim.start_ns(), 3 * (2'500'000 + ctx));
  EXPECT_EQ(sim.totals()[sim.idle_bucket()].idle_ns, 0);
}

TEST(Simulator, WindowCoversTotals) {
  auto sim = simulate(ClockState(vpa()), make_scenario("producer_consumer"), {.duration_ns = 100'000'000});
  const auto w = sim->window(sim->start_ns(), sim->end_ns());
  double sum = 0;
  for (std::size_t b = 0; b < w.tasks.size(); ++b) {
    EXPECT_NEAR(w.tasks[b].charge_c, sim->totals()[b].charge_c, 1e-12);
    sum += sim->totals()[b].charge_c;
  }
  EXPECT_NEAR(w.charge_c, sum, 1e-12);
  const auto half = sim->window(sim->start_ns(), sim->start_ns() + 50'000'000);
  EXPECT_LT(half.charge_c, w.charge_c);
  EXPECT_EQ(half.tasks[0].activations, 3u);
}

TEST(Simulator, JitterIsSeeded) {
  const auto sc = make_scenario("micro");
  auto a = simulate(ClockState(vpa()), sc, {.seed = 5, .duration_ns = 100'000'000, .jitter = 0.2});
  auto b = simulate(ClockState(vpa()), sc, {.seed = 5, .duration_ns = 100'000'000, .jitter = 0.2});
  auto c = simulate(ClockState(vpa()), sc, {.seed = 6, .duration_ns = 100'000'000, .jitter = 0.2});
  EXPECT_EQ(a->totals()[0].busy_ns, b->totals()[0].busy_ns);
  EXPECT_EQ(a->totals()[0].charge_c, b->totals()[0].charge_c);
  EXPECT_NE(a->totals()[0].busy_ns, c->totals()[0].busy_ns);
}

TEST(Simulator, TraceCsv) {
  auto sim = simulate(ClockState(vpa()), make_scenario("micro"), {.duration_ns = 20'000'000});
  std::ostringstream os;
  sim->write_trace_csv(os);
  const auto s = os.str();
  EXPECT_EQ(s.rfind("time_ns,current_a,core_hz,task\n", 0), 0u);
  EXPECT_NE(s.find(",add_reg\n"), std::string::npos);
  EXPECT_NE(s.find(",idle\n"), std::string::npos);
  Nanos t = sim->start_ns();
  for (const auto& seg : sim->segments()) {
    EXPECT_EQ(seg.start_ns, t);
    t += seg.duration_ns;
  }
  EXPECT_EQ(t, sim->end_ns());
}

TEST(Simulator, Errors) {
  EXPECT_ERRC(Simulator(ClockState(vpa()), {}, {}), InvalidArgument);
  Simulator sim(ClockState(vpa()), {{.id = 0, .name = "t", .max_activations = 1, .steps = {{StepKind::BusyWait, 10}}}}, {});
  sim.run();
  EXPECT_ERRC(sim.run(), InvalidArgument);
}

TEST(Simulator, DvfsTransitionsChargedToKernel) {
  auto sim = simulate(ClockState(vpa()), make_scenario("producer_consumer"), {.dvfs = true, .duration_ns = 600'000'000});
  EXPECT_GT(sim->transitions_run(), 0u);
  EXPECT_TRUE(sim->assessment_end());
  const auto& k = sim->totals()[sim->kernel_bucket()];
  EXPECT_GT(k.busy_ns, 0);
  EXPECT_GT(k.charge_c, 0);
  EXPECT_LT(sim->selected_hz(0), sim->selected_hz(1));
}

}  // namespace
