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

// Register 0: enable bit 0, ready bit 1, multiplier field [10:4].
RegisterFile make_file(Nanos delay = 200'000) {
  return RegisterFile({0, 0}, {{.watch_register = 0,
                                .watch_mask = 0x7F1,
                                .enable_bit = 0,
                                .ready_register = 0,
                                .ready_bit = 1,
                                .delay_ns = delay}});
}

const RegisterFieldDescriptor kMul{0, 4, 7, 0, 1};

TEST(RegisterFile, ReadFieldMaskArithmetic) {
  RegisterFile f({0x0000'0070, 0xFFFF'FFFF}, {});
  EXPECT_EQ(f.read_field({0, 4, 3}), 7u);
  EXPECT_EQ(f.read_field({1, 31, 1}), 1u);
  EXPECT_ERRC(f.read_field({2, 0, 1}), BadRegisterIndex);
}

TEST(RegisterFile, WriteField) {
  RegisterFile f({0}, {});
  f.write_field({0, 4, 3}, 5);
  EXPECT_EQ(f.words()[0], 0x50u);
  EXPECT_ERRC(f.write_field({0, 4, 3}, 9), ValueTooWide);
  EXPECT_EQ(f.words()[0], 0x50u);
  EXPECT_ERRC(f.write_field({3, 0, 1}, 0), BadRegisterIndex);
}

TEST(RegisterFile, WriteFieldKeepsOtherBits) {
  RegisterFile f({0xFFFF'FFFF}, {});
  f.write_field({0, 8, 4}, 0);
  EXPECT_EQ(f.words()[0], 0xFFFF'F0FFu);
}

TEST(RegisterFile, ReadyDropsAndRisesAfterDelay) {
  auto f = make_file();
  f.write_bit(0, 0, true);
  f.settle();
  ASSERT_TRUE(f.read_bit(0, 1));
  f.write_field(kMul, 20);
  EXPECT_FALSE(f.read_bit(0, 1));
  EXPECT_EQ(f.pending_deadline(0, 1), f.now() + 200'000);
  f.advance_time(199'999);
  EXPECT_FALSE(f.read_bit(0, 1));
  f.advance_time(1);
  EXPECT_TRUE(f.read_bit(0, 1));
}

TEST(RegisterFile, ExactDeadline) {
  auto f = make_file(150'000);
  f.write_bit(0, 0, true);
  f.advance_time(150'000);
  EXPECT_TRUE(f.read_bit(0, 1));
  f.write_field(kMul, 3);
  f.advance_time(149'999);
  EXPECT_FALSE(f.read_bit(0, 1));
}

TEST(RegisterFile, DisabledBehaviorStaysLow) {
  auto f = make_file();
  f.write_field(kMul, 20);
  f.advance_time(1'000'000'000);
  EXPECT_FALSE(f.read_bit(0, 1));
  EXPECT_FALSE(f.next_deadline());
}

TEST(RegisterFile, IdleAdvanceOnlyMovesTime) {
  RegisterFile f({1, 2, 3}, {});
  f.advance_time(1'000'000'000);
  EXPECT_EQ(f.now(), 1'000'000'000);
  EXPECT_EQ(f.words(), (std::vector<std::uint32_t>{1, 2, 3}));
  EXPECT_ERRC(f.advance_time(-1), InvalidArgument);
}

TEST(RegisterFile, ReadyBitsAreHardwareOwned) {
  auto f = make_file();
  EXPECT_EQ(f.hardware_owned_mask(0), 0b10u);
  f.write_bit(0, 1, true);
  EXPECT_FALSE(f.read_bit(0, 1));
  f.write_word(0, 0xFFFF'FFFF);
  EXPECT_FALSE(f.read_bit(0, 1));
  EXPECT_EQ(f.words()[0], 0xFFFF'FFFDu);
}

TEST(RegisterFile, InjectedFaultSuppressesOneReady) {
  auto f = make_file();
  f.inject_ready_fault();
  f.write_bit(0, 0, true);
  EXPECT_FALSE(f.fault_armed());
  f.advance_time(10'000'000);
  EXPECT_FALSE(f.read_bit(0, 1));
  f.write_field(kMul, 4);
  f.settle();
  EXPECT_TRUE(f.read_bit(0, 1));
}

TEST(RegisterFile, DisarmedFaultHasNoEffect) {
  auto f = make_file();
  f.inject_ready_fault();
  f.disarm_ready_fault();
  f.write_bit(0, 0, true);
  f.settle();
  EXPECT_TRUE(f.read_bit(0, 1));
}

TEST(RegisterFile, TraceRecordsAccesses) {
  auto f = make_file(100);
  f.enable_trace(true);
  f.write_field(kMul, 1);
  f.read_field(kMul);
  ASSERT_EQ(f.trace().size(), 2u);
  EXPECT_EQ(f.trace()[0].new_value, 0x10u);
  std::ostringstream os;
  f.write_trace_csv(os);
  EXPECT_EQ(os.str(), "time_ns,register,old,new\n0,0,0,16\n0,0,16,16\n");
  f.clear_trace();
  EXPECT_TRUE(f.trace().empty());
  EXPECT_EQ(f.write_count(), 1u);
}

TEST(RegisterFile, BehaviorOnMissingRegister) {
  EXPECT_ERRC(RegisterFile({0}, {{.watch_register = 1}}), BadRegisterIndex);
}

}  // namespace
