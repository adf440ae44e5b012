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

// Simulated memory-mapped register file with ready-flag timing. The
// public surface (read_field, write_field, advance_time, now) is the
// backend contract a hardware port would implement against real MMIO.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "clktree/clock_model.hpp"
#include "clktree/error.hpp"

namespace clktree {

/// A ready flag that drops when any watched bit changes and rises again
/// `delay_ns` later, provided the (optional) enable bit is set.
struct ReadyBehavior {
  std::uint8_t watch_register = 0;
  std::uint32_t watch_mask = 0;
  std::optional<std::uint8_t> enable_bit;  // in watch_register
  std::uint8_t ready_register = 0;
  std::uint8_t ready_bit = 0;
  Nanos delay_ns = 0;
  friend bool operator==(const ReadyBehavior&, const ReadyBehavior&) = default;
};

struct RegisterAccess {
  Nanos time_ns = 0;
  std::size_t reg = 0;
  std::uint32_t old_value = 0;
  std::uint32_t new_value = 0;
};

class RegisterFile {
 public:
  RegisterFile(std::vector<std::uint32_t> reset_values, std::vector<ReadyBehavior> behaviors)
      : words_(std::move(reset_values)), behaviors_(std::move(behaviors)), pending_(behaviors_.size()), hw_owned_(words_.size(), 0) {
    for (const auto& b : behaviors_) {
      if (b.ready_register >= words_.size() || b.watch_register >= words_.size())
        fail(Errc::BadRegisterIndex, "ready behavior references missing register");
      hw_owned_[b.ready_register] |= 1u << b.ready_bit;
    }
  }

  std::size_t size() const { return words_.size(); }
  Nanos now() const { return now_; }

  std::uint32_t read_field(const RegisterFieldDescriptor& f) const {
    check_index(f.register_index);
    const std::uint32_t w = words_[f.register_index];
    log(f.register_index, w, w);
    if (f.width == 0) return 0;
    const std::uint32_t m = f.width >= 32 ? 0xFFFF'FFFFu : (std::uint32_t{1} << f.width) - 1u;
    return (w >> f.shift) & m;
  }

  void write_field(const RegisterFieldDescriptor& f, std::uint32_t regval) {
    check_index(f.register_index);
    if (f.width < 32 && regval >= (std::uint64_t{1} << f.width))
      fail(Errc::ValueTooWide, std::to_string(regval) + " does not fit in " + std::to_string(f.width) + " bits");
    const std::uint32_t old = words_[f.register_index];
    const std::uint32_t updated = (old & ~f.mask()) | ((regval << f.shift) & f.mask());
    store(f.register_index, updated);
  }

  bool read_bit(std::size_t reg, unsigned bit) const {
    check_index(reg);
    const std::uint32_t w = words_[reg];
    log(reg, w, w);
    return (w >> bit) & 1u;
  }

  void write_bit(std::size_t reg, unsigned bit, bool value) {
    check_index(reg);
    if (hw_owned_[reg] & (1u << bit)) return;
    const std::uint32_t old = words_[reg];
    store(reg, value ? (old | (1u << bit)) : (old & ~(1u << bit)));
  }

  std::uint32_t read_word(std::size_t reg) const {
    check_index(reg);
    log(reg, words_[reg], words_[reg]);
    return words_[reg];
  }

  /// Whole-word write; hardware-owned ready bits keep their current value.
  void write_word(std::size_t reg, std::uint32_t value) {
    check_index(reg);
    const std::uint32_t keep = hw_owned_[reg];
    store(reg, (value & ~keep) | (words_[reg] & keep));
  }

  /// Raw view without tracing, for snapshots and oracles.
  const std::vector<std::uint32_t>& words() const { return words_; }
  std::uint32_t hardware_owned_mask(std::size_t reg) const { return hw_owned_.at(reg); }

  void advance_time(Nanos dt) {
    if (dt < 0) fail(Errc::InvalidArgument, "negative time step");
    now_ += dt;
    for (std::size_t i = 0; i < behaviors_.size(); ++i) {
      if (pending_[i] && *pending_[i] <= now_) {
        pending_[i].reset();
        const auto& b = behaviors_[i];
        const std::uint32_t old = words_[b.ready_register];
        words_[b.ready_register] = old | (1u << b.ready_bit);
        log(b.ready_register, old, words_[b.ready_register]);
      }
    }
  }

  /// Advances until no ready flag is pending.
  void settle() {
    while (auto d = next_deadline()) advance_time(*d - now_);
  }

  std::optional<Nanos> next_deadline() const {
    std::optional<Nanos> best;
    for (const auto& p : pending_)
      if (p && (!best || *p < *best)) best = p;
    return best;
  }

  /// Deadline of the behavior that owns (reg, bit), if one is pending.
  std::optional<Nanos> pending_deadline(std::size_t reg, unsigned bit) const {
    for (std::size_t i = 0; i < behaviors_.size(); ++i)
      if (behaviors_[i].ready_register == reg && behaviors_[i].ready_bit == bit) return pending_[i];
    return std::nullopt;
  }

  std::optional<Nanos> ready_delay(std::size_t reg, unsigned bit) const {
    for (const auto& b : behaviors_)
      if (b.ready_register == reg && b.ready_bit == bit) return b.delay_ns;
    return std::nullopt;
  }

  /// The next ready behavior that gets triggered never completes. Models a
  /// PLL that fails to lock or an oscillator that fails to start.
  void inject_ready_fault() { fault_armed_ = true; }
  void disarm_ready_fault() { fault_armed_ = false; }
  bool fault_armed() const { return fault_armed_; }

  void enable_trace(bool on) { tracing_ = on; }
  const std::vector<RegisterAccess>& trace() const { return trace_; }
  void clear_trace() { trace_.clear(); }

  std::size_t write_count() const { return writes_; }

  void write_trace_csv(std::ostream& os) const {
    os << "time_ns,register,old,new\n";
    for (const auto& a : trace_) os << a.time_ns << ',' << a.reg << ',' << a.old_value << ',' << a.new_value << '\n';
  }

 private:
  void check_index(std::size_t reg) const {
    if (reg >= words_.size()) fail(Errc::BadRegisterIndex, "register index " + std::to_string(reg) + " out of range");
  }

  void log(std::size_t reg, std::uint32_t old, std::uint32_t updated) const {
    if (tracing_) trace_.push_back({now_, reg, old, updated});
  }

  void store(std::size_t reg, std::uint32_t updated) {
    const std::uint32_t old = words_[reg];
    words_[reg] = updated;
    ++writes_;
    log(reg, old, updated);
    for (std::size_t i = 0; i < behaviors_.size(); ++i) {
      const auto& b = behaviors_[i];
      if (b.watch_register != reg || ((old ^ updated) & b.watch_mask) == 0) continue;
      const std::uint32_t before = words_[b.ready_register];
      words_[b.ready_register] = before & ~(1u << b.ready_bit);
      if (before != words_[b.ready_register]) log(b.ready_register, before, words_[b.ready_register]);
      const bool enabled = !b.enable_bit || ((words_[b.watch_register] >> *b.enable_bit) & 1u);
      pending_[i].reset();
      if (!enabled) continue;
      if (fault_armed_) {
        fault_armed_ = false;
        continue;
      }
      pending_[i] = now_ + b.delay_ns;
    }
  }

  std::vector<std::uint32_t> words_;
  std::vector<ReadyBehavior> behaviors_;
  std::vector<std::optional<Nanos>> pending_;
  std::vector<std::uint32_t> hw_owned_;
  Nanos now_ = 0;
  bool tracing_ = false;
  bool fault_armed_ = false;
  std::size_t writes_ = 0;
  mutable std::vector<RegisterAccess> trace_;
};

}  // namespace clktree
