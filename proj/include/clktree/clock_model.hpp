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

// Abstract clock node types and the compact value/register encodings
// shared by every other layer.

#include <algorithm>
#include <array>
#include <bit>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "clktree/error.hpp"

namespace clktree {

using Hz = std::uint64_t;
using Nanos = std::int64_t;

struct ClockId {
  std::uint16_t value = 0;
  friend constexpr auto operator<=>(ClockId, ClockId) = default;
};

enum class ClockKind : std::uint8_t { Source, Gate, Mux, Scaler, Consumer };

/// How a scalable clock's logical value acts on the frequency it forwards.
enum class ScaleOp : std::uint8_t {
  None,
  Multiply,
  Divide,
  Frequency,  // logical value is the output frequency in Hz (tunable RC)
};

/// Physical technology; drives source classification and the energy model.
enum class ClockTech : std::uint8_t { Generic, RcOscillator, CrystalOscillator, Pll };

struct CapabilitySet {
  bool gateable = false;
  bool muxable = false;
  bool scalable = false;
  bool on_the_fly = false;  // may change while downstream consumers run
  friend bool operator==(const CapabilitySet&, const CapabilitySet&) = default;
};

enum class Modifier : std::uint8_t { ZeroBased, Offset, Log2 };

/// Contiguous logical range with an implicit register encoding:
///   ZeroBased: reg = v - min
///   Offset(k): reg = v - k
///   Log2:      reg = log2(v), domain restricted to powers of two
struct RangeMapping {
  std::int64_t min = 0;
  std::int64_t max = 0;
  Modifier modifier = Modifier::ZeroBased;
  std::int64_t offset = 0;
  friend bool operator==(const RangeMapping&, const RangeMapping&) = default;
};

struct LutEntry {
  std::int64_t logical = 0;
  std::uint32_t reg = 0;
  friend bool operator==(const LutEntry&, const LutEntry&) = default;
};

struct LutMapping {
  std::vector<LutEntry> entries;
  friend bool operator==(const LutMapping&, const LutMapping&) = default;
};

struct FixedFrequency {
  Hz hz = 0;
  friend bool operator==(const FixedFrequency&, const FixedFrequency&) = default;
};

/// std::monostate marks nodes without a value field (gates, consumers).
using ValueMapping = std::variant<std::monostate, RangeMapping, LutMapping, FixedFrequency>;

namespace detail {

inline bool is_pow2(std::int64_t v) { return v > 0 && std::has_single_bit(static_cast<std::uint64_t>(v)); }

inline std::int64_t range_to_reg(const RangeMapping& r, std::int64_t v) {
  switch (r.modifier) {
    case Modifier::ZeroBased: return v - r.min;
    case Modifier::Offset: return v - r.offset;
    case Modifier::Log2: return std::countr_zero(static_cast<std::uint64_t>(v));
  }
  return -1;
}

inline bool range_contains(const RangeMapping& r, std::int64_t v) {
  if (v < r.min || v > r.max) return false;
  return r.modifier != Modifier::Log2 || is_pow2(v);
}

}  // namespace detail

/// Logical values the mapping accepts, in increasing order.
inline std::vector<std::int64_t> mapping_domain(const ValueMapping& m) {
  std::vector<std::int64_t> out;
  if (const auto* r = std::get_if<RangeMapping>(&m)) {
    if (r->modifier == Modifier::Log2) {
      for (std::int64_t v = 1; v > 0 && v <= r->max; v <<= 1)
        if (v >= r->min) out.push_back(v);
    } else {
      for (std::int64_t v = r->min; v <= r->max; ++v) out.push_back(v);
    }
  } else if (const auto* l = std::get_if<LutMapping>(&m)) {
    for (const auto& e : l->entries) out.push_back(e.logical);
  }
  return out;
}

inline bool mapping_contains(const ValueMapping& m, std::int64_t logical) {
  if (const auto* r = std::get_if<RangeMapping>(&m)) return detail::range_contains(*r, logical);
  if (const auto* l = std::get_if<LutMapping>(&m))
    return std::any_of(l->entries.begin(), l->entries.end(),
                       [&](const LutEntry& e) { return e.logical == logical; });
  return false;
}

inline std::uint32_t encode_logical(const ValueMapping& m, std::int64_t logical) {
  if (const auto* r = std::get_if<RangeMapping>(&m)) {
    if (detail::range_contains(*r, logical))
      return static_cast<std::uint32_t>(detail::range_to_reg(*r, logical));
  } else if (const auto* l = std::get_if<LutMapping>(&m)) {
    for (const auto& e : l->entries)
      if (e.logical == logical) return e.reg;
  }
  fail(Errc::OutOfDomain, "logical value " + std::to_string(logical) + " outside mapping");
}

inline std::int64_t decode_register(const ValueMapping& m, std::uint32_t regval) {
  if (const auto* r = std::get_if<RangeMapping>(&m)) {
    std::int64_t v = 0;
    switch (r->modifier) {
      case Modifier::ZeroBased: v = static_cast<std::int64_t>(regval) + r->min; break;
      case Modifier::Offset: v = static_cast<std::int64_t>(regval) + r->offset; break;
      case Modifier::Log2:
        v = regval < 63 ? (std::int64_t{1} << regval) : -1;
        break;
    }
    if (detail::range_contains(*r, v)) return v;
  } else if (const auto* l = std::get_if<LutMapping>(&m)) {
    for (const auto& e : l->entries)
      if (e.reg == regval) return e.logical;
  }
  fail(Errc::UnknownRegisterValue, "register value " + std::to_string(regval) + " has no logical preimage");
}

/// Structural problems of a mapping; empty when well formed.
inline std::vector<std::string> mapping_violations(const ValueMapping& m) {
  std::vector<std::string> out;
  if (const auto* r = std::get_if<RangeMapping>(&m)) {
    if (r->min > r->max) out.push_back("range min > max");
    if (r->modifier == Modifier::Offset && r->min - r->offset < 0) out.push_back("offset yields negative register value");
    if (r->modifier == Modifier::ZeroBased && r->min < 0) out.push_back("zero-based range below 0");
    if (r->modifier == Modifier::Log2 && (!detail::is_pow2(r->min) || !detail::is_pow2(r->max)))
      out.push_back("log2 range bounds must be powers of two");
  } else if (const auto* l = std::get_if<LutMapping>(&m)) {
    if (l->entries.empty()) out.push_back("empty lookup table");
    for (std::size_t i = 1; i < l->entries.size(); ++i)
      if (l->entries[i].logical <= l->entries[i - 1].logical)
        out.push_back("lookup table logical values not strictly increasing");
    for (std::size_t i = 0; i < l->entries.size(); ++i)
      for (std::size_t j = i + 1; j < l->entries.size(); ++j)
        if (l->entries[i].reg == l->entries[j].reg) out.push_back("lookup table register values not unique");
  } else if (const auto* f = std::get_if<FixedFrequency>(&m)) {
    if (f->hz == 0) out.push_back("fixed frequency of 0 Hz");
  }
  return out;
}

/// Where and how a clock setting lives in the shared register table.
struct RegisterFieldDescriptor {
  std::uint8_t register_index = 0;
  std::uint8_t shift = 0;
  std::uint8_t width = 0;
  std::optional<std::uint8_t> enable_bit;
  std::optional<std::uint8_t> ready_bit;

  std::uint32_t mask() const {
    return width >= 32 ? 0xFFFF'FFFFu : ((std::uint32_t{1} << width) - 1u) << shift;
  }
  friend bool operator==(const RegisterFieldDescriptor&, const RegisterFieldDescriptor&) = default;
};

// Packed layout (28 of 32 bits used):
//   [5:0] register index  [10:6] shift  [15:11] width
//   [16] enable present   [21:17] enable bit
//   [22] ready present    [27:23] ready bit
inline constexpr unsigned kRegisterIndexBits = 6;
inline constexpr unsigned kPackedFieldBits = 28;

inline std::uint32_t pack_field(const RegisterFieldDescriptor& d) {
  auto check = [](unsigned v, unsigned bits, const char* what) {
    if (v >= (1u << bits)) fail(Errc::FieldOverflow, std::string(what) + " exceeds its bit budget");
  };
  check(d.register_index, kRegisterIndexBits, "register_index");
  check(d.shift, 5, "shift");
  check(d.width, 5, "width");
  if (d.enable_bit) check(*d.enable_bit, 5, "enable_bit");
  if (d.ready_bit) check(*d.ready_bit, 5, "ready_bit");
  if (d.shift + d.width > 32) fail(Errc::FieldOverflow, "shift + width exceeds 32");
  std::uint32_t w = d.register_index;
  w |= std::uint32_t{d.shift} << 6;
  w |= std::uint32_t{d.width} << 11;
  if (d.enable_bit) w |= (1u << 16) | (std::uint32_t{*d.enable_bit} << 17);
  if (d.ready_bit) w |= (1u << 22) | (std::uint32_t{*d.ready_bit} << 23);
  return w;
}

inline RegisterFieldDescriptor unpack_field(std::uint32_t w) {
  RegisterFieldDescriptor d;
  d.register_index = static_cast<std::uint8_t>(w & 0x3F);
  d.shift = static_cast<std::uint8_t>((w >> 6) & 0x1F);
  d.width = static_cast<std::uint8_t>((w >> 11) & 0x1F);
  if (w & (1u << 16)) d.enable_bit = static_cast<std::uint8_t>((w >> 17) & 0x1F);
  if (w & (1u << 22)) d.ready_bit = static_cast<std::uint8_t>((w >> 23) & 0x1F);
  return d;
}

// Range mapping word: [11:0] min  [23:12] max  [25:24] modifier  [31:26] offset (two's complement)
inline std::uint32_t pack_range(const RangeMapping& r) {
  if (r.min < 0 || r.min > 0xFFF || r.max < 0 || r.max > 0xFFF)
    fail(Errc::FieldOverflow, "range bounds exceed 12 bits");
  if (r.offset < -32 || r.offset > 31) fail(Errc::FieldOverflow, "range offset exceeds 6 bits");
  std::uint32_t w = static_cast<std::uint32_t>(r.min);
  w |= static_cast<std::uint32_t>(r.max) << 12;
  w |= static_cast<std::uint32_t>(r.modifier) << 24;
  w |= (static_cast<std::uint32_t>(r.offset) & 0x3F) << 26;
  return w;
}

inline RangeMapping unpack_range(std::uint32_t w) {
  RangeMapping r;
  r.min = w & 0xFFF;
  r.max = (w >> 12) & 0xFFF;
  r.modifier = static_cast<Modifier>((w >> 24) & 0x3);
  std::int64_t off = (w >> 26) & 0x3F;
  r.offset = off >= 32 ? off - 64 : off;
  return r;
}

/// Full scaler descriptor: one field word and one mapping word.
inline std::array<std::uint32_t, 2> pack_scaler(const RegisterFieldDescriptor& field, const RangeMapping& range) {
  return {pack_field(field), pack_range(range)};
}

/// Static, immutable description of one clock node.
struct ClockDescriptor {
  ClockId id;
  std::string name;
  ClockKind kind = ClockKind::Source;
  CapabilitySet caps;
  ClockTech tech = ClockTech::Generic;
  ScaleOp op = ScaleOp::None;
  RegisterFieldDescriptor field;
  ValueMapping mapping;
  std::vector<ClockId> parent_options;
  std::optional<Hz> source_frequency;
};

/// Logical configuration state of one clock instance.
struct TopologyEntry {
  ClockId clock;
  std::optional<ClockId> parent;
  std::optional<std::int64_t> scale;
  bool enabled = true;
  friend bool operator==(const TopologyEntry&, const TopologyEntry&) = default;
};

inline std::string_view kind_name(ClockKind k) {
  switch (k) {
    case ClockKind::Source: return "source";
    case ClockKind::Gate: return "gate";
    case ClockKind::Mux: return "mux";
    case ClockKind::Scaler: return "scaler";
    case ClockKind::Consumer: return "consumer";
  }
  return "?";
}

}  // namespace clktree
