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

#include <stdexcept>
#include <string>
#include <string_view>

namespace clktree {

enum class Errc {
  OutOfDomain,
  UnknownRegisterValue,
  FieldOverflow,
  BadRegisterIndex,
  ValueTooWide,
  UnknownPlatform,
  UnknownClock,
  InvalidModel,
  ClockDisabled,
  Unconfigured,
  DivisionInexact,
  NotCapable,
  NotOnTheFly,
  ConstraintViolation,
  NotACandidate,
  ParentNotReady,
  GateInUse,
  Unreachable,
  Vetoed,
  ReadyTimeout,
  Reentrant,
  NoData,
  ZeroBusy,
  InsufficientFrequencies,
  NotAssessed,
  UnknownScenario,
  PayloadTooLarge,
  InvalidArgument,
};

constexpr std::string_view errc_name(Errc e) {
  switch (e) {
    case Errc::OutOfDomain: return "OutOfDomain";
    case Errc::UnknownRegisterValue: return "UnknownRegisterValue";
    case Errc::FieldOverflow: return "FieldOverflow";
    case Errc::BadRegisterIndex: return "BadRegisterIndex";
    case Errc::ValueTooWide: return "ValueTooWide";
    case Errc::UnknownPlatform: return "UnknownPlatform";
    case Errc::UnknownClock: return "UnknownClock";
    case Errc::InvalidModel: return "InvalidModel";
    case Errc::ClockDisabled: return "ClockDisabled";
    case Errc::Unconfigured: return "Unconfigured";
    case Errc::DivisionInexact: return "DivisionInexact";
    case Errc::NotCapable: return "NotCapable";
    case Errc::NotOnTheFly: return "NotOnTheFly";
    case Errc::ConstraintViolation: return "ConstraintViolation";
    case Errc::NotACandidate: return "NotACandidate";
    case Errc::ParentNotReady: return "ParentNotReady";
    case Errc::GateInUse: return "GateInUse";
    case Errc::Unreachable: return "Unreachable";
    case Errc::Vetoed: return "Vetoed";
    case Errc::ReadyTimeout: return "ReadyTimeout";
    case Errc::Reentrant: return "Reentrant";
    case Errc::NoData: return "NoData";
    case Errc::ZeroBusy: return "ZeroBusy";
    case Errc::InsufficientFrequencies: return "InsufficientFrequencies";
    case Errc::NotAssessed: return "NotAssessed";
    case Errc::UnknownScenario: return "UnknownScenario";
    case Errc::PayloadTooLarge: return "PayloadTooLarge";
    case Errc::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

/// Domain error carrying a stable, machine-readable code.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  Errc code() const noexcept { return code_; }
  std::string_view name() const noexcept { return errc_name(code_); }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace clktree
