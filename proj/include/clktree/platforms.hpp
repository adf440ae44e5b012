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

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "clktree/error.hpp"
#include "clktree/platform.hpp"
#include "clktree/platforms/vpa.hpp"
#include "clktree/platforms/vpb.hpp"

namespace clktree {

inline std::vector<std::string> platform_names() { return {"vpa", "vpb"}; }

/// Built-in platforms are constructed once and shared read-only.
inline std::shared_ptr<const PlatformModel> get_platform(std::string_view name) {
  static const auto vpa = std::make_shared<const PlatformModel>(platforms::make_vpa());
  static const auto vpb = std::make_shared<const PlatformModel>(platforms::make_vpb());
  if (name == "vpa") return vpa;
  if (name == "vpb") return vpb;
  fail(Errc::UnknownPlatform, "unknown platform '" + std::string(name) + "'");
}

}  // namespace clktree
