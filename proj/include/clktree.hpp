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

#include "clktree/clock_model.hpp"
#include "clktree/configurator.hpp"
#include "clktree/dvfs.hpp"
#include "clktree/energy.hpp"
#include "clktree/error.hpp"
#include "clktree/platform.hpp"
#include "clktree/platform_json.hpp"
#include "clktree/platforms.hpp"
#include "clktree/register_file.hpp"
#include "clktree/report.hpp"
#include "clktree/scenarios.hpp"
#include "clktree/simkernel.hpp"
#include "clktree/transitions.hpp"
