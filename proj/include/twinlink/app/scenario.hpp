// Copyright 2026 The twinlink Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "twinlink/bus/latency.hpp"
#include "twinlink/control_io/input.hpp"
#include "twinlink/kinematics/arm_model.hpp"
#include "twinlink/motion/policies.hpp"
#include "twinlink/twin/world.hpp"

namespace twinlink {

// Everything a session needs, loaded from one INI-style scenario file with
// sections [arm], [motion], [task], [latency], [workspace], [planes] and
// an optional [server].
struct Scenario {
  std::filesystem::path source;
  std::filesystem::path arm_path;
  ArmModel arm;
  MotionConfig motion;
  TaskConfig task;
  bus::LatencyConfig latency;
  WorkspaceBox workspace;
  std::vector<SafetyPlane> planes;
  std::vector<std::string> plane_names;
  double time_scale = 1.0;  // serve only: simulated seconds per wall second
  // Hash over the scenario text and the arm description text.
  std::uint64_t content_hash = 0;
};

Scenario LoadScenario(const std::filesystem::path& path);
Scenario ParseScenario(const std::string& text, const std::filesystem::path& base_dir);

// 64-bit FNV-1a.
std::uint64_t Fnv1a(std::string_view bytes, std::uint64_t seed = 0xcbf29ce484222325ULL);

}  // namespace twinlink
