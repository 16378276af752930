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

#include <vector>

#include <Eigen/Core>

#include "twinlink/app/scenario.hpp"
#include "twinlink/control_io/input.hpp"

namespace twinlink {

struct ScriptOptions {
  double sample_rate = 60.0;       // Hz
  double travel_speed = 0.12;      // m/s along straight segments
  double min_move_time = 0.6;      // s
  double carry_height = 0.20;      // control point height while moving between spots
  double approach_height = 0.12;   // control point height above a cube before descending
  double settle_time = 1.5;        // hold after every descent
  double grip_time = 1.0;          // hold after closing or opening the fingers
  double place_gap = 0.006;        // release height above the resting height
  double start_hold = 1.0;
};

// Scripted operator for the stacking task: picks the three cubes in vertex
// order and stacks them in the zone. Device poses are expressed so that the
// first sample, at the device origin, calibrates onto the arm's rest target.
std::vector<RawPoseSample> ScriptTowerDemo(const Scenario& scenario,
                                           const ScriptOptions& options = {});

// Drives the target from rest to `goal` (robot frame) in `approach_time`
// seconds and holds it there until `duration`. Grip stays open.
std::vector<RawPoseSample> ScriptReachAndHold(const Scenario& scenario,
                                              const Eigen::Vector3d& goal,
                                              double approach_time, double duration,
                                              double sample_rate = 60.0);

}  // namespace twinlink
