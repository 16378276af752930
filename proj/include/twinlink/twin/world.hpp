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

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "twinlink/kinematics/pose.hpp"

namespace twinlink {

enum class SupportKind { kTable, kOnCube, kGrasped, kFalling };

struct Support {
  SupportKind kind = SupportKind::kTable;
  int cube_id = -1;  // valid for kOnCube

  static Support Table() { return {SupportKind::kTable, -1}; }
  static Support OnCube(int id) { return {SupportKind::kOnCube, id}; }
  static Support Grasped() { return {SupportKind::kGrasped, -1}; }
  static Support Falling() { return {SupportKind::kFalling, -1}; }
  bool operator==(const Support&) const = default;
};

struct Cube {
  int id = 0;
  Posed pose;
  double side = 0.05;
  bool attached = false;
  Support support;

  // Settle-model bookkeeping.
  double fall_speed = 0.0;
  bool awaiting_outcome = false;  // released from the gripper, not yet settled
  bool tumbled = false;
  bool was_stacked = false;       // resting on a cube when it started falling
  Eigen::Vector3d rest_position = Eigen::Vector3d::Zero();
  Posed grasp_offset;             // control point -> cube while grasped
};

struct StackZone {
  Eigen::Vector3d center = Eigen::Vector3d::Zero();
  double half_extent = 0.035;

  bool Contains(const Eigen::Vector3d& p) const {
    return std::abs(p.x() - center.x()) <= half_extent &&
           std::abs(p.y() - center.y()) <= half_extent;
  }
};

// Square zone whose side is 2 cm longer than the cube's.
StackZone MakeStackZone(const Eigen::Vector3d& center, double cube_side);

struct GripperState {
  double aperture = 0.10;
  double commanded_aperture = 0.10;
  double max_aperture = 0.10;
  bool force_capped = false;
};

enum class EventKind { kPick, kPlace, kDrop, kCollapse, kTowerComplete, kReset };

std::string_view ToString(EventKind kind);
std::optional<EventKind> EventKindFromString(std::string_view name);

struct TaskEvent {
  EventKind kind = EventKind::kReset;
  std::optional<int> cube_id;
  double timestamp = 0.0;
  bool operator==(const TaskEvent&) const = default;
};

struct TaskConfig {
  // Cube centers on the table plane (z is ignored; cubes rest at side/2).
  std::array<Eigen::Vector3d, 3> triangle_vertices{};
  Eigen::Vector3d zone_center = Eigen::Vector3d::Zero();
  double cube_side = 0.05;
  double session_duration = 600.0;
  double training_duration = 300.0;
  double max_aperture = 0.10;
  double finger_speed = 0.2;   // m/s
  double capture_scale = 1.5;  // capture box edge, in cube sides
};

// Front vertex at 95% of `max_reach` on +x, the other two 0.25 m behind and
// 0.20 m to either side; zone at the triangle centroid.
TaskConfig DefaultTaskConfig(double max_reach);

// Throws ValidationError for overlapping vertices or non-positive sizes.
void Validate(const TaskConfig& config);

struct WorldState {
  TaskConfig config;
  std::vector<Cube> cubes;
  StackZone zone;
  GripperState gripper;
  Posed control_point;
  double time = 0.0;
  std::vector<TaskEvent> events;
  bool tower_reported = false;

  const Cube* grasped() const;
};

struct TowerStatus {
  bool complete = false;
  std::optional<TaskEvent> event;
};

// Three cubes resting on their triangle vertices, an open gripper, and a
// Reset event at t = 0.
WorldState SpawnTask(const TaskConfig& config);

// Moves the fingers toward `commanded_aperture` at the configured finger
// speed. Closing onto an unattached cube inside the capture box stops the
// fingers at the cube side and grasps it; opening past the side releases it.
// Returned events are also appended to world.events.
std::vector<TaskEvent> UpdateGripper(WorldState& world, double commanded_aperture,
                                     const Posed& control_point, double dt);

// Advances the clock by dt: the grasped cube follows the control point,
// unsupported cubes fall and settle, outcomes are emitted.
std::vector<TaskEvent> PhysicsStep(WorldState& world, double dt);

// Checks for a complete three-cube tower in the zone. Emits TowerComplete
// once per completion.
TowerStatus DetectTower(WorldState& world);

// Returns cubes to their vertices and opens the gripper, keeping the event
// history. A pick still in progress is closed out with a Drop first.
void ResetTask(WorldState& world);

}  // namespace twinlink
