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

#include "twinlink/twin/world.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "twinlink/errors.hpp"

namespace twinlink {

namespace {

constexpr double kGravity = 9.81;
constexpr double kContactTolerance = 1e-9;
constexpr double kStackOverlap = 0.5;  // fraction of the side

Eigen::Quaterniond YawOnly(const Eigen::Quaterniond& q) {
  const Eigen::Vector3d x = q * Eigen::Vector3d::UnitX();
  const double yaw = std::atan2(x.y(), x.x());
  return Eigen::Quaterniond(Eigen::AngleAxisd(yaw, Eigen::Vector3d::UnitZ()));
}

Posed SpawnPose(const TaskConfig& config, int index) {
  const Eigen::Vector3d& v = config.triangle_vertices[index];
  return Posed::FromTranslation({v.x(), v.y(), config.cube_side / 2});
}

Cube* FindCube(WorldState& world, int id) {
  for (Cube& c : world.cubes) {
    if (c.id == id) return &c;
  }
  return nullptr;
}

void Emit(WorldState& world, std::vector<TaskEvent>& out, EventKind kind,
          std::optional<int> cube) {
  TaskEvent e{kind, cube, world.time};
  world.events.push_back(e);
  out.push_back(e);
}

bool InCaptureBox(const Cube& cube, const Posed& control_point, double half_box) {
  const Eigen::Vector3d d = cube.pose.position - control_point.position;
  return d.cwiseAbs().maxCoeff() <= half_box;
}

bool IsResting(const Cube& c) {
  return c.support.kind == SupportKind::kTable || c.support.kind == SupportKind::kOnCube;
}

void StartFalling(Cube& cube) {
  cube.was_stacked = cube.support.kind == SupportKind::kOnCube;
  cube.support = Support::Falling();
  cube.attached = false;
  cube.fall_speed = 0.0;
}

// Any resting cube whose supporter is no longer resting starts to fall.
void PropagateSupportLoss(WorldState& world) {
  bool changed = true;
  while (changed) {
    changed = false;
    for (Cube& c : world.cubes) {
      if (c.support.kind != SupportKind::kOnCube) continue;
      const Cube* below = FindCube(world, c.support.cube_id);
      if (below == nullptr || !IsResting(*below)) {
        StartFalling(c);
        changed = true;
      }
    }
  }
}

// Unit step along the dominant horizontal axis of `d` (x wins ties).
Eigen::Vector3d DominantAxis(const Eigen::Vector3d& d) {
  if (std::abs(d.x()) >= std::abs(d.y())) {
    return {d.x() >= 0 ? 1.0 : -1.0, 0.0, 0.0};
  }
  return {0.0, d.y() >= 0 ? 1.0 : -1.0, 0.0};
}

// Knocks `struck` (and everything stacked on it) sideways by one side.
void Knock(WorldState& world, Cube& struck, const Eigen::Vector3d& direction) {
  std::vector<int> chain{struck.id};
  for (bool grew = true; grew;) {
    grew = false;
    for (const Cube& c : world.cubes) {
      if (c.support.kind == SupportKind::kOnCube && c.support.cube_id == chain.back()) {
        chain.push_back(c.id);
        grew = true;
        break;
      }
    }
  }
  for (int id : chain) {
    Cube* c = FindCube(world, id);
    StartFalling(*c);
    c->pose.position += direction * c->side;
  }
}

void Settle(WorldState& world, Cube& cube, Support support, double z,
            std::vector<TaskEvent>& out) {
  cube.pose.position.z() = z;
  cube.pose.orientation = YawOnly(cube.pose.orientation);
  cube.support = support;
  cube.fall_speed = 0.0;
  if (cube.awaiting_outcome) {
    const bool placed = !cube.tumbled && world.zone.Contains(cube.pose.position);
    Emit(world, out, placed ? EventKind::kPlace : EventKind::kDrop, cube.id);
  } else if (cube.was_stacked &&
             (cube.pose.position - cube.rest_position).norm() > cube.side / 2) {
    Emit(world, out, EventKind::kCollapse, cube.id);
  }
  cube.awaiting_outcome = false;
  cube.tumbled = false;
  cube.was_stacked = false;
  cube.rest_position = cube.pose.position;
}

void Fall(WorldState& world, Cube& cube, double dt, std::vector<TaskEvent>& out) {
  const double half = cube.side / 2;
  // A tumbling cube can be pushed off several supports in one tick; each
  // push moves it strictly outward, so the loop terminates.
  for (int guard = 0; guard < 8; ++guard) {
    const double bottom_before = cube.pose.position.z() - half;
    double surface = 0.0;
    Cube* support = nullptr;
    for (Cube& other : world.cubes) {
      if (other.id == cube.id || !IsResting(other)) continue;
      const Eigen::Vector3d d = cube.pose.position - other.pose.position;
      // Edge-to-edge contact is not support.
      const double reach = cube.side - kContactTolerance;
      if (std::abs(d.x()) >= reach || std::abs(d.y()) >= reach) continue;
      const double top = other.pose.position.z() + other.side / 2;
      if (top > bottom_before + kContactTolerance) continue;
      if (top > surface) {
        surface = top;
        support = &other;
      }
    }
    if (guard == 0) {
      cube.fall_speed += kGravity * dt;
      cube.pose.position.z() -= cube.fall_speed * dt;
    }
    if (cube.pose.position.z() - half > surface) return;  // still airborne
    if (support == nullptr) {
      Settle(world, cube, Support::Table(), half, out);
      return;
    }
    const Eigen::Vector3d d = cube.pose.position - support->pose.position;
    const double overlap =
        std::min(cube.side - std::abs(d.x()), cube.side - std::abs(d.y())) / cube.side;
    if (overlap >= kStackOverlap) {
      Settle(world, cube, Support::OnCube(support->id), surface + half, out);
      return;
    }
    // Tumble: slide off the support's edge and keep falling.
    const Eigen::Vector3d away = DominantAxis(d);
    if (support->support.kind == SupportKind::kOnCube) Knock(world, *support, -away);
    cube.tumbled = true;
    cube.pose.position.z() = std::max(surface + half, half);
    cube.pose.position += away * cube.side;
    PropagateSupportLoss(world);
  }
}

}  // namespace

StackZone MakeStackZone(const Eigen::Vector3d& center, double cube_side) {
  return StackZone{Eigen::Vector3d(center.x(), center.y(), 0.0), (cube_side + 0.02) / 2};
}

std::string_view ToString(EventKind kind) {
  switch (kind) {
    case EventKind::kPick: return "Pick";
    case EventKind::kPlace: return "Place";
    case EventKind::kDrop: return "Drop";
    case EventKind::kCollapse: return "Collapse";
    case EventKind::kTowerComplete: return "TowerComplete";
    case EventKind::kReset: return "Reset";
  }
  return "?";
}

std::optional<EventKind> EventKindFromString(std::string_view name) {
  for (EventKind k : {EventKind::kPick, EventKind::kPlace, EventKind::kDrop,
                      EventKind::kCollapse, EventKind::kTowerComplete, EventKind::kReset}) {
    if (ToString(k) == name) return k;
  }
  return std::nullopt;
}

TaskConfig DefaultTaskConfig(double max_reach) {
  TaskConfig config;
  const double front = 0.95 * max_reach;
  config.triangle_vertices = {Eigen::Vector3d(front, 0.0, 0.0),
                              Eigen::Vector3d(front - 0.25, 0.20, 0.0),
                              Eigen::Vector3d(front - 0.25, -0.20, 0.0)};
  config.zone_center = (config.triangle_vertices[0] + config.triangle_vertices[1] +
                        config.triangle_vertices[2]) / 3.0;
  return config;
}

void Validate(const TaskConfig& config) {
  if (!(config.cube_side > 0.0)) throw ValidationError("cube_side must be > 0");
  if (!(config.session_duration > 0.0) || !(config.training_duration > 0.0)) {
    throw ValidationError("session and training durations must be > 0");
  }
  if (!(config.max_aperture > config.cube_side)) {
    throw ValidationError("max_aperture must exceed cube_side");
  }
  if (!(config.finger_speed > 0.0) || !(config.capture_scale > 0.0)) {
    throw ValidationError("finger_speed and capture_scale must be > 0");
  }
  for (int i = 0; i < 3; ++i) {
    for (int j = i + 1; j < 3; ++j) {
      const Eigen::Vector2d d =
          (config.triangle_vertices[i] - config.triangle_vertices[j]).head<2>();
      if (d.norm() < config.cube_side) {
        throw ValidationError("triangle vertices " + std::to_string(i) + " and " +
                              std::to_string(j) + " overlap within one cube side");
      }
    }
  }
}

const Cube* WorldState::grasped() const {
  for (const Cube& c : cubes) {
    if (c.support.kind == SupportKind::kGrasped) return &c;
  }
  return nullptr;
}

WorldState SpawnTask(const TaskConfig& config) {
  Validate(config);
  WorldState world;
  world.config = config;
  world.zone = MakeStackZone(config.zone_center, config.cube_side);
  world.gripper.max_aperture = config.max_aperture;
  world.gripper.aperture = config.max_aperture;
  world.gripper.commanded_aperture = config.max_aperture;
  for (int i = 0; i < 3; ++i) {
    Cube cube;
    cube.id = i;
    cube.side = config.cube_side;
    cube.pose = SpawnPose(config, i);
    cube.rest_position = cube.pose.position;
    world.cubes.push_back(cube);
  }
  world.events.push_back({EventKind::kReset, std::nullopt, 0.0});
  return world;
}

std::vector<TaskEvent> UpdateGripper(WorldState& world, double commanded_aperture,
                                     const Posed& control_point, double dt) {
  std::vector<TaskEvent> out;
  GripperState& g = world.gripper;
  world.control_point = control_point;
  const double command = std::clamp(commanded_aperture, 0.0, g.max_aperture);
  g.commanded_aperture = command;
  const double max_move = world.config.finger_speed * dt;
  const double previous = g.aperture;
  double next = previous + std::clamp(command - previous, -max_move, max_move);

  for (Cube& held : world.cubes) {
    if (held.support.kind != SupportKind::kGrasped) continue;
    next = std::max(next, held.side);
    g.force_capped = command < held.side;
    if (next > held.side) {
      held.awaiting_outcome = true;
      held.tumbled = false;
      StartFalling(held);
      held.was_stacked = false;
      g.force_capped = false;
    }
    g.aperture = next;
    return out;
  }

  g.force_capped = false;
  const bool outcome_pending =
      std::any_of(world.cubes.begin(), world.cubes.end(),
                  [](const Cube& c) { return c.awaiting_outcome; });
  if (next < previous && !outcome_pending) {
    Cube* target = nullptr;
    double best = std::numeric_limits<double>::infinity();
    for (Cube& c : world.cubes) {
      if (!IsResting(c) || previous < c.side || next > c.side) continue;
      if (!InCaptureBox(c, control_point, world.config.capture_scale * c.side / 2)) continue;
      const double dist = (c.pose.position - control_point.position).norm();
      if (dist < best) {
        best = dist;
        target = &c;
      }
    }
    if (target != nullptr) {
      next = target->side;
      target->was_stacked = target->support.kind == SupportKind::kOnCube;
      target->support = Support::Grasped();
      target->attached = true;
      target->fall_speed = 0.0;
      target->grasp_offset = control_point.inverse() * target->pose;
      g.force_capped = command < target->side;
      Emit(world, out, EventKind::kPick, target->id);
      PropagateSupportLoss(world);
    }
  }
  g.aperture = next;
  return out;
}

std::vector<TaskEvent> PhysicsStep(WorldState& world, double dt) {
  std::vector<TaskEvent> out;
  world.time += dt;
  for (Cube& c : world.cubes) {
    if (c.support.kind != SupportKind::kGrasped) continue;
    c.pose = world.control_point * c.grasp_offset;
    c.pose.position.z() = std::max(c.pose.position.z(), c.side / 2);
  }
  PropagateSupportLoss(world);
  // Lowest cubes first so that supports settle before what lands on them.
  std::vector<int> order(world.cubes.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return world.cubes[a].pose.position.z() < world.cubes[b].pose.position.z();
  });
  for (int index : order) {
    Cube& c = world.cubes[index];
    if (c.support.kind == SupportKind::kFalling) Fall(world, c, dt, out);
  }
  return out;
}

TowerStatus DetectTower(WorldState& world) {
  TowerStatus status;
  for (const Cube& bottom : world.cubes) {
    if (bottom.support.kind != SupportKind::kTable ||
        !world.zone.Contains(bottom.pose.position)) {
      continue;
    }
    int height = 1;
    int top = bottom.id;
    for (bool grew = true; grew;) {
      grew = false;
      for (const Cube& c : world.cubes) {
        if (c.support.kind == SupportKind::kOnCube && c.support.cube_id == top) {
          top = c.id;
          ++height;
          grew = true;
          break;
        }
      }
    }
    if (height >= 3) status.complete = true;
  }
  if (status.complete && !world.tower_reported) {
    status.event = TaskEvent{EventKind::kTowerComplete, std::nullopt, world.time};
    world.events.push_back(*status.event);
    world.tower_reported = true;
  } else if (!status.complete) {
    world.tower_reported = false;
  }
  return status;
}

void ResetTask(WorldState& world) {
  for (const Cube& c : world.cubes) {
    if (c.support.kind == SupportKind::kGrasped || c.awaiting_outcome) {
      world.events.push_back({EventKind::kDrop, c.id, world.time});
    }
  }
  for (int i = 0; i < static_cast<int>(world.cubes.size()); ++i) {
    Cube& cube = world.cubes[i];
    const int id = cube.id;
    cube = Cube{};
    cube.id = id;
    cube.side = world.config.cube_side;
    cube.pose = SpawnPose(world.config, i);
    cube.rest_position = cube.pose.position;
  }
  world.gripper.aperture = world.gripper.max_aperture;
  world.gripper.commanded_aperture = world.gripper.max_aperture;
  world.gripper.force_capped = false;
  world.tower_reported = false;
  world.events.push_back({EventKind::kReset, std::nullopt, world.time});
}

}  // namespace twinlink
