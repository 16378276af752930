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

#include "twinlink/app/scripted.hpp"

#include <algorithm>
#include <cmath>

#include "twinlink/kinematics/forward_kinematics.hpp"

namespace twinlink {
namespace {

// Quintic time scaling with zero boundary velocity and acceleration.
double MinJerk(double s) {
  s = std::clamp(s, 0.0, 1.0);
  return s * s * s * (10.0 + s * (-15.0 + 6.0 * s));
}

class Script {
 public:
  Script(const Posed& rest, double sample_rate)
      : rest_(rest), dt_(1.0 / sample_rate), position_(rest.position) {}

  void Hold(double seconds) { Emit(position_, position_, seconds); }

  void MoveTo(const Eigen::Vector3d& p, double speed, double min_time) {
    const double seconds = std::max(min_time, (p - position_).norm() / speed);
    Emit(position_, p, seconds);
    position_ = p;
  }

  void SetGrip(double grip) { grip_ = grip; }
  const Eigen::Vector3d& position() const { return position_; }
  std::vector<RawPoseSample> Take() { return std::move(samples_); }

 private:
  void Emit(const Eigen::Vector3d& from, const Eigen::Vector3d& to, double seconds) {
    const int steps = std::max(1, static_cast<int>(std::lround(seconds / dt_)));
    for (int k = 0; k < steps; ++k) {
      const double s = MinJerk(static_cast<double>(k + 1) / steps);
      Push(from + s * (to - from));
    }
  }

  void Push(const Eigen::Vector3d& p) {
    RawPoseSample sample;
    sample.timestamp = static_cast<double>(samples_.size()) * dt_;
    sample.device_pose = rest_.inverse() * Posed(p, rest_.orientation);
    sample.grip = grip_;
    samples_.push_back(sample);
  }

  Posed rest_;
  double dt_;
  Eigen::Vector3d position_;
  double grip_ = 0.0;
  std::vector<RawPoseSample> samples_;
};

Posed RestTarget(const Scenario& scenario) {
  return ForwardKinematics(scenario.arm, scenario.arm.home_configuration).control_point;
}

}  // namespace

std::vector<RawPoseSample> ScriptTowerDemo(const Scenario& scenario,
                                           const ScriptOptions& o) {
  Script script(RestTarget(scenario), o.sample_rate);
  const double side = scenario.task.cube_side;
  const Eigen::Vector3d zone = scenario.task.zone_center;
  auto at = [](const Eigen::Vector3d& xy, double z) {
    return Eigen::Vector3d(xy.x(), xy.y(), z);
  };

  script.Hold(o.start_hold);
  for (int level = 0; level < 3; ++level) {
    const Eigen::Vector3d& cube = scenario.task.triangle_vertices[level];
    script.MoveTo(at(cube, script.position().z()), o.travel_speed, o.min_move_time);
    script.MoveTo(at(cube, o.approach_height), o.travel_speed, o.min_move_time);
    script.MoveTo(at(cube, side / 2), o.travel_speed, o.min_move_time);
    script.Hold(o.settle_time);
    script.SetGrip(1.0);
    script.Hold(o.grip_time);
    script.MoveTo(at(cube, o.carry_height), o.travel_speed, o.min_move_time);
    script.MoveTo(at(zone, o.carry_height), o.travel_speed, o.min_move_time);
    script.MoveTo(at(zone, side / 2 + level * side + o.place_gap), o.travel_speed,
                  o.min_move_time);
    script.Hold(o.settle_time);
    script.SetGrip(0.0);
    script.Hold(o.grip_time);
    script.MoveTo(at(zone, o.carry_height), o.travel_speed, o.min_move_time);
  }
  script.MoveTo(RestTarget(scenario).position, o.travel_speed, o.min_move_time);
  script.Hold(o.start_hold);
  return script.Take();
}

std::vector<RawPoseSample> ScriptReachAndHold(const Scenario& scenario,
                                              const Eigen::Vector3d& goal,
                                              double approach_time, double duration,
                                              double sample_rate) {
  Script script(RestTarget(scenario), sample_rate);
  script.Hold(1.0 / sample_rate);
  script.MoveTo(goal, 1e9, approach_time);
  script.Hold(std::max(0.0, duration - approach_time - 1.0 / sample_rate));
  return script.Take();
}

}  // namespace twinlink
