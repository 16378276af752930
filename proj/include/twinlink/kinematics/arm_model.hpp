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

#include <string>
#include <vector>

#include <Eigen/Core>

#include "twinlink/kinematics/pose.hpp"

namespace twinlink {

// Revolute joint. The joint frame is parent_link * parent_offset; the joint
// rotates about `axis` expressed in that frame.
struct JointSpec {
  std::string name;
  Posed parent_offset;
  Eigen::Vector3d axis = Eigen::Vector3d::UnitZ();
  double lower_limit = 0.0;
  double upper_limit = 0.0;
  double max_velocity = 1.0;
};

// Link indices: 0 is the fixed base, link i (1..n) is the body moved by
// joint i-1.
struct CollisionSphere {
  int link_index = 0;
  Eigen::Vector3d local_offset = Eigen::Vector3d::Zero();
  double radius = 0.0;
};

struct ArmModel {
  std::string name;
  std::vector<JointSpec> joints;
  std::vector<CollisionSphere> spheres;
  // Relative to the last link: the tracked point between the fingers.
  Posed control_point_offset;
  Eigen::VectorXd home_configuration;

  int joint_count() const { return static_cast<int>(joints.size()); }
  int link_count() const { return joint_count() + 1; }
  Eigen::VectorXd lower_limits() const;
  Eigen::VectorXd upper_limits() const;
};

// Throws ValidationError naming the first violated invariant.
void Validate(const ArmModel& model);

struct JointState {
  Eigen::VectorXd positions;
  Eigen::VectorXd velocities;
  double timestamp = 0.0;

  static JointState AtRest(const Eigen::VectorXd& q, double t = 0.0) {
    return JointState{q, Eigen::VectorXd::Zero(q.size()), t};
  }
};

// Componentwise clamp into [lower, upper]. Idempotent.
Eigen::VectorXd ClampJoints(const ArmModel& model, const Eigen::VectorXd& q);

// Moves `candidate` toward `previous` so that |candidate - previous| / dt <=
// cap holds exactly as evaluated in floating point.
double LimitIncrement(double previous, double candidate, double cap, double dt);

}  // namespace twinlink
