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

#include "twinlink/kinematics/arm_model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "twinlink/errors.hpp"
#include "twinlink/kinematics/forward_kinematics.hpp"

namespace twinlink {

namespace {

constexpr double kUnitTolerance = 1e-9;

[[noreturn]] void Fail(const std::string& what) { throw ValidationError(what); }

}  // namespace

Eigen::VectorXd ArmModel::lower_limits() const {
  Eigen::VectorXd out(joint_count());
  for (int j = 0; j < joint_count(); ++j) out(j) = joints[j].lower_limit;
  return out;
}

Eigen::VectorXd ArmModel::upper_limits() const {
  Eigen::VectorXd out(joint_count());
  for (int j = 0; j < joint_count(); ++j) out(j) = joints[j].upper_limit;
  return out;
}

void Validate(const ArmModel& model) {
  if (model.joints.empty()) Fail("arm must have at least 1 joint");
  for (const JointSpec& joint : model.joints) {
    const std::string who = "joint '" + joint.name + "': ";
    if (!(joint.lower_limit <= joint.upper_limit)) {
      std::ostringstream msg;
      msg << who << "lower_limit " << joint.lower_limit << " > upper_limit "
          << joint.upper_limit;
      Fail(msg.str());
    }
    if (std::abs(joint.axis.norm() - 1.0) > kUnitTolerance) {
      Fail(who + "axis must have unit norm");
    }
    if (!(joint.max_velocity > 0.0)) Fail(who + "max_velocity must be > 0");
    if (std::abs(joint.parent_offset.orientation.norm() - 1.0) > kUnitTolerance) {
      Fail(who + "parent offset quaternion must have unit norm");
    }
  }
  for (std::size_t i = 0; i < model.spheres.size(); ++i) {
    const CollisionSphere& s = model.spheres[i];
    const std::string who = "sphere " + std::to_string(i) + ": ";
    if (!(s.radius > 0.0)) Fail(who + "radius must be > 0");
    if (s.link_index < 0 || s.link_index >= model.link_count()) {
      Fail(who + "link_index " + std::to_string(s.link_index) +
           " must be < number of links (" + std::to_string(model.link_count()) + ")");
    }
  }
  if (model.home_configuration.size() != model.joint_count()) {
    Fail("home configuration has " + std::to_string(model.home_configuration.size()) +
         " entries, expected " + std::to_string(model.joint_count()));
  }
  for (int j = 0; j < model.joint_count(); ++j) {
    const double h = model.home_configuration(j);
    if (h < model.joints[j].lower_limit || h > model.joints[j].upper_limit) {
      Fail("home configuration of joint '" + model.joints[j].name +
           "' lies outside its limits");
    }
  }
}

Eigen::VectorXd ClampJoints(const ArmModel& model, const Eigen::VectorXd& q) {
  detail::CheckJointVector(model, q.size());
  return q.cwiseMax(model.lower_limits()).cwiseMin(model.upper_limits());
}

double LimitIncrement(double previous, double candidate, double cap, double dt) {
  if (std::abs(candidate - previous) / dt <= cap) return candidate;
  const double max_step = cap * dt;
  double out = previous + std::clamp(candidate - previous, -max_step, max_step);
  while (std::abs(out - previous) / dt > cap) out = std::nextafter(out, previous);
  return out;
}

}  // namespace twinlink
