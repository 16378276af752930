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

#include "twinlink/errors.hpp"
#include "twinlink/kinematics/arm_model.hpp"
#include "twinlink/kinematics/pose.hpp"

namespace twinlink {

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using Matrix6X = Eigen::Matrix<Scalar, 6, Eigen::Dynamic>;

template <typename Scalar>
struct FkResult {
  // link_poses[0] is the base (identity); link_poses[i] follows joint i-1.
  std::vector<Pose<Scalar>> link_poses;
  Pose<Scalar> control_point;
};

// A point rigidly attached to a link.
struct LinkPoint {
  int link_index = 0;
  Eigen::Vector3d local_offset = Eigen::Vector3d::Zero();
};

namespace detail {

inline void CheckJointVector(const ArmModel& model, Eigen::Index size) {
  if (size != model.joint_count()) {
    throw DimensionError("joint vector has " + std::to_string(size) +
                         " entries, model '" + model.name + "' has " +
                         std::to_string(model.joint_count()) + " joints");
  }
}

template <typename Scalar>
Pose<Scalar> JointFrame(const Pose<Scalar>& parent, const JointSpec& joint) {
  return parent * joint.parent_offset.template cast<Scalar>();
}

}  // namespace detail

template <typename Derived>
FkResult<typename Derived::Scalar> ForwardKinematics(
    const ArmModel& model, const Eigen::MatrixBase<Derived>& q) {
  using Scalar = typename Derived::Scalar;
  detail::CheckJointVector(model, q.size());
  FkResult<Scalar> out;
  out.link_poses.reserve(model.link_count());
  out.link_poses.push_back(Pose<Scalar>::Identity());
  for (int j = 0; j < model.joint_count(); ++j) {
    const JointSpec& joint = model.joints[j];
    const Eigen::Quaternion<Scalar> spin(
        Eigen::AngleAxis<Scalar>(q(j), joint.axis.template cast<Scalar>()));
    out.link_poses.push_back(detail::JointFrame(out.link_poses.back(), joint) *
                             Pose<Scalar>::FromRotation(spin));
  }
  out.control_point =
      out.link_poses.back() * model.control_point_offset.template cast<Scalar>();
  return out;
}

// World position of a link-attached point, given precomputed link poses.
template <typename Scalar>
Vector3<Scalar> PointPosition(const FkResult<Scalar>& fk, const LinkPoint& point) {
  return fk.link_poses.at(point.link_index) *
         Vector3<Scalar>(point.local_offset.template cast<Scalar>());
}

// Jacobian of an arbitrary world point rigidly attached to `link_index`,
// reusing link poses from a prior FK pass.
template <typename Scalar>
Matrix6X<Scalar> Jacobian(const ArmModel& model, const FkResult<Scalar>& fk,
                          int link_index, const Vector3<Scalar>& world_point) {
  Matrix6X<Scalar> jac = Matrix6X<Scalar>::Zero(6, model.joint_count());
  for (int j = 0; j < link_index; ++j) {
    const JointSpec& joint = model.joints[j];
    const Pose<Scalar> frame = detail::JointFrame(fk.link_poses[j], joint);
    const Vector3<Scalar> axis =
        frame.orientation * Vector3<Scalar>(joint.axis.template cast<Scalar>());
    jac.template block<3, 1>(0, j) = axis.cross(world_point - frame.position);
    jac.template block<3, 1>(3, j) = axis;
  }
  return jac;
}

// Geometric Jacobian of a link point: rows 0-2 linear velocity, rows 3-5
// angular velocity, both in the world frame. Columns of joints that do not
// move the point's link are zero.
template <typename Derived>
Matrix6X<typename Derived::Scalar> Jacobian(const ArmModel& model,
                                            const Eigen::MatrixBase<Derived>& q,
                                            const LinkPoint& point) {
  using Scalar = typename Derived::Scalar;
  detail::CheckJointVector(model, q.size());
  if (point.link_index < 0 || point.link_index >= model.link_count()) {
    throw DimensionError("link index " + std::to_string(point.link_index) +
                         " out of range for " + std::to_string(model.link_count()) +
                         " links");
  }
  const FkResult<Scalar> fk = ForwardKinematics(model, q);
  return Jacobian(model, fk, point.link_index,
                  PointPosition(fk, point));
}

// Jacobian of the control point.
template <typename Scalar>
Matrix6X<Scalar> ControlPointJacobian(const ArmModel& model, const FkResult<Scalar>& fk) {
  return Jacobian(model, fk, model.link_count() - 1, fk.control_point.position);
}

}  // namespace twinlink
