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

#include <cmath>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace twinlink {

template <typename Scalar>
using Vector3 = Eigen::Matrix<Scalar, 3, 1>;

template <typename Scalar>
using Vector6 = Eigen::Matrix<Scalar, 6, 1>;

// Rigid transform: translation followed by a unit-quaternion rotation.
//
// Every composition renormalizes the quaternion so that long chains of
// products (a ten-minute session at 120 Hz is ~7e4 compositions per link)
// keep |q| within 1e-9 of one.
template <typename Scalar>
struct Pose {
  Vector3<Scalar> position = Vector3<Scalar>::Zero();
  Eigen::Quaternion<Scalar> orientation = Eigen::Quaternion<Scalar>::Identity();

  Pose() = default;
  Pose(const Vector3<Scalar>& p, const Eigen::Quaternion<Scalar>& q)
      : position(p), orientation(q.normalized()) {}

  static Pose Identity() { return Pose(); }
  static Pose FromTranslation(const Vector3<Scalar>& p) {
    return Pose(p, Eigen::Quaternion<Scalar>::Identity());
  }
  static Pose FromRotation(const Eigen::Quaternion<Scalar>& q) {
    return Pose(Vector3<Scalar>::Zero(), q);
  }

  // Roll-pitch-yaw about fixed x, y, z axes (URDF convention).
  static Pose FromXyzRpy(const Vector3<Scalar>& xyz, const Vector3<Scalar>& rpy) {
    const Eigen::Quaternion<Scalar> q =
        Eigen::AngleAxis<Scalar>(rpy.z(), Vector3<Scalar>::UnitZ()) *
        Eigen::AngleAxis<Scalar>(rpy.y(), Vector3<Scalar>::UnitY()) *
        Eigen::AngleAxis<Scalar>(rpy.x(), Vector3<Scalar>::UnitX());
    return Pose(xyz, q);
  }

  Pose operator*(const Pose& rhs) const {
    Pose out;
    out.position = position + orientation * rhs.position;
    out.orientation = (orientation * rhs.orientation).normalized();
    return out;
  }

  Vector3<Scalar> operator*(const Vector3<Scalar>& point) const {
    return position + orientation * point;
  }

  Pose inverse() const {
    const Eigen::Quaternion<Scalar> inv = orientation.conjugate();
    Pose out;
    out.orientation = inv.normalized();
    out.position = -(inv * position);
    return out;
  }

  Eigen::Matrix<Scalar, 3, 3> rotation() const {
    return orientation.toRotationMatrix();
  }

  template <typename Other>
  Pose<Other> cast() const {
    return Pose<Other>(position.template cast<Other>(),
                       orientation.template cast<Other>());
  }
};

using Posed = Pose<double>;

// Rotation vector (axis * angle, angle in [0, pi]) of a unit quaternion.
template <typename Scalar>
Vector3<Scalar> QuaternionLog(const Eigen::Quaternion<Scalar>& q_in) {
  Eigen::Quaternion<Scalar> q = q_in.normalized();
  if (q.w() < Scalar(0)) q.coeffs() = -q.coeffs();
  const Vector3<Scalar> v = q.vec();
  const Scalar s = v.norm();
  if (s < Scalar(1e-12)) {
    // Small-angle limit: log(q) ~ 2 v.
    return Scalar(2) * v;
  }
  const Scalar angle = Scalar(2) * std::atan2(s, q.w());
  return v * (angle / s);
}

// Orientation error that rotates `from` onto `to`, expressed in the world
// frame: log(to * from^-1).
template <typename Scalar>
Vector3<Scalar> OrientationError(const Eigen::Quaternion<Scalar>& to,
                                 const Eigen::Quaternion<Scalar>& from) {
  return QuaternionLog<Scalar>(to * from.conjugate());
}

}  // namespace twinlink
