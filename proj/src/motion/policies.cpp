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

#include "twinlink/motion/policies.hpp"

#include <algorithm>
#include <cmath>

#include "twinlink/errors.hpp"
#include "twinlink/kinematics/forward_kinematics.hpp"

namespace twinlink {

void Validate(const MotionConfig& cfg) {
  const double gains[] = {cfg.attractor_gain,     cfg.attractor_damping,
                          cfg.repulsion_gain,     cfg.repulsion_damping,
                          cfg.repulsion_lengthscale, cfg.jointlimit_gain,
                          cfg.jointlimit_margin,  cfg.joint_damping,
                          cfg.joint_damping_weight};
  for (double g : gains) {
    if (!(g >= 0.0)) throw ValidationError("motion gains must be >= 0");
  }
  if (!(cfg.tick_dt > 0.0)) throw ValidationError("tick_dt must be > 0");
  if (!(cfg.speed_cap > 0.0)) throw ValidationError("speed_cap must be > 0");
}

void Validate(const SafetyPlane& plane) {
  if (std::abs(plane.normal.norm() - 1.0) > 1e-9) {
    throw ValidationError("safety plane normal must have unit norm");
  }
  if (!(plane.margin >= 0.0)) throw ValidationError("safety plane margin must be >= 0");
}

double BarrierWeight(double distance, double margin) {
  if (!(margin > 0.0)) return 0.0;
  const double s = std::max(0.0, 1.0 - distance / margin);
  return s * s;
}

double BarrierMetric(double distance, double margin, double lengthscale) {
  const double w = BarrierWeight(distance, margin);
  if (w == 0.0) return 0.0;
  const double floor = lengthscale > 0.0 ? lengthscale : 1e-6;
  return w * margin / std::max(distance, floor);
}

TaskPolicyd AttractorPolicy(const Posed& current, const Vector6<double>& current_vel,
                            const Posed& target, const MotionConfig& cfg) {
  Vector6<double> error;
  error.head<3>() = target.position - current.position;
  error.tail<3>() = OrientationError(target.orientation, current.orientation);
  TaskPolicyd policy;
  policy.desired_accel = cfg.attractor_gain * error - cfg.attractor_damping * current_vel;
  policy.metric = Eigen::MatrixXd::Identity(6, 6);
  return policy;
}

double PlaneClearance(const Eigen::Vector3d& sphere_center, double sphere_radius,
                      const SafetyPlane& plane) {
  return plane.normal.dot(sphere_center) - plane.offset - sphere_radius;
}

TaskPolicyd PlanePolicy(const Eigen::Vector3d& sphere_center,
                        const Eigen::Vector3d& sphere_vel, double sphere_radius,
                        const SafetyPlane& plane, const MotionConfig& cfg) {
  const double d = PlaneClearance(sphere_center, sphere_radius, plane);
  const double w = BarrierWeight(d, plane.margin);
  const double approach = std::min(0.0, plane.normal.dot(sphere_vel));
  TaskPolicyd policy;
  policy.jacobian = plane.normal.transpose();
  policy.desired_accel = Eigen::VectorXd::Constant(
      1, w * (cfg.repulsion_gain - cfg.repulsion_damping * approach));
  policy.metric = Eigen::MatrixXd::Constant(
      1, 1, BarrierMetric(d, plane.margin, cfg.repulsion_lengthscale));
  return policy;
}

TaskPolicyd JointLimitPolicy(const Eigen::VectorXd& q, const Eigen::VectorXd& qdot,
                             const ArmModel& model, const MotionConfig& cfg) {
  const Eigen::Index n = model.joint_count();
  if (q.size() != n || qdot.size() != n) {
    throw DimensionError("joint limit policy: state size does not match the model");
  }
  TaskPolicyd policy;
  policy.jacobian = Eigen::MatrixXd::Identity(n, n);
  policy.desired_accel = Eigen::VectorXd::Zero(n);
  policy.metric = Eigen::MatrixXd::Zero(n, n);
  const double margin = cfg.jointlimit_margin;
  for (Eigen::Index j = 0; j < n; ++j) {
    const JointSpec& joint = model.joints[j];
    const double w_lower = BarrierWeight(q(j) - joint.lower_limit, margin);
    const double w_upper = BarrierWeight(joint.upper_limit - q(j), margin);
    policy.desired_accel(j) = cfg.jointlimit_gain * (w_lower - w_upper);
    policy.metric(j, j) = w_lower + w_upper;
  }
  return policy;
}

TaskPolicyd JointDampingPolicy(const Eigen::VectorXd& qdot, const MotionConfig& cfg) {
  const Eigen::Index n = qdot.size();
  TaskPolicyd policy;
  policy.jacobian = Eigen::MatrixXd::Identity(n, n);
  policy.desired_accel = -cfg.joint_damping * qdot;
  policy.metric = cfg.joint_damping_weight * Eigen::MatrixXd::Identity(n, n);
  return policy;
}

JointState Step(const ArmModel& model, const JointState& state, const Posed& target,
                const std::vector<SafetyPlane>& planes, const MotionConfig& cfg) {
  const Eigen::Index n = model.joint_count();
  if (state.positions.size() != n || state.velocities.size() != n) {
    throw DimensionError("joint state size does not match model '" + model.name + "'");
  }
  const Eigen::VectorXd& q = state.positions;
  const Eigen::VectorXd& qdot = state.velocities;
  const FkResult<double> fk = ForwardKinematics(model, q);

  std::vector<TaskPolicyd> policies;
  policies.reserve(2 + model.spheres.size() * planes.size() + 1);

  const Matrix6X<double> cp_jac = ControlPointJacobian(model, fk);
  TaskPolicyd attractor = AttractorPolicy(fk.control_point, cp_jac * qdot, target, cfg);
  attractor.jacobian = cp_jac;
  policies.push_back(std::move(attractor));

  for (const CollisionSphere& sphere : model.spheres) {
    if (sphere.link_index == 0) continue;  // the base cannot move
    const Eigen::Vector3d center = PointPosition(fk, {sphere.link_index, sphere.local_offset});
    const Eigen::Matrix3Xd lin =
        Jacobian(model, fk, sphere.link_index, center).topRows<3>();
    const Eigen::Vector3d vel = lin * qdot;
    for (const SafetyPlane& plane : planes) {
      TaskPolicyd p = PlanePolicy(center, vel, sphere.radius, plane, cfg);
      if (p.metric(0, 0) == 0.0) continue;
      p.jacobian = p.jacobian * lin;
      policies.push_back(std::move(p));
    }
  }
  policies.push_back(JointLimitPolicy(q, qdot, model, cfg));
  policies.push_back(JointDampingPolicy(qdot, cfg));

  const Eigen::VectorXd accel = Resolve(policies);
  const double dt = cfg.tick_dt;

  JointState next;
  next.positions.resize(n);
  next.velocities.resize(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const JointSpec& joint = model.joints[j];
    const double cap = std::min(cfg.speed_cap, joint.max_velocity);
    const double v = std::clamp(qdot(j) + accel(j) * dt, -cap, cap);
    double p = LimitIncrement(q(j), q(j) + v * dt, cap, dt);
    double v_out = v;
    if (p <= joint.lower_limit) {
      p = joint.lower_limit;
      v_out = std::max(0.0, v_out);
    } else if (p >= joint.upper_limit) {
      p = joint.upper_limit;
      v_out = std::min(0.0, v_out);
    }
    next.positions(j) = p;
    next.velocities(j) = v_out;
  }
  next.timestamp = state.timestamp + dt;
  return next;
}

}  // namespace twinlink
