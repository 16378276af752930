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

#include "twinlink/kinematics/arm_model.hpp"
#include "twinlink/kinematics/pose.hpp"
#include "twinlink/motion/resolve.hpp"

namespace twinlink {

// Half-space boundary {x : normal . x = offset}; the allowed side is the one
// the normal points into.
struct SafetyPlane {
  Eigen::Vector3d normal = Eigen::Vector3d::UnitZ();
  double offset = 0.0;
  double margin = 0.05;  // influence distance, meters
};

struct MotionConfig {
  double attractor_gain = 40.0;       // 1/s^2
  double attractor_damping = 14.0;    // 1/s
  double repulsion_gain = 60.0;       // m/s^2 at contact
  double repulsion_damping = 20.0;    // 1/s, applied to approach speed
  double repulsion_lengthscale = 0.005;  // m, floor of the barrier metric
  double jointlimit_gain = 20.0;      // rad/s^2 at the limit
  double jointlimit_margin = 0.2;     // rad, influence zone inside each limit
  double joint_damping = 2.0;         // 1/s
  double joint_damping_weight = 0.01; // metric weight of the damping policy
  double speed_cap = 1.0;             // rad/s per joint
  double tick_dt = 1.0 / 120.0;       // s
};

// Throws ValidationError if a gain is negative, tick_dt <= 0 or speed_cap <= 0.
void Validate(const MotionConfig& cfg);
void Validate(const SafetyPlane& plane);

// Barrier weight max(0, 1 - d/margin)^2; zero for a zero margin.
double BarrierWeight(double distance, double margin);

// Metric weight of a barrier: BarrierWeight(d) * margin / max(d, lengthscale).
// Zero outside the margin and growing without bound (up to the lengthscale
// floor) as d approaches zero.
double BarrierMetric(double distance, double margin, double lengthscale);

// 6-D attractor toward `target`: accel = gain * error - damping * velocity,
// error = (dp, log(q_target * q_current^-1)), identity metric. The jacobian
// is left empty; callers fill it with the control-point Jacobian.
TaskPolicyd AttractorPolicy(const Posed& current, const Vector6<double>& current_vel,
                            const Posed& target, const MotionConfig& cfg);

// 1-D repulsion of a sphere along the plane normal. Clearance
// d = n.c - offset - r; accel = w(d) * (repulsion_gain - repulsion_damping *
// min(0, n.v)), metric = BarrierMetric(d). The returned jacobian is the
// 1x3 row n^T, to be chained with the sphere's linear Jacobian.
TaskPolicyd PlanePolicy(const Eigen::Vector3d& sphere_center,
                        const Eigen::Vector3d& sphere_vel, double sphere_radius,
                        const SafetyPlane& plane, const MotionConfig& cfg);

double PlaneClearance(const Eigen::Vector3d& sphere_center, double sphere_radius,
                      const SafetyPlane& plane);

// Joint-space repulsion from whichever limit lies within jointlimit_margin.
// jacobian = identity; metric is diagonal with the barrier weights.
TaskPolicyd JointLimitPolicy(const Eigen::VectorXd& q, const Eigen::VectorXd& qdot,
                             const ArmModel& model, const MotionConfig& cfg);

// Joint-space damping toward zero velocity with a small fixed metric.
TaskPolicyd JointDampingPolicy(const Eigen::VectorXd& qdot, const MotionConfig& cfg);

// One control tick: build all policies at `state`, resolve, integrate with
// semi-implicit Euler, cap per-joint speed, clamp to limits.
JointState Step(const ArmModel& model, const JointState& state, const Posed& target,
                const std::vector<SafetyPlane>& planes, const MotionConfig& cfg);

}  // namespace twinlink
