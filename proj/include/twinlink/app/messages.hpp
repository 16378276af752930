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

#include <optional>
#include <string>

#include "twinlink/app/scenario.hpp"
#include "twinlink/bus/envelope.hpp"
#include "twinlink/control_io/input.hpp"
#include "twinlink/kinematics/arm_model.hpp"
#include "twinlink/metrics/stats.hpp"
#include "twinlink/twin/world.hpp"

// Conversions between domain types and dialect-B topic payloads.
namespace twinlink::messages {

using bus::Json;

// Poses travel as position [x, y, z] and orientation [w, x, y, z].
Json PositionJson(const Eigen::Vector3d& p);
Json OrientationJson(const Eigen::Quaterniond& q);
Posed PoseFromJson(const Json& position, const Json& orientation);

struct RawInput {
  RawPoseSample sample;
  bool set_origin = false;
};
Json RawInputPayload(const RawPoseSample& sample, bool set_origin);
RawInput RawInputFromPayload(const Json& payload, double timestamp);

Json TargetPosePayload(const Posed& target);
Posed TargetPoseFromPayload(const Json& payload);

Json GripperCmdPayload(double open_ratio);
double GripperCmdFromPayload(const Json& payload);

Json JointStatesPayload(const ArmModel& model, const JointState& state);

Json WorldStatePayload(const WorldState& world, const std::string& phase,
                       double phase_time);

Json EventPayload(const TaskEvent& event);
Json SessionStatsEventPayload(const SessionStats& stats, double time);

// Arm chain parameters and scenario constants for client-side rendering.
Json HandshakePayload(const Scenario& scenario);

}  // namespace twinlink::messages
