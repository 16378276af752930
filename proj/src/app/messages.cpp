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

#include "twinlink/app/messages.hpp"

#include "twinlink/kinematics/forward_kinematics.hpp"

namespace twinlink::messages {

namespace {

std::string SupportName(const Support& s) {
  switch (s.kind) {
    case SupportKind::kTable: return "table";
    case SupportKind::kOnCube: return "cube:" + std::to_string(s.cube_id);
    case SupportKind::kGrasped: return "grasped";
    case SupportKind::kFalling: return "falling";
  }
  return "?";
}

Json PoseJson(const Posed& p) {
  return {{"xyz", PositionJson(p.position)}, {"quat", OrientationJson(p.orientation)}};
}

}  // namespace

Json PositionJson(const Eigen::Vector3d& p) { return Json::array({p.x(), p.y(), p.z()}); }

Json OrientationJson(const Eigen::Quaterniond& q) {
  return Json::array({q.w(), q.x(), q.y(), q.z()});
}

Posed PoseFromJson(const Json& position, const Json& orientation) {
  const Eigen::Vector3d p(position.at(0).get<double>(), position.at(1).get<double>(),
                          position.at(2).get<double>());
  const Eigen::Quaterniond q(orientation.at(0).get<double>(), orientation.at(1).get<double>(),
                             orientation.at(2).get<double>(), orientation.at(3).get<double>());
  if (q.norm() < 1e-12) throw bus::BusError("orientation quaternion must be non-zero");
  return Posed(p, q);
}

Json RawInputPayload(const RawPoseSample& sample, bool set_origin) {
  Json payload = {{"position", PositionJson(sample.device_pose.position)},
                  {"orientation", OrientationJson(sample.device_pose.orientation)}};
  if (sample.grip) payload["grip_fraction"] = *sample.grip;
  if (sample.fingers) {
    payload["thumb_flexion"] = sample.fingers->thumb;
    payload["index_flexion"] = sample.fingers->index;
  }
  if (set_origin) payload["set_origin"] = true;
  return payload;
}

RawInput RawInputFromPayload(const Json& payload, double timestamp) {
  RawInput in;
  in.sample.timestamp = timestamp;
  in.sample.device_pose = PoseFromJson(payload.at("position"), payload.at("orientation"));
  if (payload.contains("grip_fraction")) in.sample.grip = payload["grip_fraction"].get<double>();
  if (payload.contains("thumb_flexion") || payload.contains("index_flexion")) {
    in.sample.fingers = FingerFlexion{payload.value("thumb_flexion", 0.0),
                                      payload.value("index_flexion", 0.0)};
  }
  in.set_origin = payload.value("set_origin", false);
  return in;
}

Json TargetPosePayload(const Posed& target) {
  return {{"position", PositionJson(target.position)},
          {"orientation", OrientationJson(target.orientation)}};
}

Posed TargetPoseFromPayload(const Json& payload) {
  return PoseFromJson(payload.at("position"), payload.at("orientation"));
}

Json GripperCmdPayload(double open_ratio) { return {{"open_ratio", open_ratio}}; }

double GripperCmdFromPayload(const Json& payload) {
  return std::clamp(payload.at("open_ratio").get<double>(), 0.0, 1.0);
}

Json JointStatesPayload(const ArmModel& model, const JointState& state) {
  Json names = Json::array();
  for (const JointSpec& j : model.joints) names.push_back(j.name);
  return {{"names", names},
          {"position_rad", std::vector<double>(state.positions.begin(), state.positions.end())},
          {"velocity_rad",
           std::vector<double>(state.velocities.begin(), state.velocities.end())}};
}

Json WorldStatePayload(const WorldState& world, const std::string& phase, double phase_time) {
  Json objects = Json::array();
  for (const Cube& c : world.cubes) {
    objects.push_back({{"id", c.id},
                       {"position", PositionJson(c.pose.position)},
                       {"orientation", OrientationJson(c.pose.orientation)},
                       {"side", c.side},
                       {"support", SupportName(c.support)}});
  }
  const Posed& cp = world.control_point;
  return {{"stamp", world.time},
          {"session_phase", phase},
          {"phase_time", phase_time},
          {"objects", objects},
          {"gripper_width", world.gripper.aperture},
          {"zone_center_xyz", PositionJson(world.zone.center)},
          {"zone_half_size", world.zone.half_extent},
          {"tracked_point",
           Json::array({cp.position.x(), cp.position.y(), cp.position.z(), cp.orientation.w(),
                        cp.orientation.x(), cp.orientation.y(), cp.orientation.z()})}};
}

Json EventPayload(const TaskEvent& event) {
  return {{"event_type", std::string(ToString(event.kind))},
          {"object_id", event.cube_id ? Json(*event.cube_id) : Json(nullptr)},
          {"stamp", event.timestamp}};
}

Json SessionStatsEventPayload(const SessionStats& stats, double time) {
  return {{"event_type", "SessionStats"},
          {"object_id", nullptr},
          {"stamp", time},
          {"session_stats", SessionStatsToJson(stats)}};
}

Json HandshakePayload(const Scenario& scenario) {
  const ArmModel& arm = scenario.arm;
  Json joints = Json::array();
  for (const JointSpec& j : arm.joints) {
    joints.push_back({{"name", j.name},
                      {"origin", PoseJson(j.parent_offset)},
                      {"axis", PositionJson(j.axis)},
                      {"lower", j.lower_limit},
                      {"upper", j.upper_limit}});
  }
  Json spheres = Json::array();
  for (const CollisionSphere& s : arm.spheres) {
    spheres.push_back(
        {{"link", s.link_index}, {"offset", PositionJson(s.local_offset)}, {"radius", s.radius}});
  }
  Json planes = Json::array();
  for (std::size_t i = 0; i < scenario.planes.size(); ++i) {
    const SafetyPlane& p = scenario.planes[i];
    planes.push_back({{"name", scenario.plane_names[i]},
                      {"normal", PositionJson(p.normal)},
                      {"offset", p.offset},
                      {"margin", p.margin}});
  }
  const Posed rest = ForwardKinematics(arm, arm.home_configuration).control_point;
  return {
      {"arm",
       {{"name", arm.name},
        {"joints", joints},
        {"spheres", spheres},
        {"control_point", PoseJson(arm.control_point_offset)},
        {"home", std::vector<double>(arm.home_configuration.begin(),
                                     arm.home_configuration.end())}}},
      {"scenario",
       {{"cube_side", scenario.task.cube_side},
        {"max_aperture", scenario.task.max_aperture},
        {"session_duration", scenario.task.session_duration},
        {"training_duration", scenario.task.training_duration},
        {"latency_delay", scenario.latency.delay},
        {"tick_dt", scenario.motion.tick_dt},
        {"rest_target", PoseJson(rest)},
        {"workspace", {{"min", PositionJson(scenario.workspace.min)},
                       {"max", PositionJson(scenario.workspace.max)}}},
        {"planes", planes}}},
  };
}

}  // namespace twinlink::messages
