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

#include "twinlink/kinematics/arm_description.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include <yaml-cpp/yaml.h>

#include "twinlink/errors.hpp"

namespace twinlink {

namespace {

int LineOf(const YAML::Node& node) {
  const YAML::Mark mark = node.Mark();
  return mark.is_null() ? 0 : mark.line + 1;
}

[[noreturn]] void ParseFail(const YAML::Node& node, const std::string& what) {
  throw ParseError(what, LineOf(node));
}

void CheckKeys(const YAML::Node& map, const std::set<std::string>& allowed,
               const std::string& context) {
  if (!map.IsMap()) ParseFail(map, context + " must be a mapping");
  for (const auto& entry : map) {
    const std::string key = entry.first.as<std::string>();
    if (!allowed.count(key)) ParseFail(entry.first, "unknown key '" + key + "' in " + context);
  }
}

YAML::Node Require(const YAML::Node& map, const std::string& key,
                   const std::string& context) {
  const YAML::Node node = map[key];
  if (!node) ParseFail(map, context + " is missing '" + key + "'");
  return node;
}

double ToDouble(const YAML::Node& node, const std::string& what) {
  try {
    return node.as<double>();
  } catch (const YAML::Exception&) {
    ParseFail(node, what + " must be a number");
  }
}

Eigen::Vector3d ToVector3(const YAML::Node& node, const std::string& what) {
  if (!node.IsSequence() || node.size() != 3) {
    ParseFail(node, what + " must be a list of 3 numbers");
  }
  return {ToDouble(node[0], what), ToDouble(node[1], what), ToDouble(node[2], what)};
}

Eigen::VectorXd ToVector(const YAML::Node& node, const std::string& what) {
  if (!node.IsSequence()) ParseFail(node, what + " must be a list of numbers");
  Eigen::VectorXd out(static_cast<Eigen::Index>(node.size()));
  for (std::size_t i = 0; i < node.size(); ++i) out(i) = ToDouble(node[i], what);
  return out;
}

// {xyz: [..], rpy: [..]} or {xyz: [..], quat: [w, x, y, z]}; both keys optional.
Posed ToPose(const YAML::Node& node, const std::string& what) {
  CheckKeys(node, {"xyz", "rpy", "quat"}, what);
  const Eigen::Vector3d xyz =
      node["xyz"] ? ToVector3(node["xyz"], what + ".xyz") : Eigen::Vector3d::Zero();
  if (node["rpy"] && node["quat"]) ParseFail(node, what + " cannot have both rpy and quat");
  if (node["quat"]) {
    const Eigen::VectorXd q = ToVector(node["quat"], what + ".quat");
    if (q.size() != 4) ParseFail(node["quat"], what + ".quat must be [w, x, y, z]");
    const Eigen::Quaterniond quat(q(0), q(1), q(2), q(3));
    if (quat.norm() < 1e-12) ParseFail(node["quat"], what + ".quat must be non-zero");
    return Posed(xyz, quat);
  }
  const Eigen::Vector3d rpy =
      node["rpy"] ? ToVector3(node["rpy"], what + ".rpy") : Eigen::Vector3d::Zero();
  return Posed::FromXyzRpy(xyz, rpy);
}

JointSpec ToJoint(const YAML::Node& node, std::size_t index) {
  const std::string context = "joint " + std::to_string(index);
  CheckKeys(node, {"name", "origin", "axis", "lower", "upper", "max_velocity"}, context);
  JointSpec joint;
  joint.name = Require(node, "name", context).as<std::string>();
  if (node["origin"]) joint.parent_offset = ToPose(node["origin"], context + ".origin");
  joint.axis = ToVector3(Require(node, "axis", context), context + ".axis");
  const double axis_norm = joint.axis.norm();
  // Axes are written by hand; accept any non-zero direction and normalize.
  if (axis_norm < 1e-12) ParseFail(node["axis"], context + ".axis must be non-zero");
  joint.axis /= axis_norm;
  joint.lower_limit = ToDouble(Require(node, "lower", context), context + ".lower");
  joint.upper_limit = ToDouble(Require(node, "upper", context), context + ".upper");
  joint.max_velocity =
      ToDouble(Require(node, "max_velocity", context), context + ".max_velocity");
  return joint;
}

CollisionSphere ToSphere(const YAML::Node& node, std::size_t index) {
  const std::string context = "sphere " + std::to_string(index);
  CheckKeys(node, {"link", "offset", "radius"}, context);
  CollisionSphere sphere;
  try {
    sphere.link_index = Require(node, "link", context).as<int>();
  } catch (const YAML::Exception&) {
    ParseFail(node["link"], context + ".link must be an integer");
  }
  if (node["offset"]) sphere.local_offset = ToVector3(node["offset"], context + ".offset");
  sphere.radius = ToDouble(Require(node, "radius", context), context + ".radius");
  return sphere;
}

}  // namespace

ArmModel LoadArmDescription(std::string_view text) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::ParserException& e) {
    throw ParseError(e.msg, e.mark.line + 1);
  }
  if (!root || root.IsNull()) throw ParseError("empty arm description", 0);
  try {
    CheckKeys(root, {"name", "joints", "spheres", "control_point", "home"}, "arm description");
    ArmModel model;
    if (root["name"]) model.name = root["name"].as<std::string>();
    const YAML::Node joints = Require(root, "joints", "arm description");
    if (!joints.IsSequence()) ParseFail(joints, "'joints' must be a list");
    for (std::size_t i = 0; i < joints.size(); ++i) model.joints.push_back(ToJoint(joints[i], i));
    if (const YAML::Node spheres = root["spheres"]) {
      if (!spheres.IsSequence()) ParseFail(spheres, "'spheres' must be a list");
      for (std::size_t i = 0; i < spheres.size(); ++i) {
        model.spheres.push_back(ToSphere(spheres[i], i));
      }
    }
    model.control_point_offset =
        ToPose(Require(root, "control_point", "arm description"), "control_point");
    model.home_configuration =
        root["home"] ? ToVector(root["home"], "home")
                     : Eigen::VectorXd::Zero(static_cast<Eigen::Index>(model.joints.size()));
    Validate(model);
    return model;
  } catch (const YAML::Exception& e) {
    throw ParseError(e.msg, e.mark.is_null() ? 0 : e.mark.line + 1);
  }
}

ArmModel LoadArmDescriptionFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open arm description '" + path.string() + "'", 0);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return LoadArmDescription(buffer.str());
}

}  // namespace twinlink
