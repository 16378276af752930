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

#include "twinlink/app/scenario.hpp"

#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "twinlink/errors.hpp"
#include "twinlink/kinematics/arm_description.hpp"

namespace twinlink {

namespace {

namespace pt = boost::property_tree;

std::string ReadFile(const std::filesystem::path& path, const char* what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(std::string("cannot open ") + what + " '" + path.string() + "'", 0);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void CheckKeys(const pt::ptree& section, const std::string& name,
               const std::set<std::string>& allowed) {
  for (const auto& [key, value] : section) {
    if (!allowed.count(key)) {
      throw ValidationError("unknown key '" + key + "' in [" + name + "]");
    }
  }
}

std::vector<double> Numbers(const std::string& text, const std::string& key) {
  std::istringstream in(text);
  std::vector<double> out;
  double v;
  while (in >> v) out.push_back(v);
  if (!in.eof()) throw ValidationError("'" + key + "' must be a list of numbers");
  return out;
}

Eigen::Vector3d Vec3(const pt::ptree& section, const std::string& key) {
  const std::vector<double> v = Numbers(section.get<std::string>(key), key);
  if (v.size() == 2) return {v[0], v[1], 0.0};
  if (v.size() != 3) throw ValidationError("'" + key + "' needs 2 or 3 numbers");
  return {v[0], v[1], v[2]};
}

double Number(const pt::ptree& section, const std::string& key, double fallback) {
  const auto value = section.get_optional<std::string>(key);
  if (!value) return fallback;
  const std::vector<double> v = Numbers(*value, key);
  if (v.size() != 1) throw ValidationError("'" + key + "' must be a single number");
  return v[0];
}

const pt::ptree& Section(const pt::ptree& root, const std::string& name, bool required) {
  static const pt::ptree empty;
  const auto child = root.get_child_optional(name);
  if (!child) {
    if (required) throw ValidationError("scenario is missing section [" + name + "]");
    return empty;
  }
  return *child;
}

}  // namespace

std::uint64_t Fnv1a(std::string_view bytes, std::uint64_t seed) {
  std::uint64_t h = seed;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

Scenario ParseScenario(const std::string& text, const std::filesystem::path& base_dir) {
  pt::ptree root;
  try {
    std::istringstream in(text);
    pt::ini_parser::read_ini(in, root);
  } catch (const pt::ini_parser_error& e) {
    throw ParseError(e.message(), static_cast<int>(e.line()));
  }
  for (const auto& [name, section] : root) {
    static const std::set<std::string> known = {"arm",       "motion", "task",  "latency",
                                                "workspace", "planes", "server"};
    if (!known.count(name)) throw ValidationError("unknown section [" + name + "]");
  }

  Scenario s;
  const pt::ptree& arm = Section(root, "arm", true);
  CheckKeys(arm, "arm", {"description"});
  s.arm_path = base_dir / arm.get<std::string>("description");
  const std::string arm_text = ReadFile(s.arm_path, "arm description");
  s.arm = LoadArmDescription(arm_text);

  const pt::ptree& motion = Section(root, "motion", false);
  CheckKeys(motion, "motion",
            {"attractor_gain", "attractor_damping", "repulsion_gain", "repulsion_damping",
             "repulsion_lengthscale", "jointlimit_gain", "jointlimit_margin", "joint_damping",
             "joint_damping_weight", "speed_cap", "tick_dt"});
  MotionConfig& m = s.motion;
  m.attractor_gain = Number(motion, "attractor_gain", m.attractor_gain);
  m.attractor_damping = Number(motion, "attractor_damping", m.attractor_damping);
  m.repulsion_gain = Number(motion, "repulsion_gain", m.repulsion_gain);
  m.repulsion_damping = Number(motion, "repulsion_damping", m.repulsion_damping);
  m.repulsion_lengthscale = Number(motion, "repulsion_lengthscale", m.repulsion_lengthscale);
  m.jointlimit_gain = Number(motion, "jointlimit_gain", m.jointlimit_gain);
  m.jointlimit_margin = Number(motion, "jointlimit_margin", m.jointlimit_margin);
  m.joint_damping = Number(motion, "joint_damping", m.joint_damping);
  m.joint_damping_weight = Number(motion, "joint_damping_weight", m.joint_damping_weight);
  m.speed_cap = Number(motion, "speed_cap", m.speed_cap);
  m.tick_dt = Number(motion, "tick_dt", m.tick_dt);
  Validate(m);

  const pt::ptree& task = Section(root, "task", true);
  CheckKeys(task, "task",
            {"max_reach", "vertex0", "vertex1", "vertex2", "zone_center", "cube_side",
             "session_duration", "training_duration", "max_aperture", "finger_speed",
             "capture_scale"});
  const bool explicit_vertices = task.count("vertex0") > 0;
  if (explicit_vertices) {
    for (int i = 0; i < 3; ++i) {
      s.task.triangle_vertices[i] = Vec3(task, "vertex" + std::to_string(i));
    }
    s.task.zone_center = (s.task.triangle_vertices[0] + s.task.triangle_vertices[1] +
                          s.task.triangle_vertices[2]) / 3.0;
  } else if (task.count("max_reach")) {
    s.task = DefaultTaskConfig(Number(task, "max_reach", 0.0));
  } else {
    throw ValidationError("[task] needs either max_reach or vertex0..vertex2");
  }
  if (task.count("zone_center")) s.task.zone_center = Vec3(task, "zone_center");
  s.task.zone_center.z() = 0.0;
  s.task.cube_side = Number(task, "cube_side", s.task.cube_side);
  s.task.session_duration = Number(task, "session_duration", s.task.session_duration);
  s.task.training_duration = Number(task, "training_duration", s.task.training_duration);
  s.task.max_aperture = Number(task, "max_aperture", s.task.max_aperture);
  s.task.finger_speed = Number(task, "finger_speed", s.task.finger_speed);
  s.task.capture_scale = Number(task, "capture_scale", s.task.capture_scale);
  Validate(s.task);

  const pt::ptree& latency = Section(root, "latency", false);
  CheckKeys(latency, "latency", {"delay", "jitter", "seed"});
  s.latency.delay = Number(latency, "delay", s.latency.delay);
  s.latency.jitter = Number(latency, "jitter", s.latency.jitter);
  s.latency.seed = latency.get<std::uint64_t>("seed", s.latency.seed);
  bus::Validate(s.latency);

  const pt::ptree& workspace = Section(root, "workspace", true);
  CheckKeys(workspace, "workspace", {"min", "max"});
  s.workspace.min = Vec3(workspace, "min");
  s.workspace.max = Vec3(workspace, "max");
  if ((s.workspace.min.array() > s.workspace.max.array()).any()) {
    throw ValidationError("[workspace] min must not exceed max");
  }

  for (const auto& [name, value] : Section(root, "planes", false)) {
    const std::vector<double> v = Numbers(value.data(), name);
    if (v.size() != 5) {
      throw ValidationError("plane '" + name + "' needs: nx ny nz offset margin");
    }
    SafetyPlane plane;
    plane.normal = Eigen::Vector3d(v[0], v[1], v[2]).normalized();
    plane.offset = v[3];
    plane.margin = v[4];
    Validate(plane);
    s.planes.push_back(plane);
    s.plane_names.push_back(name);
  }

  const pt::ptree& server = Section(root, "server", false);
  CheckKeys(server, "server", {"time_scale"});
  s.time_scale = Number(server, "time_scale", 1.0);
  if (!(s.time_scale > 0.0)) throw ValidationError("[server] time_scale must be > 0");

  s.content_hash = Fnv1a(arm_text, Fnv1a(text));
  return s;
}

Scenario LoadScenario(const std::filesystem::path& path) {
  Scenario s = ParseScenario(ReadFile(path, "scenario"), path.parent_path());
  s.source = path;
  return s;
}

}  // namespace twinlink
