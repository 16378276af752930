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

#include "twinlink/control_io/input.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include <fmt/format.h>

#include "twinlink/errors.hpp"

namespace twinlink {

CalibrationState Calibrate(const RawPoseSample& sample, const Posed& rest_target) {
  return CalibrationState{sample.device_pose, rest_target};
}

Posed MapPose(const RawPoseSample& sample, const CalibrationState& cal,
              const WorkspaceBox& workspace) {
  Posed target = cal.robot_rest_target * (cal.origin.inverse() * sample.device_pose);
  target.position = target.position.cwiseMax(workspace.min).cwiseMin(workspace.max);
  return target;
}

Posed MapPose(const RawPoseSample& sample, const std::optional<CalibrationState>& cal,
              const WorkspaceBox& workspace) {
  if (!cal) throw Error("uncalibrated stream: calibrate before mapping poses");
  return MapPose(sample, *cal, workspace);
}

double MapFingers(const FingerFlexion& f) {
  const double thumb = std::clamp(f.thumb, 0.0, 1.0);
  const double index = std::clamp(f.index, 0.0, 1.0);
  return 1.0 - (thumb + index) / 2.0;
}

double ApertureFraction(const RawPoseSample& sample) {
  if (sample.fingers) return MapFingers(*sample.fingers);
  if (sample.grip) return 1.0 - std::clamp(*sample.grip, 0.0, 1.0);
  return 1.0;
}

int DegreesToMotorCommand(double angle_deg, int resolution) {
  if (!std::isfinite(angle_deg)) throw ValidationError("motor angle must be finite");
  if (resolution <= 0) throw ValidationError("motor resolution must be > 0");
  const double count = std::round(angle_deg / 360.0 * resolution);
  return static_cast<int>(std::clamp(count, 0.0, static_cast<double>(resolution - 1)));
}

double MotorCommandToDegrees(int count, int resolution) {
  return static_cast<double>(count) * 360.0 / resolution;
}

std::vector<RawPoseSample> ParseTrajectory(std::string_view text) {
  std::vector<RawPoseSample> samples;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream fields(line);
    double v[9];
    for (double& x : v) {
      if (!(fields >> x)) {
        throw ParseError("trajectory record needs 9 numbers: t x y z qw qx qy qz grip",
                         line_no);
      }
    }
    std::string extra;
    if (fields >> extra) throw ParseError("trailing field '" + extra + "'", line_no);
    const Eigen::Quaterniond q(v[4], v[5], v[6], v[7]);
    if (q.norm() < 1e-12) throw ParseError("zero quaternion", line_no);
    if (!samples.empty() && v[0] < samples.back().timestamp) {
      throw ParseError("timestamps must be non-decreasing", line_no);
    }
    if (v[8] < 0.0 || v[8] > 1.0) throw ParseError("grip must lie in [0, 1]", line_no);
    RawPoseSample s;
    s.timestamp = v[0];
    s.device_pose = Posed({v[1], v[2], v[3]}, q);
    s.grip = v[8];
    samples.push_back(s);
  }
  return samples;
}

std::vector<RawPoseSample> LoadTrajectoryFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open trajectory '" + path.string() + "'", 0);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return ParseTrajectory(buffer.str());
}

std::string FormatTrajectory(std::span<const RawPoseSample> samples) {
  std::string out = "# t x y z qw qx qy qz grip\n";
  for (const RawPoseSample& s : samples) {
    const Eigen::Vector3d& p = s.device_pose.position;
    const Eigen::Quaterniond& q = s.device_pose.orientation;
    out += fmt::format("{:.4f} {:.6f} {:.6f} {:.6f} {:.9f} {:.9f} {:.9f} {:.9f} {:.3f}\n",
                       s.timestamp, p.x(), p.y(), p.z(), q.w(), q.x(), q.y(), q.z(),
                       s.grip.value_or(0.0));
  }
  return out;
}

}  // namespace twinlink
