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

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "twinlink/kinematics/pose.hpp"

namespace twinlink {

struct FingerFlexion {
  double thumb = 0.0;  // 0 = extended, 1 = fully flexed
  double index = 0.0;
};

struct RawPoseSample {
  Posed device_pose;
  // Trigger devices set `grip`; glove devices set `fingers`.
  std::optional<double> grip;
  std::optional<FingerFlexion> fingers;
  double timestamp = 0.0;
};

struct CalibrationState {
  Posed origin;
  Posed robot_rest_target;
};

struct WorkspaceBox {
  Eigen::Vector3d min = Eigen::Vector3d::Constant(-1.0);
  Eigen::Vector3d max = Eigen::Vector3d::Constant(1.0);
};

// Anchors the mapping so that `sample.device_pose` maps to `rest_target`.
CalibrationState Calibrate(const RawPoseSample& sample, const Posed& rest_target);

// rest_target * (origin^-1 * device_pose), position clamped into `workspace`.
// Orientation is not clamped.
Posed MapPose(const RawPoseSample& sample, const CalibrationState& cal,
              const WorkspaceBox& workspace);

// Throws Error("uncalibrated stream") when `cal` is empty.
Posed MapPose(const RawPoseSample& sample, const std::optional<CalibrationState>& cal,
              const WorkspaceBox& workspace);

// 1 - (thumb + index) / 2, with 1 meaning fully open.
double MapFingers(const FingerFlexion& f);

// Grasp degree of freedom of a sample: 1 - grip for triggers, MapFingers for
// gloves, fully open when neither is present.
double ApertureFraction(const RawPoseSample& sample);

// round(angle / 360 * resolution) clamped to [0, resolution - 1].
int DegreesToMotorCommand(double angle_deg, int resolution = 4096);
double MotorCommandToDegrees(int count, int resolution = 4096);

// Replay trajectory: one record per line,
//   t x y z qw qx qy qz grip
// Blank lines and lines starting with '#' are ignored.
std::vector<RawPoseSample> ParseTrajectory(std::string_view text);
std::vector<RawPoseSample> LoadTrajectoryFile(const std::filesystem::path& path);

// Inverse of ParseTrajectory; samples without a trigger value write grip 0.
std::string FormatTrajectory(std::span<const RawPoseSample> samples);

}  // namespace twinlink
