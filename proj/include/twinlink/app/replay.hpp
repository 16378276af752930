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

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>

#include "twinlink/app/scenario.hpp"
#include "twinlink/app/session.hpp"
#include "twinlink/control_io/input.hpp"
#include "twinlink/metrics/stats.hpp"

namespace twinlink {

struct ReplayResult {
  SessionLog log;
  SessionStats stats;
  std::uint64_t ticks = 0;
  double simulated_seconds = 0.0;
  std::uint64_t seed = 0;
};

// Seconds simulated past the last trajectory sample so delayed commands and
// falling cubes can finish.
inline constexpr double kReplayTailSeconds = 3.0;

// Runs a trajectory through the full pipeline at fixed ticks. `seed`
// overrides the scenario's latency seed. `observer` sees the session after
// every tick.
ReplayResult RunReplay(const Scenario& scenario, std::span<const RawPoseSample> trajectory,
                       std::optional<std::uint64_t> seed = std::nullopt,
                       const std::function<void(const TeleopSession&)>& observer = {});

struct ReplayFiles {
  std::filesystem::path config;
  std::filesystem::path trajectory;
  std::filesystem::path out_dir;
  std::optional<std::uint64_t> seed;
};

// Loads inputs, replays, writes events.log, stats.json, stats.csv and
// manifest.json under out_dir. Nothing is written unless the run completes.
// Returns the process exit code; diagnostics go to `err`.
int ReplayCommand(const ReplayFiles& files, std::ostream& out, std::ostream& err);

}  // namespace twinlink
