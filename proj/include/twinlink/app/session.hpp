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
#include <optional>
#include <string>
#include <vector>

#include "twinlink/app/scenario.hpp"
#include "twinlink/bus/latency.hpp"
#include "twinlink/bus/pubsub.hpp"
#include "twinlink/control_io/input.hpp"
#include "twinlink/metrics/stats.hpp"
#include "twinlink/twin/world.hpp"

namespace twinlink {

enum class SessionPhase { kTraining, kTask };
std::string ToString(SessionPhase phase);

enum class SessionMode {
  kReplay,  // task phase from t = 0; the first input sample calibrates
  kLive,    // training then task phase; calibration on request
};

// The simulation loop: input -> calibration/mapping -> delayed command
// stream -> motion -> rate limiter -> twin. Owns the world and the arm
// state; talks to the outside only through bus messages. Not thread-safe:
// one thread calls Tick().
class TeleopSession {
 public:
  TeleopSession(const Scenario& scenario, bus::Bus& bus, SessionMode mode);

  // Queue an inbound dialect-B envelope (/raw_input or /gripper_cmd). It is
  // picked up at the next input-ingestion tick.
  void Submit(const bus::Envelope& envelope);
  void SubmitSample(const RawPoseSample& sample, bool set_origin = false);

  // Advances the simulation by one physics tick.
  void Tick();

  std::uint64_t ticks() const { return tick_; }
  double time() const;
  SessionPhase phase() const { return phase_; }
  double phase_time() const;
  int sessions_completed() const { return sessions_completed_; }

  const WorldState& world() const { return world_; }
  const JointState& joints() const { return joints_; }
  const Posed& rest_target() const { return rest_target_; }
  const std::optional<CalibrationState>& calibration() const { return calibration_; }
  const Posed& active_target() const { return active_target_; }

  // Events of the current (or last finished) task phase.
  SessionLog TaskLog() const;

  // Physics runs at 1/tick_dt; inputs every kInputDivider ticks, snapshots
  // every kSnapshotDivider ticks.
  static constexpr int kInputDivider = 2;
  static constexpr int kSnapshotDivider = 4;

 private:
  void IngestInputs(double now);
  void ApplyDelivered(double now);
  void PublishEvents(const std::vector<TaskEvent>& events);
  void BeginTask();
  void EndTask();
  std::vector<TaskEvent> NewEventsSince(std::size_t index) const;

  const Scenario& scenario_;
  bus::Bus& bus_;
  bus::Publisher publisher_;
  SessionMode mode_;
  SessionPhase phase_;
  std::uint64_t tick_ = 0;
  std::uint64_t phase_start_tick_ = 0;
  int sessions_completed_ = 0;

  WorldState world_;
  JointState joints_;
  Posed rest_target_;
  std::optional<CalibrationState> calibration_;
  bus::LatencyQueue latency_;
  Posed active_target_;
  double active_open_ratio_ = 1.0;

  std::vector<bus::Envelope> pending_inputs_;
  std::size_t task_log_start_ = 0;
  std::size_t published_events_ = 0;
  std::optional<SessionLog> finished_log_;
};

}  // namespace twinlink
