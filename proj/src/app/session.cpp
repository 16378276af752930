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

#include "twinlink/app/session.hpp"

#include "twinlink/app/messages.hpp"
#include "twinlink/kinematics/forward_kinematics.hpp"
#include "twinlink/motion/policies.hpp"

namespace twinlink {

std::string ToString(SessionPhase phase) {
  return phase == SessionPhase::kTraining ? "training" : "task";
}

TeleopSession::TeleopSession(const Scenario& scenario, bus::Bus& bus, SessionMode mode)
    : scenario_(scenario),
      bus_(bus),
      publisher_(bus, bus::Dialect::kB),
      mode_(mode),
      phase_(mode == SessionMode::kReplay ? SessionPhase::kTask : SessionPhase::kTraining),
      world_(SpawnTask(scenario.task)),
      joints_(JointState::AtRest(scenario.arm.home_configuration)),
      rest_target_(ForwardKinematics(scenario.arm, scenario.arm.home_configuration).control_point),
      latency_(scenario.latency),
      active_target_(rest_target_) {
  world_.control_point = rest_target_;
  if (phase_ == SessionPhase::kTraining) published_events_ = world_.events.size();
}

double TeleopSession::time() const {
  return static_cast<double>(tick_) * scenario_.motion.tick_dt;
}

double TeleopSession::phase_time() const {
  return static_cast<double>(tick_ - phase_start_tick_) * scenario_.motion.tick_dt;
}

void TeleopSession::Submit(const bus::Envelope& envelope) {
  pending_inputs_.push_back(envelope);
}

void TeleopSession::SubmitSample(const RawPoseSample& sample, bool set_origin) {
  bus::Envelope e;
  e.topic = std::string(bus::topics::kRawInput);
  e.dialect = bus::Dialect::kB;
  e.timestamp = sample.timestamp;
  e.payload = messages::RawInputPayload(sample, set_origin);
  pending_inputs_.push_back(std::move(e));
}

void TeleopSession::IngestInputs(double now) {
  std::vector<bus::Envelope> batch;
  batch.swap(pending_inputs_);
  for (const bus::Envelope& in : batch) {
    if (in.topic == bus::topics::kGripperCmd) {
      bus::Envelope cmd = publisher_.Make(in.topic, in.payload, now);
      latency_.Enqueue(std::move(cmd), now);
      continue;
    }
    if (in.topic != bus::topics::kRawInput) continue;
    const messages::RawInput raw = messages::RawInputFromPayload(in.payload, in.timestamp);
    if (raw.set_origin || (mode_ == SessionMode::kReplay && !calibration_)) {
      calibration_ = Calibrate(raw.sample, rest_target_);
    }
    if (!calibration_) continue;  // live streams publish nothing until calibrated
    const Posed target = MapPose(raw.sample, *calibration_, scenario_.workspace);
    const std::string target_topic(bus::topics::kTargetPose);
    bus::Envelope pose = publisher_.Make(target_topic, messages::TargetPosePayload(target), now);
    latency_.Enqueue(std::move(pose), now);
    if (raw.sample.grip || raw.sample.fingers) {
      const std::string grip_topic(bus::topics::kGripperCmd);
      bus::Envelope grip = publisher_.Make(
          grip_topic, messages::GripperCmdPayload(ApertureFraction(raw.sample)), now);
      latency_.Enqueue(std::move(grip), now);
    }
  }
}

void TeleopSession::ApplyDelivered(double now) {
  for (bus::DelayedMessage& m : latency_.Dequeue(now)) {
    if (m.envelope.topic == bus::topics::kTargetPose) {
      active_target_ = messages::TargetPoseFromPayload(m.envelope.payload);
    } else if (m.envelope.topic == bus::topics::kGripperCmd) {
      active_open_ratio_ = messages::GripperCmdFromPayload(m.envelope.payload);
    }
    bus_.Publish(std::move(m.envelope));
  }
}

std::vector<TaskEvent> TeleopSession::NewEventsSince(std::size_t index) const {
  return {world_.events.begin() + static_cast<std::ptrdiff_t>(index), world_.events.end()};
}

void TeleopSession::PublishEvents(const std::vector<TaskEvent>& events) {
  const std::string topic(bus::topics::kEvents);
  for (const TaskEvent& e : events) {
    publisher_.Publish(topic, messages::EventPayload(e), e.timestamp);
  }
}

void TeleopSession::BeginTask() {
  world_.time = time();
  ResetTask(world_);
  task_log_start_ = world_.events.size() - 1;
  while (world_.events[task_log_start_].kind != EventKind::kReset) --task_log_start_;
  published_events_ = task_log_start_;
  phase_ = SessionPhase::kTask;
  phase_start_tick_ = tick_;
}

void TeleopSession::EndTask() {
  world_.time = time();
  ResetTask(world_);
  PublishEvents(NewEventsSince(published_events_));
  published_events_ = world_.events.size();
  SessionLog log{NewEventsSince(task_log_start_), scenario_.task.session_duration};
  const SessionStats stats = ComputeSessionStats(log);
  publisher_.Publish(std::string(bus::topics::kEvents),
                     messages::SessionStatsEventPayload(stats, time()), time());
  finished_log_ = std::move(log);
  ++sessions_completed_;
  phase_ = SessionPhase::kTraining;
  phase_start_tick_ = tick_;
}

void TeleopSession::Tick() {
  const Scenario& sc = scenario_;
  const double dt = sc.motion.tick_dt;
  const double now = time();

  if (tick_ % kInputDivider == 0) IngestInputs(now);
  ApplyDelivered(now);

  const JointState next = Step(sc.arm, joints_, active_target_, sc.planes, sc.motion);
  joints_ = bus::RateLimitJointCommand(joints_, next, sc.motion.speed_cap, dt);
  joints_.timestamp = next.timestamp;

  const Posed cp = ForwardKinematics(sc.arm, joints_.positions).control_point;
  world_.time = now;
  UpdateGripper(world_, active_open_ratio_ * sc.task.max_aperture, cp, dt);
  PhysicsStep(world_, dt);
  if (DetectTower(world_).event) ResetTask(world_);
  ++tick_;

  if (phase_ == SessionPhase::kTask) {
    PublishEvents(NewEventsSince(published_events_));
  }
  published_events_ = world_.events.size();

  if (mode_ == SessionMode::kLive) {
    if (phase_ == SessionPhase::kTraining && phase_time() >= sc.task.training_duration) {
      BeginTask();
      PublishEvents(NewEventsSince(published_events_));
      published_events_ = world_.events.size();
    } else if (phase_ == SessionPhase::kTask && phase_time() >= sc.task.session_duration) {
      EndTask();
    }
  }

  if (tick_ % kSnapshotDivider == 0) {
    publisher_.Publish(std::string(bus::topics::kJointStates),
                       messages::JointStatesPayload(sc.arm, joints_), time());
    publisher_.Publish(std::string(bus::topics::kWorldState),
                       messages::WorldStatePayload(world_, ToString(phase_), phase_time()),
                       time());
  }
}

SessionLog TeleopSession::TaskLog() const {
  if (phase_ == SessionPhase::kTask) {
    return SessionLog{NewEventsSince(task_log_start_), scenario_.task.session_duration};
  }
  if (finished_log_) return *finished_log_;
  return SessionLog{{}, scenario_.task.session_duration};
}

}  // namespace twinlink
