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
#include <deque>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "twinlink/bus/envelope.hpp"
#include "twinlink/kinematics/arm_model.hpp"

namespace twinlink::bus {

struct LatencyConfig {
  double delay = 0.5;  // s
  double jitter = 0.0; // s, extra uniform delay in [0, jitter)
  std::uint64_t seed = 1;
};

// Throws ValidationError unless delay >= 0, jitter >= 0 and
// (jitter == 0 or jitter < delay).
void Validate(const LatencyConfig& cfg);

struct DelayedMessage {
  Envelope envelope;
  double sent_at = 0.0;
  double deliver_at = 0.0;
};

// Holds envelopes until enqueue time + delay + jitter. Jitter is drawn from
// a generator seeded by the config, one draw per message, so runs are
// reproducible. Delivery times on each topic are made non-decreasing, which
// keeps per-topic FIFO order under jitter.
class LatencyQueue {
 public:
  explicit LatencyQueue(LatencyConfig cfg);

  void Enqueue(Envelope envelope, double now);
  // Every message with deliver_at <= now, ordered by delivery time and then
  // by enqueue order.
  std::vector<DelayedMessage> Dequeue(double now);

  std::size_t size() const;
  const LatencyConfig& config() const { return cfg_; }

 private:
  struct Pending {
    DelayedMessage message;
    std::uint64_t order = 0;
  };

  double DrawJitter();

  LatencyConfig cfg_;
  std::mt19937_64 rng_;
  std::uint64_t next_order_ = 0;
  std::map<std::string, std::deque<Pending>> per_topic_;
};

// Per-joint speed limit on a streamed command: joints whose step would
// exceed speed_cap * dt move exactly that far toward `next`; the rest pass
// through unchanged. Throws ValidationError for dt <= 0 and DimensionError
// for mismatched sizes.
JointState RateLimitJointCommand(const JointState& prev, const JointState& next,
                                 double speed_cap, double dt);

}  // namespace twinlink::bus
