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

#include "twinlink/bus/latency.hpp"

#include <algorithm>
#include <cmath>

namespace twinlink::bus {

void Validate(const LatencyConfig& cfg) {
  if (!(cfg.delay >= 0.0)) throw ValidationError("latency delay must be >= 0");
  if (!(cfg.jitter >= 0.0)) throw ValidationError("latency jitter must be >= 0");
  if (cfg.jitter > 0.0 && !(cfg.jitter < cfg.delay)) {
    throw ValidationError("latency jitter must be smaller than the delay");
  }
}

LatencyQueue::LatencyQueue(LatencyConfig cfg) : cfg_(cfg), rng_(cfg.seed) { Validate(cfg_); }

double LatencyQueue::DrawJitter() {
  // Always draw, so the jitter sequence does not depend on the config.
  const double unit = static_cast<double>(rng_() >> 11) * 0x1.0p-53;
  return cfg_.jitter * unit;
}

void LatencyQueue::Enqueue(Envelope envelope, double now) {
  double deliver_at = now + cfg_.delay + DrawJitter();
  std::deque<Pending>& lane = per_topic_[envelope.topic];
  if (!lane.empty()) deliver_at = std::max(deliver_at, lane.back().message.deliver_at);
  lane.push_back(Pending{{std::move(envelope), now, deliver_at}, next_order_++});
}

std::vector<DelayedMessage> LatencyQueue::Dequeue(double now) {
  std::vector<Pending> ready;
  for (auto& [topic, lane] : per_topic_) {
    while (!lane.empty() && lane.front().message.deliver_at <= now) {
      ready.push_back(std::move(lane.front()));
      lane.pop_front();
    }
  }
  std::sort(ready.begin(), ready.end(), [](const Pending& a, const Pending& b) {
    if (a.message.deliver_at != b.message.deliver_at) {
      return a.message.deliver_at < b.message.deliver_at;
    }
    return a.order < b.order;
  });
  std::vector<DelayedMessage> out;
  out.reserve(ready.size());
  for (Pending& p : ready) out.push_back(std::move(p.message));
  return out;
}

std::size_t LatencyQueue::size() const {
  std::size_t n = 0;
  for (const auto& [topic, lane] : per_topic_) n += lane.size();
  return n;
}

JointState RateLimitJointCommand(const JointState& prev, const JointState& next,
                                 double speed_cap, double dt) {
  if (!(dt > 0.0)) throw ValidationError("rate limit needs dt > 0");
  if (!(speed_cap > 0.0)) throw ValidationError("rate limit needs speed_cap > 0");
  if (prev.positions.size() != next.positions.size()) {
    throw DimensionError("rate limit: joint vectors differ in size");
  }
  JointState out = next;
  if (out.velocities.size() != out.positions.size()) {
    out.velocities = Eigen::VectorXd::Zero(out.positions.size());
  }
  for (Eigen::Index j = 0; j < out.positions.size(); ++j) {
    const double limited = LimitIncrement(prev.positions(j), next.positions(j), speed_cap, dt);
    if (limited != next.positions(j)) {
      out.positions(j) = limited;
      out.velocities(j) = (limited - prev.positions(j)) / dt;
    }
    out.velocities(j) = std::clamp(out.velocities(j), -speed_cap, speed_cap);
  }
  return out;
}

}  // namespace twinlink::bus
