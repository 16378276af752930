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
#include <string_view>

#include <nlohmann/json.hpp>

#include "twinlink/errors.hpp"

namespace twinlink::bus {

using Json = nlohmann::json;

// Two schema dialects with different field naming. The simulation speaks B;
// A-side clients go through the bridge.
enum class Dialect { kA, kB };

std::string_view ToString(Dialect d);
std::optional<Dialect> DialectFromString(std::string_view name);
inline Dialect Opposite(Dialect d) { return d == Dialect::kA ? Dialect::kB : Dialect::kA; }

namespace topics {
inline constexpr std::string_view kRawInput = "/raw_input";
inline constexpr std::string_view kTargetPose = "/target_pose";
inline constexpr std::string_view kJointStates = "/joint_states";
inline constexpr std::string_view kGripperCmd = "/gripper_cmd";
inline constexpr std::string_view kWorldState = "/world_state";
inline constexpr std::string_view kEvents = "/events";
// Sent once by the server on connect; never bridged.
inline constexpr std::string_view kHandshake = "/handshake";
}  // namespace topics

struct Envelope {
  std::string topic;
  Dialect dialect = Dialect::kB;
  std::uint64_t seq = 0;
  double timestamp = 0.0;
  Json payload = Json::object();

  bool operator==(const Envelope& other) const {
    return topic == other.topic && dialect == other.dialect && seq == other.seq &&
           timestamp == other.timestamp && payload == other.payload;
  }
};

// Schema violations, unknown topics, malformed frames.
class BusError : public Error {
 public:
  using Error::Error;
};

}  // namespace twinlink::bus
