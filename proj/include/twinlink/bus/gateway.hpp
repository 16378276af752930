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

#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "twinlink/bus/envelope.hpp"
#include "twinlink/bus/pubsub.hpp"

namespace twinlink::bus {

struct GatewayOptions {
  std::string address = "127.0.0.1";
  std::uint16_t port = 0;  // 0 picks a free port
  int threads = 2;
  // Topics forwarded from the bus to every client.
  std::vector<std::string> outbound_topics{
      std::string(topics::kWorldState), std::string(topics::kEvents),
      std::string(topics::kJointStates), std::string(topics::kTargetPose)};
  // Topics clients may publish.
  std::vector<std::string> inbound_topics{std::string(topics::kRawInput),
                                          std::string(topics::kGripperCmd)};
  // A client more than this many frames behind is disconnected.
  std::size_t max_pending_frames = 8192;
};

struct GatewayCounters {
  std::atomic<std::uint64_t> accepted{0};
  std::atomic<std::uint64_t> closed{0};
  std::atomic<std::uint64_t> frames_in{0};
  std::atomic<std::uint64_t> frames_rejected{0};
};

// Socket front end for the bus. One listening port serves both raw TCP
// clients and browser clients: a connection whose first bytes are an HTTP
// GET is upgraded to WebSocket and then carries one frame per binary
// message. Every client first receives a /handshake envelope. Inbound
// envelopes are converted to dialect B and handed to `on_inbound` on a
// network thread; outbound envelopes go out in the dialect the client last
// published in (B until it publishes).
class Gateway {
 public:
  using InboundHandler = std::function<void(Envelope)>;

  Gateway(Bus& bus, Json handshake, InboundHandler on_inbound, GatewayOptions options = {});
  ~Gateway();
  Gateway(const Gateway&) = delete;
  Gateway& operator=(const Gateway&) = delete;

  // Binds and starts the network threads. Throws BusError if the address
  // cannot be bound.
  void Start();
  void Stop();

  std::uint16_t port() const;
  const GatewayCounters& counters() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Splits "host:port"; throws BusError on a malformed address.
std::pair<std::string, std::uint16_t> ParseListenAddress(const std::string& text);

}  // namespace twinlink::bus
