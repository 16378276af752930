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
#include <mutex>
#include <thread>
#include <vector>

#include "twinlink/app/scenario.hpp"
#include "twinlink/app/session.hpp"
#include "twinlink/bus/gateway.hpp"
#include "twinlink/bus/pubsub.hpp"

namespace twinlink {

// A live session behind the socket gateway. The simulation thread owns the
// session; network threads only hand inbound envelopes over through a
// locked queue, and outbound traffic leaves through the bus.
class LiveServer {
 public:
  // The scenario must outlive the server. time_scale <= 0 runs the clock
  // as fast as the machine allows.
  LiveServer(const Scenario& scenario, bus::GatewayOptions options);
  ~LiveServer();
  LiveServer(const LiveServer&) = delete;
  LiveServer& operator=(const LiveServer&) = delete;

  void Start();
  void Stop();

  std::uint16_t port() const { return gateway_.port(); }
  bus::Bus& bus() { return bus_; }
  const bus::Gateway& gateway() const { return gateway_; }

  // Runs `fn` on the session between ticks.
  void Inspect(const std::function<void(const TeleopSession&)>& fn);

 private:
  void Run();

  const Scenario& scenario_;
  bus::Bus bus_;
  TeleopSession session_;
  bus::Gateway gateway_;
  std::mutex session_mutex_;
  std::mutex inbound_mutex_;
  std::vector<bus::Envelope> inbound_;
  std::atomic<bool> running_{false};
  std::thread thread_;
};

}  // namespace twinlink
