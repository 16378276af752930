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

#include "twinlink/app/live.hpp"

#include <chrono>

#include <spdlog/spdlog.h>

#include "twinlink/app/messages.hpp"

namespace twinlink {

LiveServer::LiveServer(const Scenario& scenario, bus::GatewayOptions options)
    : scenario_(scenario),
      session_(scenario, bus_, SessionMode::kLive),
      gateway_(bus_, messages::HandshakePayload(scenario),
               [this](bus::Envelope e) {
                 std::lock_guard<std::mutex> lock(inbound_mutex_);
                 inbound_.push_back(std::move(e));
               },
               std::move(options)) {}

LiveServer::~LiveServer() { Stop(); }

void LiveServer::Start() {
  if (running_) return;
  gateway_.Start();
  running_ = true;
  thread_ = std::thread([this] { Run(); });
}

void LiveServer::Stop() {
  if (running_.exchange(false)) thread_.join();
  gateway_.Stop();
}

void LiveServer::Inspect(const std::function<void(const TeleopSession&)>& fn) {
  std::lock_guard<std::mutex> lock(session_mutex_);
  fn(session_);
}

void LiveServer::Run() {
  using Clock = std::chrono::steady_clock;
  const double dt = scenario_.motion.tick_dt;
  const double scale = scenario_.time_scale;
  const Clock::time_point start = Clock::now();
  std::uint64_t ticks = 0;
  while (running_) {
    std::vector<bus::Envelope> batch;
    {
      std::lock_guard<std::mutex> lock(inbound_mutex_);
      batch.swap(inbound_);
    }
    {
      std::lock_guard<std::mutex> lock(session_mutex_);
      for (bus::Envelope& e : batch) session_.Submit(e);
      try {
        session_.Tick();
      } catch (const Error& e) {
        spdlog::error("tick {}: {}", session_.ticks(), e.what());
      }
    }
    ++ticks;
    if (scale > 0.0) {
      const auto due = start + std::chrono::duration_cast<Clock::duration>(
                                   std::chrono::duration<double>(ticks * dt / scale));
      std::this_thread::sleep_until(due);
    } else if (ticks % 64 == 0) {
      std::this_thread::yield();
    }
  }
}

}  // namespace twinlink
