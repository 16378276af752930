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

#include <condition_variable>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "twinlink/bus/envelope.hpp"

namespace twinlink::bus {

// Published envelopes are immutable and shared between subscribers.
using Message = std::shared_ptr<const Envelope>;

// In-process topic router. Callbacks run on the publishing thread and must
// not block; Inbox is the queueing subscriber for threads that poll.
class Bus {
 public:
  using Callback = std::function<void(const Message&)>;
  using Token = std::uint64_t;

  // An empty topic subscribes to every topic.
  Token Subscribe(const std::string& topic, Callback callback);
  void Unsubscribe(Token token);

  // Delivers to subscribers in subscription order. Concurrent publishes are
  // serialized, so every subscriber sees the same per-topic order.
  void Publish(Message message);
  void Publish(Envelope envelope) {
    Publish(std::make_shared<const Envelope>(std::move(envelope)));
  }

 private:
  struct Entry {
    Token token;
    std::string topic;
    std::shared_ptr<Callback> callback;
  };
  std::mutex publish_mutex_;
  std::mutex table_mutex_;
  std::vector<Entry> entries_;
  Token next_token_ = 1;
};

// Stamps envelopes with a per-topic sequence number.
class Publisher {
 public:
  Publisher(Bus& bus, Dialect dialect) : bus_(bus), dialect_(dialect) {}

  Envelope Make(const std::string& topic, Json payload, double timestamp);
  Message Publish(const std::string& topic, Json payload, double timestamp);

 private:
  Bus& bus_;
  Dialect dialect_;
  std::map<std::string, std::uint64_t> next_seq_;
};

// Bounded FIFO subscriber. On overflow the oldest message is dropped so a
// slow reader never stalls publishers.
class Inbox {
 public:
  Inbox(Bus& bus, const std::string& topic, std::size_t capacity = 4096);
  ~Inbox();
  Inbox(const Inbox&) = delete;
  Inbox& operator=(const Inbox&) = delete;

  std::optional<Message> TryPop();
  std::optional<Message> PopFor(double seconds);
  std::vector<Message> Drain();
  std::size_t dropped() const;

 private:
  struct State {
    std::mutex mutex;
    std::condition_variable ready;
    std::deque<Message> queue;
    std::size_t capacity = 0;
    std::size_t dropped = 0;
  };
  Bus& bus_;
  std::shared_ptr<State> state_;
  Bus::Token token_ = 0;
};

}  // namespace twinlink::bus
