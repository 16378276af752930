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

#include "twinlink/bus/pubsub.hpp"

#include <algorithm>
#include <chrono>

namespace twinlink::bus {

Bus::Token Bus::Subscribe(const std::string& topic, Callback callback) {
  std::lock_guard<std::mutex> lock(table_mutex_);
  const Token token = next_token_++;
  entries_.push_back({token, topic, std::make_shared<Callback>(std::move(callback))});
  return token;
}

void Bus::Unsubscribe(Token token) {
  std::lock_guard<std::mutex> lock(table_mutex_);
  entries_.erase(std::remove_if(entries_.begin(), entries_.end(),
                                [&](const Entry& e) { return e.token == token; }),
                 entries_.end());
}

void Bus::Publish(Message message) {
  std::lock_guard<std::mutex> order(publish_mutex_);
  std::vector<std::shared_ptr<Callback>> targets;
  {
    std::lock_guard<std::mutex> lock(table_mutex_);
    for (const Entry& e : entries_) {
      if (e.topic.empty() || e.topic == message->topic) targets.push_back(e.callback);
    }
  }
  for (const auto& callback : targets) (*callback)(message);
}

Envelope Publisher::Make(const std::string& topic, Json payload, double timestamp) {
  Envelope e;
  e.topic = topic;
  e.dialect = dialect_;
  e.seq = next_seq_[topic]++;
  e.timestamp = timestamp;
  e.payload = std::move(payload);
  return e;
}

Message Publisher::Publish(const std::string& topic, Json payload, double timestamp) {
  auto message = std::make_shared<const Envelope>(Make(topic, std::move(payload), timestamp));
  bus_.Publish(message);
  return message;
}

Inbox::Inbox(Bus& bus, const std::string& topic, std::size_t capacity)
    : bus_(bus), state_(std::make_shared<State>()) {
  state_->capacity = std::max<std::size_t>(1, capacity);
  std::weak_ptr<State> weak = state_;
  token_ = bus_.Subscribe(topic, [weak](const Message& m) {
    const auto state = weak.lock();
    if (!state) return;
    {
      std::lock_guard<std::mutex> lock(state->mutex);
      if (state->queue.size() >= state->capacity) {
        state->queue.pop_front();
        ++state->dropped;
      }
      state->queue.push_back(m);
    }
    state->ready.notify_one();
  });
}

Inbox::~Inbox() { bus_.Unsubscribe(token_); }

std::optional<Message> Inbox::TryPop() {
  std::lock_guard<std::mutex> lock(state_->mutex);
  if (state_->queue.empty()) return std::nullopt;
  Message m = std::move(state_->queue.front());
  state_->queue.pop_front();
  return m;
}

std::optional<Message> Inbox::PopFor(double seconds) {
  std::unique_lock<std::mutex> lock(state_->mutex);
  const auto timeout = std::chrono::duration<double>(seconds);
  if (!state_->ready.wait_for(lock, timeout, [&] { return !state_->queue.empty(); })) {
    return std::nullopt;
  }
  Message m = std::move(state_->queue.front());
  state_->queue.pop_front();
  return m;
}

std::vector<Message> Inbox::Drain() {
  std::lock_guard<std::mutex> lock(state_->mutex);
  std::vector<Message> out(std::make_move_iterator(state_->queue.begin()),
                           std::make_move_iterator(state_->queue.end()));
  state_->queue.clear();
  return out;
}

std::size_t Inbox::dropped() const {
  std::lock_guard<std::mutex> lock(state_->mutex);
  return state_->dropped;
}

}  // namespace twinlink::bus
