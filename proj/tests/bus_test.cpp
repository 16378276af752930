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

#include <cmath>
#include <numbers>
#include <random>
#include <thread>

#include <gtest/gtest.h>

#include "twinlink/bus/bridge.hpp"
#include "twinlink/bus/codec.hpp"
#include "twinlink/bus/latency.hpp"
#include "twinlink/bus/pubsub.hpp"
#include "twinlink/bus/schema.hpp"
#include "support/corpus.hpp"

namespace twinlink::bus {
namespace {

using testing::RandomEnvelope;

TEST(Codec, RoundTripsEveryTopicAndDialect) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 50; ++i) {
    for (const TopicSchema& schema : AllSchemas()) {
      for (Dialect d : {Dialect::kA, Dialect::kB}) {
        const Envelope e = RandomEnvelope(schema, d, rng);
        const auto decoded = DecodeFrame(EncodeFrame(e));
        ASSERT_TRUE(decoded.has_value());
        EXPECT_EQ(*decoded, e) << schema.topic;
      }
    }
  }
}

TEST(Codec, FrameIsBigEndianLengthThenSortedJson) {
  Envelope e;
  e.topic = std::string(topics::kGripperCmd);
  e.seq = 5;
  e.timestamp = 1.5;
  e.payload = {{"open_ratio", 0.25}};
  const auto frame = EncodeFrame(e);
  const std::string body(frame.begin() + 4, frame.end());
  EXPECT_EQ(body,
            R"({"dialect":"B","payload":{"open_ratio":0.25},"seq":5,"timestamp":1.5,)"
            R"("topic":"/gripper_cmd"})");
  const std::uint32_t n = (frame[0] << 24) | (frame[1] << 16) | (frame[2] << 8) | frame[3];
  EXPECT_EQ(n, body.size());
}

TEST(Codec, EmptyInputIsNothing) {
  EXPECT_FALSE(DecodeFrame({}).has_value());
}

TEST(Codec, LengthMismatchIsAnError) {
  Envelope e;
  e.topic = std::string(topics::kGripperCmd);
  e.payload = {{"open_ratio", 1.0}};
  auto frame = EncodeFrame(e);
  frame.push_back('x');
  EXPECT_THROW(DecodeFrame(frame), BusError);
  frame.pop_back();
  frame.pop_back();
  EXPECT_THROW(DecodeFrame(frame), BusError);
  EXPECT_THROW(DecodeFrame(std::vector<std::uint8_t>{0, 0}), BusError);
  const std::vector<std::uint8_t> huge{0xFF, 0xFF, 0xFF, 0xFF};
  EXPECT_THROW(DecodeFrame(huge), BusError);
}

TEST(Codec, SchemaViolationsAreRejected) {
  Envelope e;
  e.topic = std::string(topics::kGripperCmd);
  e.payload = {{"aperture_fraction", 1.0}};  // dialect A name on a B envelope
  EXPECT_THROW(EncodeFrame(e), BusError);
  e.topic = "/nope";
  e.payload = Json::object();
  EXPECT_THROW(EncodeFrame(e), BusError);
  e.topic = std::string(topics::kTargetPose);
  e.payload = {{"position", {1, 2}}, {"orientation", {1, 0, 0, 0}}};
  EXPECT_THROW(EncodeFrame(e), BusError);
  e.topic = std::string(topics::kJointStates);
  e.dialect = Dialect::kA;
  e.payload = {{"name", {"a"}}, {"pos_deg", {0.1}}, {"vel_deg", {0.0}}};
  EXPECT_THROW(EncodeFrame(e), BusError);  // 0.1 is not a float
}

TEST(FrameReader, ReassemblesArbitrarySplits) {
  std::mt19937_64 rng(8);
  std::vector<Envelope> sent;
  std::vector<std::uint8_t> stream;
  for (int i = 0; i < 200; ++i) {
    const TopicSchema& schema = AllSchemas()[i % AllSchemas().size()];
    sent.push_back(RandomEnvelope(schema, i % 2 ? Dialect::kA : Dialect::kB, rng));
    const auto frame = EncodeFrame(sent.back());
    stream.insert(stream.end(), frame.begin(), frame.end());
  }
  FrameReader reader;
  std::vector<Envelope> received;
  std::size_t pos = 0;
  std::uniform_int_distribution<std::size_t> chunk(1, 300);
  while (pos < stream.size()) {
    const std::size_t n = std::min(chunk(rng), stream.size() - pos);
    reader.Append(std::span<const std::uint8_t>(stream.data() + pos, n));
    pos += n;
    while (auto e = reader.Next()) received.push_back(std::move(*e));
  }
  EXPECT_EQ(received, sent);
  EXPECT_EQ(reader.buffered(), 0u);
}

TEST(FrameReader, MalformedBodyThrows) {
  FrameReader reader;
  const std::vector<std::uint8_t> bad{0, 0, 0, 3, '{', '1', '}'};
  reader.Append(bad);
  EXPECT_THROW(reader.Next(), BusError);
}

TEST(Bridge, RoundTripIsIdentityForEveryRuledTopic) {
  const Bridge bridge = Bridge::Default();
  std::mt19937_64 rng(21);
  int checked = 0;
  for (const TopicSchema& schema : AllSchemas()) {
    if (!bridge.HasRule(schema.topic)) continue;
    for (int i = 0; i < 200; ++i) {
      const Envelope a = RandomEnvelope(schema, Dialect::kA, rng);
      const Envelope b = bridge.Translate(a);
      EXPECT_EQ(b.dialect, Dialect::kB);
      EXPECT_NO_THROW(ValidatePayload(b.topic, b.dialect, b.payload));
      EXPECT_EQ(bridge.Translate(b), a) << schema.topic;
      ++checked;
    }
  }
  EXPECT_EQ(checked, 6 * 200);
}

TEST(Bridge, UnscaledTopicsRoundTripFromEitherSide) {
  const Bridge bridge = Bridge::Default();
  std::mt19937_64 rng(22);
  for (const TopicSchema& schema : AllSchemas()) {
    if (!bridge.HasRule(schema.topic) || schema.topic == topics::kJointStates) continue;
    for (int i = 0; i < 50; ++i) {
      const Envelope b = RandomEnvelope(schema, Dialect::kB, rng);
      EXPECT_EQ(bridge.Translate(bridge.Translate(b)), b);
    }
  }
}

TEST(Bridge, DegreesBecomeRadians) {
  Envelope a;
  a.topic = std::string(topics::kJointStates);
  a.dialect = Dialect::kA;
  a.payload = {{"name", {"j"}}, {"pos_deg", {180.0}}, {"vel_deg", {-90.0}}};
  const Envelope b = Bridge::Default().Translate(a);
  EXPECT_NEAR(b.payload["position_rad"][0].get<double>(), std::numbers::pi, 1e-12);
  EXPECT_NEAR(b.payload["velocity_rad"][0].get<double>(), -std::numbers::pi / 2, 1e-12);
  EXPECT_EQ(b.payload["names"], Json::array({"j"}));
}

TEST(Bridge, UnruledTopicNamesTheTopic) {
  Envelope e;
  e.topic = std::string(topics::kHandshake);
  try {
    Bridge::Default().Translate(e);
    FAIL() << "expected BusError";
  } catch (const BusError& err) {
    EXPECT_NE(std::string(err.what()).find("/handshake"), std::string::npos);
  }
  e.topic = std::string(topics::kGripperCmd);
  e.payload = {{"bogus", 1}};
  EXPECT_THROW(Bridge::Default().Translate(e), BusError);
}

TEST(Bridge, RejectsNonBijectiveRules) {
  EXPECT_THROW(Bridge({{"/t", {{"a", "x", {}}, {"b", "x", {}}}}}), BusError);
  EXPECT_THROW(Bridge({{"/t", {{"a", "x", {}}, {"a", "y", {}}}}}), BusError);
  EXPECT_THROW(Bridge({{"/t", {}}, {"/t", {}}}), BusError);
}

Envelope Numbered(const std::string& topic, std::uint64_t seq) {
  Envelope e;
  e.topic = topic;
  e.seq = seq;
  return e;
}

TEST(Latency, DeliversAtTheDelayAndNotBefore) {
  LatencyQueue queue({0.5, 0.0, 1});
  queue.Enqueue(Numbered("/x", 0), 1.0);
  EXPECT_TRUE(queue.Dequeue(1.0).empty());
  EXPECT_TRUE(queue.Dequeue(1.4999).empty());
  const auto out = queue.Dequeue(1.5);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].deliver_at, 1.5);
  EXPECT_EQ(out[0].sent_at, 1.0);
  EXPECT_EQ(queue.size(), 0u);
}

TEST(Latency, ZeroDelayIsImmediate) {
  LatencyQueue queue({0.0, 0.0, 1});
  queue.Enqueue(Numbered("/x", 0), 2.0);
  EXPECT_EQ(queue.Dequeue(2.0).size(), 1u);
}

TEST(Latency, JitterKeepsPerTopicOrderAndBounds) {
  const double delay = 0.5, jitter = 0.2, tick = 1.0 / 120;
  LatencyQueue queue({delay, jitter, 99});
  std::vector<std::uint64_t> expected;
  std::vector<DelayedMessage> delivered;
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> gap(0.0, 0.01);
  double now = 0.0;
  for (std::uint64_t i = 0; i < 1000; ++i) {
    now += gap(rng);
    queue.Enqueue(Numbered("/joint_states", i), now);
    expected.push_back(i);
    for (auto& m : queue.Dequeue(now)) delivered.push_back(std::move(m));
  }
  for (double t = now; queue.size() > 0; t += tick) {
    for (auto& m : queue.Dequeue(t)) delivered.push_back(std::move(m));
  }
  ASSERT_EQ(delivered.size(), 1000u);
  for (std::size_t i = 0; i < delivered.size(); ++i) {
    EXPECT_EQ(delivered[i].envelope.seq, expected[i]);
    EXPECT_GE(delivered[i].deliver_at - delivered[i].sent_at, delay);
    EXPECT_LE(delivered[i].deliver_at - delivered[i].sent_at, delay + jitter + tick);
  }
}

TEST(Latency, TopicsAreIndependentLanes) {
  LatencyQueue queue({0.5, 0.0, 1});
  queue.Enqueue(Numbered("/a", 0), 0.0);
  queue.Enqueue(Numbered("/b", 0), 0.1);
  queue.Enqueue(Numbered("/a", 1), 0.2);
  const auto out = queue.Dequeue(0.65);
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].envelope.topic, "/a");
  EXPECT_EQ(out[1].envelope.topic, "/b");
}

TEST(Latency, InvalidConfigs) {
  EXPECT_THROW(LatencyQueue({-0.1, 0.0, 1}), ValidationError);
  EXPECT_THROW(LatencyQueue({0.5, -0.1, 1}), ValidationError);
  EXPECT_THROW(LatencyQueue({0.1, 0.2, 1}), ValidationError);
}

JointState Joints(std::initializer_list<double> q) {
  JointState s;
  s.positions = Eigen::Map<const Eigen::VectorXd>(q.begin(), static_cast<Eigen::Index>(q.size()));
  s.velocities = Eigen::VectorXd::Zero(s.positions.size());
  return s;
}

TEST(RateLimit, ClampsToCapTimesDt) {
  const double cap = 1.0, dt = 0.01;
  const JointState prev = Joints({0.0, 0.0});
  const JointState out = RateLimitJointCommand(prev, Joints({2 * cap * dt, -2 * cap * dt}), cap, dt);
  EXPECT_DOUBLE_EQ(out.positions(0), cap * dt);
  EXPECT_DOUBLE_EQ(out.positions(1), -cap * dt);
  EXPECT_DOUBLE_EQ(out.velocities(0), cap);
}

TEST(RateLimit, CompliantCommandIsUntouched) {
  const JointState next = Joints({0.004, -0.009});
  const JointState out = RateLimitJointCommand(Joints({0, 0}), next, 1.0, 0.01);
  EXPECT_EQ(out.positions, next.positions);
}

TEST(RateLimit, Errors) {
  EXPECT_THROW(RateLimitJointCommand(Joints({0}), Joints({1}), 1.0, 0.0), ValidationError);
  EXPECT_THROW(RateLimitJointCommand(Joints({0}), Joints({1}), 0.0, 0.01), ValidationError);
  EXPECT_THROW(RateLimitJointCommand(Joints({0}), Joints({1, 2}), 1.0, 0.01), DimensionError);
}

TEST(RateLimit, FuzzNeverExceedsCap) {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(-5, 5);
  std::uniform_real_distribution<double> dtd(1e-4, 0.1);
  for (int i = 0; i < 2000; ++i) {
    const double cap = std::abs(u(rng)) + 0.01, dt = dtd(rng);
    const JointState prev = Joints({u(rng), u(rng), u(rng)});
    const JointState out = RateLimitJointCommand(prev, Joints({u(rng), u(rng), u(rng)}), cap, dt);
    for (int j = 0; j < 3; ++j) {
      EXPECT_LE(std::abs(out.positions(j) - prev.positions(j)), cap * dt * (1 + 1e-12));
      EXPECT_LE(std::abs(out.velocities(j)), cap);
    }
  }
}

TEST(PubSub, FanOutPreservesOrderForEverySubscriber) {
  Bus bus;
  std::vector<std::uint64_t> first, second, all;
  bus.Subscribe("/x", [&](const Message& m) { first.push_back(m->seq); });
  bus.Subscribe("/x", [&](const Message& m) { second.push_back(m->seq); });
  bus.Subscribe("", [&](const Message& m) { all.push_back(m->seq); });
  Publisher pub(bus, Dialect::kB);
  for (int i = 0; i < 10; ++i) pub.Publish("/x", Json::object(), i);
  pub.Publish("/y", Json::object(), 11);
  EXPECT_EQ(first, second);
  EXPECT_EQ(first.size(), 10u);
  for (std::uint64_t i = 0; i < 10; ++i) EXPECT_EQ(first[i], i);
  EXPECT_EQ(all.size(), 11u);
  EXPECT_EQ(all.back(), 0u);  // /y has its own sequence
}

TEST(PubSub, UnsubscribeStopsDelivery) {
  Bus bus;
  int count = 0;
  const auto token = bus.Subscribe("/x", [&](const Message&) { ++count; });
  bus.Publish(Numbered("/x", 0));
  bus.Unsubscribe(token);
  bus.Publish(Numbered("/x", 1));
  EXPECT_EQ(count, 1);
}

TEST(PubSub, ConcurrentPublishersGiveConsistentOrder) {
  Bus bus;
  std::vector<std::uint64_t> first, second;
  bus.Subscribe("/x", [&](const Message& m) { first.push_back(m->seq); });
  bus.Subscribe("/x", [&](const Message& m) { second.push_back(m->seq); });
  std::vector<std::thread> threads;
  for (int t = 0; t < 4; ++t) {
    threads.emplace_back([&, t] {
      for (int i = 0; i < 250; ++i) bus.Publish(Numbered("/x", t * 1000 + i));
    });
  }
  for (auto& th : threads) th.join();
  EXPECT_EQ(first.size(), 1000u);
  EXPECT_EQ(first, second);
}

TEST(Inbox, QueuesAndDropsOldestWhenFull) {
  Bus bus;
  Inbox inbox(bus, "/x", 3);
  EXPECT_FALSE(inbox.TryPop().has_value());
  for (std::uint64_t i = 0; i < 5; ++i) bus.Publish(Numbered("/x", i));
  EXPECT_EQ(inbox.dropped(), 2u);
  const auto got = inbox.Drain();
  ASSERT_EQ(got.size(), 3u);
  EXPECT_EQ(got[0]->seq, 2u);
  EXPECT_EQ(got[2]->seq, 4u);
  EXPECT_FALSE(inbox.PopFor(0.01).has_value());
  std::thread later([&] { bus.Publish(Numbered("/x", 9)); });
  const auto m = inbox.PopFor(5.0);
  later.join();
  ASSERT_TRUE(m.has_value());
  EXPECT_EQ((*m)->seq, 9u);
}

}  // namespace
}  // namespace twinlink::bus
