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

#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "support/oracles.hpp"
#include "twinlink/app/messages.hpp"
#include "twinlink/app/replay.hpp"
#include "twinlink/app/scenario.hpp"
#include "twinlink/app/scripted.hpp"
#include "twinlink/app/session.hpp"
#include "twinlink/bus/pubsub.hpp"
#include "twinlink/kinematics/forward_kinematics.hpp"

namespace twinlink {
namespace {

namespace fs = std::filesystem;
using testing::SourceDir;

fs::path Ur3() { return SourceDir() / "scenarios" / "ur3_like.ini"; }

std::string ReadText(const fs::path& path) {
  std::ifstream in(path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string Replace(std::string text, const std::string& from, const std::string& to) {
  const auto pos = text.find(from);
  EXPECT_NE(pos, std::string::npos) << from;
  return text.replace(pos, from.size(), to);
}

Scenario ParseVariant(const std::string& from, const std::string& to) {
  return ParseScenario(Replace(ReadText(Ur3()), from, to), Ur3().parent_path());
}

fs::path TempDir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("twinlink_app_test_" + name);
  fs::remove_all(dir);
  return dir;
}

TEST(Scenario, BundledScenariosLoad) {
  const Scenario ur3 = LoadScenario(Ur3());
  EXPECT_EQ(ur3.arm.joint_count(), 6);
  EXPECT_EQ(ur3.planes.size(), 4u);
  EXPECT_EQ(ur3.plane_names[0], "table");
  EXPECT_DOUBLE_EQ(ur3.motion.tick_dt, 1.0 / 120.0);
  EXPECT_EQ(ur3.latency.delay, 0.5);
  EXPECT_EQ(ur3.latency.seed, 7u);
  EXPECT_EQ(ur3.task.cube_side, 0.05);
  EXPECT_EQ(ur3.workspace.max, Eigen::Vector3d(0.50, 0.40, 0.40));

  const Scenario baxter = LoadScenario(SourceDir() / "scenarios" / "baxter_like.ini");
  EXPECT_EQ(baxter.arm.joint_count(), 7);
  EXPECT_NE(baxter.content_hash, ur3.content_hash);
}

TEST(Scenario, HashFollowsContent) {
  const Scenario a = LoadScenario(Ur3());
  const Scenario b = ParseVariant("speed_cap = 1.0", "speed_cap = 0.9");
  EXPECT_EQ(a.content_hash, LoadScenario(Ur3()).content_hash);
  EXPECT_NE(a.content_hash, b.content_hash);
}

TEST(Scenario, Fnv1aKnownVectors) {
  EXPECT_EQ(Fnv1a(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(Fnv1a("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(Fnv1a("foobar"), 0x85944171f73967e8ULL);
}

TEST(Scenario, Errors) {
  EXPECT_THROW(ParseVariant("[server]", "[bogus]"), ValidationError);
  EXPECT_THROW(ParseVariant("speed_cap", "speed_limit"), ValidationError);
  EXPECT_THROW(ParseVariant("description = ../data/arms/ur3_like.yaml", ""), ValidationError);
  EXPECT_THROW(ParseVariant("description = ../data/arms/ur3_like.yaml",
                            "description = ../data/arms/none.yaml"),
               Error);
  EXPECT_THROW(ParseVariant("min = 0.05 -0.40 0.02", "min = 0.60 -0.40 0.02"), ValidationError);
  EXPECT_THROW(ParseVariant("table = 0 0 1 0 0.01", "table = 0 0 1 0"), ValidationError);
  EXPECT_THROW(ParseVariant("table = 0 0 1 0 0.01", "table = 0 0 1 0 -0.01"), ValidationError);
  EXPECT_THROW(ParseVariant("tick_dt = 0.008333333333333333", "tick_dt = 0"), ValidationError);
  EXPECT_THROW(ParseVariant("jitter = 0.0", "jitter = 0.9"), ValidationError);
  EXPECT_THROW(ParseVariant("time_scale = 1.0", "time_scale = -1"), ValidationError);
  EXPECT_THROW(ParseVariant("cube_side = 0.05", "cube_side = abc"), ValidationError);
  try {
    ParseVariant("[latency]", "[latency");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_GT(e.line(), 0);
  }
  EXPECT_THROW(LoadScenario(SourceDir() / "scenarios" / "missing.ini"), ParseError);
}

TEST(Messages, RawInputRoundTrip) {
  RawPoseSample s;
  s.device_pose = Posed::FromXyzRpy({0.1, -0.2, 0.3}, {0.3, 0.2, 0.1});
  s.grip = 0.25;
  s.fingers = FingerFlexion{0.5, 0.75};
  const messages::RawInput back =
      messages::RawInputFromPayload(messages::RawInputPayload(s, true), 4.0);
  EXPECT_TRUE(back.set_origin);
  EXPECT_EQ(back.sample.timestamp, 4.0);
  EXPECT_EQ(back.sample.device_pose.position, s.device_pose.position);
  EXPECT_LT(back.sample.device_pose.orientation.angularDistance(s.device_pose.orientation),
            1e-12);
  EXPECT_EQ(back.sample.grip, s.grip);
  ASSERT_TRUE(back.sample.fingers);
  EXPECT_EQ(back.sample.fingers->index, 0.75);
}

TEST(Replay, OneTowerTrajectoryBuildsOneTower) {
  const Scenario scenario = LoadScenario(Ur3());
  const auto trajectory = LoadTrajectoryFile(SourceDir() / "scenarios" / "one_tower.traj");
  const ReplayResult r = RunReplay(scenario, trajectory);
  EXPECT_EQ(r.stats.picks, 3);
  EXPECT_EQ(r.stats.places, 3);
  EXPECT_EQ(r.stats.drops, 0);
  EXPECT_EQ(r.stats.collapses, 0);
  EXPECT_EQ(r.stats.towers, 1);
  EXPECT_LE(r.simulated_seconds, 120.0);
  EXPECT_EQ(r.log.events.front().kind, EventKind::kReset);
}

TEST(Replay, IsDeterministic) {
  const Scenario scenario = LoadScenario(Ur3());
  const auto trajectory = LoadTrajectoryFile(SourceDir() / "scenarios" / "one_tower.traj");
  const ReplayResult a = RunReplay(scenario, trajectory, 11);
  const ReplayResult b = RunReplay(scenario, trajectory, 11);
  EXPECT_EQ(a.log.events, b.log.events);
  EXPECT_EQ(a.ticks, b.ticks);
  EXPECT_EQ(a.seed, 11u);
}

TEST(Replay, ObserverSeesEveryTick) {
  const Scenario scenario = LoadScenario(Ur3());
  const auto trajectory = ScriptReachAndHold(scenario, {0.30, 0.10, 0.15}, 2.0, 4.0);
  std::uint64_t seen = 0;
  const ReplayResult r =
      RunReplay(scenario, trajectory, std::nullopt, [&](const TeleopSession&) { ++seen; });
  EXPECT_EQ(seen, r.ticks);
  EXPECT_EQ(r.stats.picks, 0);
}

TEST(Replay, ScriptedReachArrivesWithinAMillimetre) {
  const Scenario scenario = LoadScenario(Ur3());
  const Eigen::Vector3d goal(0.30, 0.10, 0.15);
  const auto trajectory = ScriptReachAndHold(scenario, goal, 2.0, 6.0);
  Posed last;
  RunReplay(scenario, trajectory, std::nullopt, [&](const TeleopSession& s) {
    last = ForwardKinematics(scenario.arm, s.joints().positions).control_point;
  });
  EXPECT_LT((last.position - goal).norm(), 1e-3);
}

TEST(ReplayCommand, WritesOutputsAndIsBitwiseRepeatable) {
  const fs::path out1 = TempDir("out1"), out2 = TempDir("out2");
  const ReplayFiles files{Ur3(), SourceDir() / "scenarios" / "one_tower.traj", out1, {}};
  std::ostringstream out, err;
  ASSERT_EQ(ReplayCommand(files, out, err), 0) << err.str();
  ReplayFiles again = files;
  again.out_dir = out2;
  ASSERT_EQ(ReplayCommand(again, out, err), 0);
  for (const char* name : {"events.log", "stats.json", "stats.csv", "manifest.json"}) {
    EXPECT_TRUE(fs::exists(out1 / name)) << name;
  }
  EXPECT_EQ(ReadText(out1 / "events.log"), ReadText(out2 / "events.log"));
  EXPECT_EQ(ReadText(out1 / "stats.json"), ReadText(out2 / "stats.json"));
  const auto manifest = nlohmann::json::parse(ReadText(out1 / "manifest.json"));
  EXPECT_EQ(manifest["seed"], 7);
  EXPECT_EQ(manifest["config_hash"].get<std::string>().size(), 16u);
  fs::remove_all(out1);
  fs::remove_all(out2);
}

TEST(ReplayCommand, MissingTrajectoryLeavesNoOutputs) {
  const fs::path out_dir = TempDir("missing");
  const ReplayFiles files{Ur3(), SourceDir() / "scenarios" / "nope.traj", out_dir, {}};
  std::ostringstream out, err;
  EXPECT_NE(ReplayCommand(files, out, err), 0);
  EXPECT_FALSE(fs::exists(out_dir));
  EXPECT_NE(err.str().find("nope.traj"), std::string::npos);
}

TEST(ReplayCommand, BadConfigIsReported) {
  const fs::path dir = TempDir("badcfg");
  fs::create_directories(dir);
  std::ofstream(dir / "bad.ini") << "[arm\n";
  const ReplayFiles files{dir / "bad.ini", SourceDir() / "scenarios" / "one_tower.traj",
                          dir / "out", {}};
  std::ostringstream out, err;
  EXPECT_NE(ReplayCommand(files, out, err), 0);
  EXPECT_FALSE(fs::exists(dir / "out"));
  fs::remove_all(dir);
}

RawPoseSample At(const Eigen::Vector3d& p, double t) {
  RawPoseSample s;
  s.device_pose = Posed::FromTranslation(p);
  s.timestamp = t;
  return s;
}

TEST(LiveSession, NothingMovesBeforeCalibration) {
  const Scenario scenario = LoadScenario(Ur3());
  bus::Bus bus;
  bus::Inbox targets(bus, std::string(bus::topics::kTargetPose));
  TeleopSession session(scenario, bus, SessionMode::kLive);
  for (int i = 0; i < 240; ++i) {
    if (i % 2 == 0) session.SubmitSample(At({0.2, 0.0, 0.0}, session.time()));
    session.Tick();
  }
  EXPECT_FALSE(session.calibration());
  EXPECT_TRUE(targets.Drain().empty());
  EXPECT_EQ(session.phase(), SessionPhase::kTraining);
}

TEST(LiveSession, CalibrateThenHoldConvergesToRest) {
  const Scenario scenario = LoadScenario(Ur3());
  bus::Bus bus;
  TeleopSession session(scenario, bus, SessionMode::kLive);
  const Eigen::Vector3d origin(1.0, 2.0, 1.5);
  session.SubmitSample(At(origin, 0.0), true);
  session.Tick();
  ASSERT_TRUE(session.calibration());
  // Move away, then come back to the calibration pose and hold.
  auto run = [&](const Eigen::Vector3d& device, double seconds) {
    const int ticks = static_cast<int>(seconds * 120);
    for (int i = 0; i < ticks; ++i) {
      if (i % 2 == 0) session.SubmitSample(At(device, session.time()));
      session.Tick();
    }
  };
  run(origin + Eigen::Vector3d(-0.08, 0.10, -0.05), 4.0);
  const Posed away = ForwardKinematics(scenario.arm, session.joints().positions).control_point;
  EXPECT_GT((away.position - session.rest_target().position).norm(), 0.05);
  run(origin, 6.0);
  const Posed back = ForwardKinematics(scenario.arm, session.joints().positions).control_point;
  EXPECT_LT((back.position - session.rest_target().position).norm(), 1e-3);
}

TEST(LiveSession, TaskPhaseEndsWithResetAndStats) {
  const Scenario scenario = LoadScenario(Ur3());
  bus::Bus bus;
  bus::Inbox events(bus, std::string(bus::topics::kEvents), 1 << 16);
  bus::Inbox snapshots(bus, std::string(bus::topics::kWorldState), 1 << 20);
  TeleopSession session(scenario, bus, SessionMode::kLive);
  const auto ticks_for = [&](double s) {
    return static_cast<std::uint64_t>(std::llround(s / scenario.motion.tick_dt));
  };
  while (session.ticks() < ticks_for(300.0)) session.Tick();
  EXPECT_EQ(session.phase(), SessionPhase::kTask);
  auto early = events.Drain();
  ASSERT_EQ(early.size(), 1u);  // the Reset that opens the task phase
  EXPECT_EQ(early[0]->payload["event_type"], "Reset");
  EXPECT_NEAR(early[0]->timestamp, 300.0, 1e-9);

  while (session.ticks() < ticks_for(900.0) - 1) session.Tick();
  EXPECT_EQ(session.phase(), SessionPhase::kTask);
  EXPECT_TRUE(events.Drain().empty());
  session.Tick();
  EXPECT_EQ(session.phase(), SessionPhase::kTraining);
  EXPECT_EQ(session.sessions_completed(), 1);
  const auto last = events.Drain();
  ASSERT_EQ(last.size(), 2u);
  EXPECT_EQ(last[0]->payload["event_type"], "Reset");
  EXPECT_EQ(last[1]->payload["event_type"], "SessionStats");
  EXPECT_NEAR(last[1]->timestamp, 900.0, 1e-9);
  EXPECT_EQ(last[1]->payload["session_stats"]["picks"], 0);
  EXPECT_TRUE(last[1]->payload["session_stats"]["placing_rate"].is_null());
  EXPECT_EQ(session.TaskLog().events.size(), 2u);

  // Snapshots go out every fourth tick.
  EXPECT_EQ(snapshots.Drain().size(), session.ticks() / 4);
}

}  // namespace
}  // namespace twinlink
