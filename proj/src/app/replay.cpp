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

#include "twinlink/app/replay.hpp"

#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "twinlink/errors.hpp"

namespace twinlink {

namespace {

std::string ReadAll(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void WriteFile(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << content;
  if (!out) throw Error("failed writing '" + path.string() + "'");
}

}  // namespace

ReplayResult RunReplay(const Scenario& scenario, std::span<const RawPoseSample> trajectory,
                       std::optional<std::uint64_t> seed,
                       const std::function<void(const TeleopSession&)>& observer) {
  Scenario run = scenario;
  if (seed) run.latency.seed = *seed;
  bus::Bus bus;
  TeleopSession session(run, bus, SessionMode::kReplay);

  const double last = trajectory.empty() ? 0.0 : trajectory.back().timestamp;
  const double end = std::min(last + kReplayTailSeconds, run.task.session_duration);
  std::size_t next_sample = 0;
  while (session.time() < end) {
    while (next_sample < trajectory.size() &&
           trajectory[next_sample].timestamp <= session.time()) {
      session.SubmitSample(trajectory[next_sample++]);
    }
    session.Tick();
    if (observer) observer(session);
  }

  ReplayResult result;
  result.log = session.TaskLog();
  result.stats = ComputeSessionStats(result.log);
  result.ticks = session.ticks();
  result.simulated_seconds = session.time();
  result.seed = run.latency.seed;
  return result;
}

int ReplayCommand(const ReplayFiles& files, std::ostream& out, std::ostream& err) {
  try {
    const Scenario scenario = LoadScenario(files.config);
    const std::vector<RawPoseSample> trajectory = LoadTrajectoryFile(files.trajectory);
    if (trajectory.empty()) throw ParseError("trajectory has no records", 0);
    const ReplayResult result = RunReplay(scenario, trajectory, files.seed);

    std::ostringstream events;
    WriteEventLog(events, result.log.events);

    nlohmann::json stats = {{"session", SessionStatsToJson(result.stats)}};
    std::string csv;
    if (result.stats.picks > 0) {
      const SessionStats one[] = {result.stats};
      const CohortStats cohort = AggregateCohort(one);
      stats["table"] = CohortToJson(cohort);
      csv = CohortToCsv(cohort);
    } else {
      stats["table"] = nullptr;
      csv = "rate,min,mean,std,max,sessions,excluded\n";
    }

    const std::string trajectory_text = ReadAll(files.trajectory);
    const nlohmann::json manifest = {
        {"seed", result.seed},
        {"config", files.config.string()},
        {"config_hash", fmt::format("{:016x}", scenario.content_hash)},
        {"trajectory", files.trajectory.string()},
        {"trajectory_hash", fmt::format("{:016x}", Fnv1a(trajectory_text))},
        {"arm", scenario.arm.name},
        {"ticks", result.ticks},
        {"tick_dt", scenario.motion.tick_dt},
        {"simulated_seconds", result.simulated_seconds},
        {"latency_delay", scenario.latency.delay},
        {"latency_jitter", scenario.latency.jitter},
        {"events", result.log.events.size()},
    };

    std::filesystem::create_directories(files.out_dir);
    WriteFile(files.out_dir / "events.log", events.str());
    WriteFile(files.out_dir / "stats.json", stats.dump(2) + "\n");
    WriteFile(files.out_dir / "stats.csv", csv);
    WriteFile(files.out_dir / "manifest.json", manifest.dump(2) + "\n");

    out << fmt::format("replayed {:.3f} s ({} ticks): {} picks, {} places, {} drops, "
                       "{} collapses, {} towers\n",
                       result.simulated_seconds, result.ticks, result.stats.picks,
                       result.stats.places, result.stats.drops, result.stats.collapses,
                       result.stats.towers);
    return 0;
  } catch (const std::exception& e) {
    err << "replay failed: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace twinlink
