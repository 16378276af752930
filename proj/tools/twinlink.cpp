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

#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>
#include <thread>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "twinlink/app/live.hpp"
#include "twinlink/app/replay.hpp"
#include "twinlink/app/scenario.hpp"
#include "twinlink/app/scripted.hpp"
#include "twinlink/errors.hpp"
#include "twinlink/motion/resolve.hpp"

namespace {

std::atomic<bool> g_stop{false};

void OnSignal(int) { g_stop = true; }

void ConfigureLogging() {
  spdlog::set_level(spdlog::level::warn);
  if (const char* level = std::getenv("TWINLINK_LOG")) {
    const auto parsed = spdlog::level::from_str(level);
    // from_str maps unknown names to off; only accept the spelled-out "off".
    if (parsed != spdlog::level::off || std::string_view(level) == "off") {
      spdlog::set_level(parsed);
    } else {
      spdlog::warn("ignoring TWINLINK_LOG='{}'", level);
    }
  }
}

int Serve(const std::string& config, const std::string& listen) {
  try {
    const twinlink::Scenario scenario = twinlink::LoadScenario(config);
    twinlink::bus::GatewayOptions options;
    std::tie(options.address, options.port) = twinlink::bus::ParseListenAddress(listen);
    twinlink::LiveServer server(scenario, options);
    server.Start();
    std::cout << fmt::format("serving {} on {}:{}", scenario.arm.name, options.address,
                             server.port())
              << std::endl;
    std::signal(SIGINT, OnSignal);
    std::signal(SIGTERM, OnSignal);
    while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(100));
    server.Stop();
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "serve: " << e.what() << "\n";
    return 1;
  }
}

// Random stacked-policy problems of the sizes the motion layer produces.
int Bench(int instances, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> joints(1, 7), count(1, 5), rows(1, 6);
  std::vector<std::vector<twinlink::TaskPolicyd>> problems;
  for (int i = 0; i < instances; ++i) {
    const int n = joints(rng);
    std::vector<twinlink::TaskPolicyd> policies;
    for (int k = count(rng); k > 0; --k) {
      const int m = rows(rng);
      twinlink::TaskPolicyd p;
      std::normal_distribution<double> normal;
      p.jacobian = Eigen::MatrixXd::NullaryExpr(m, n, [&] { return normal(rng); });
      p.desired_accel = Eigen::VectorXd::NullaryExpr(m, [&] { return normal(rng); });
      const Eigen::MatrixXd b = Eigen::MatrixXd::NullaryExpr(m, m, [&] { return normal(rng); });
      p.metric = b * b.transpose();
      policies.push_back(std::move(p));
    }
    problems.push_back(std::move(policies));
  }
  double checksum = 0.0;
  const auto start = std::chrono::steady_clock::now();
  for (const auto& policies : problems) checksum += twinlink::Resolve(policies).sum();
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::cout << fmt::format("{} instances in {:.6f} s ({:.2f} us each), checksum {:.6e}\n",
                           instances, seconds, 1e6 * seconds / std::max(1, instances), checksum);
  return 0;
}

int Script(const std::string& config, const std::string& kind, const std::string& out,
           const std::vector<double>& goal, double duration) {
  try {
    const twinlink::Scenario scenario = twinlink::LoadScenario(config);
    std::vector<twinlink::RawPoseSample> samples;
    if (kind == "tower") {
      samples = twinlink::ScriptTowerDemo(scenario);
    } else {
      if (goal.size() != 3) throw twinlink::Error("--goal takes three numbers");
      samples = twinlink::ScriptReachAndHold(scenario, {goal[0], goal[1], goal[2]}, 2.0,
                                             duration);
    }
    std::ofstream file(out);
    if (!file) throw twinlink::Error("cannot write '" + out + "'");
    file << twinlink::FormatTrajectory(samples);
    return file ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "script: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  ConfigureLogging();
  CLI::App app{"twinlink: digital-twin teleoperation"};
  app.require_subcommand(1);

  twinlink::ReplayFiles files;
  std::uint64_t seed = 0;
  auto* replay = app.add_subcommand("replay", "Run a recorded trajectory headlessly");
  replay->add_option("--config", files.config, "Scenario file")->required();
  replay->add_option("--trajectory", files.trajectory, "Trajectory file")->required();
  replay->add_option("--out", files.out_dir, "Output directory")->required();
  auto* seed_opt = replay->add_option("--seed", seed, "Latency jitter seed");

  std::string serve_config, listen = "127.0.0.1:8765";
  auto* serve = app.add_subcommand("serve", "Host a live session for socket clients");
  serve->add_option("--config", serve_config, "Scenario file")->required();
  serve->add_option("--listen", listen, "host:port")->capture_default_str();

  int instances = 10000;
  std::uint64_t bench_seed = 1;
  auto* bench = app.add_subcommand("bench", "Time the policy resolve step");
  bench->add_option("--solver-instances", instances, "Random problems")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  bench->add_option("--seed", bench_seed)->capture_default_str();

  std::string script_config, kind = "tower", out;
  std::vector<double> goal;
  double duration = 60.0;
  auto* script = app.add_subcommand("script", "Write a scripted operator trajectory");
  script->add_option("--config", script_config, "Scenario file")->required();
  script->add_option("--kind", kind)->check(CLI::IsMember({"tower", "reach"}))
      ->capture_default_str();
  script->add_option("--out", out, "Trajectory file")->required();
  script->add_option("--goal", goal, "reach: robot-frame point x y z")->expected(3);
  script->add_option("--duration", duration, "reach: seconds")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  if (*replay) {
    if (*seed_opt) files.seed = seed;
    return twinlink::ReplayCommand(files, std::cout, std::cerr);
  }
  if (*serve) return Serve(serve_config, listen);
  if (*bench) return Bench(instances, bench_seed);
  return Script(script_config, kind, out, goal, duration);
}
