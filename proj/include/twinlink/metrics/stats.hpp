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

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "twinlink/errors.hpp"
#include "twinlink/twin/world.hpp"

namespace twinlink {

struct SessionLog {
  std::vector<TaskEvent> events;
  double session_duration = 600.0;
};

// Rates are percentages; nullopt where the denominator is zero.
struct SessionStats {
  int picks = 0;
  int places = 0;
  int drops = 0;
  int collapses = 0;
  int towers = 0;
  std::optional<double> placing_rate;         // places / picks
  std::optional<double> dropping_rate;        // drops / picks
  std::optional<double> collapse_rate;        // collapses / places
  std::optional<double> still_in_place_rate;  // undisturbed places / picks
  std::vector<double> tower_times;            // s since the preceding Reset
};

class LogCorruptError : public Error {
 public:
  using Error::Error;
};

// Throws LogCorruptError when timestamps decrease, a Pick is not followed by
// exactly one Place or Drop of the same cube before the next Pick, or an
// outcome has no Pick.
SessionStats ComputeSessionStats(const SessionLog& log);

struct RateSummary {
  double min = 0.0;
  double mean = 0.0;
  double std = 0.0;  // population standard deviation
  double max = 0.0;
  int sessions = 0;  // sessions with the rate defined
  int excluded = 0;  // sessions where it was undefined
};

enum class RateKind { kPlacing, kDropping, kCollapse, kStillInPlace };
inline constexpr RateKind kAllRates[] = {RateKind::kPlacing, RateKind::kDropping,
                                         RateKind::kCollapse, RateKind::kStillInPlace};
std::string RateLabel(RateKind kind);
std::optional<double> RateOf(const SessionStats& stats, RateKind kind);

// One row per rate (Placing, Dropping, Collapse, Still in Place), columns
// Min, Mean +- Std, Max.
struct CohortStats {
  std::optional<RateSummary> placing;
  std::optional<RateSummary> dropping;
  std::optional<RateSummary> collapse;
  std::optional<RateSummary> still_in_place;

  const std::optional<RateSummary>& row(RateKind kind) const;
};

// Throws Error when no session has any pick.
CohortStats AggregateCohort(std::span<const SessionStats> sessions);

struct TowerLevel {
  int k = 0;
  double population_percent = 0.0;  // sessions with >= k towers
  int sessions = 0;
  double mean_time = 0.0;      // of the k-th tower time
  double variance_time = 0.0;  // population variance
};

// Levels k = 1..max towers; levels no session reaches are omitted.
std::vector<TowerLevel> TowerPopulationSummary(std::span<const SessionStats> sessions);

// "timestamp kind cube_id" per line, '-' for an absent cube.
void WriteEventLog(std::ostream& out, std::span<const TaskEvent> events);
std::vector<TaskEvent> ParseEventLog(const std::string& text);

nlohmann::json SessionStatsToJson(const SessionStats& stats);
nlohmann::json CohortToJson(const CohortStats& cohort);
// rate,min,mean,std,max,sessions,excluded
std::string CohortToCsv(const CohortStats& cohort);
// Fixed-width text table in the Min / Mean +- Std / Max layout.
std::string CohortToTable(const CohortStats& cohort);

}  // namespace twinlink
