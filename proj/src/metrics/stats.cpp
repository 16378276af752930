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

#include "twinlink/metrics/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

namespace twinlink {

namespace {

std::optional<double> Percent(int num, int den) {
  if (den == 0) return std::nullopt;
  return 100.0 * num / den;
}

std::string Where(const TaskEvent& e, std::size_t index) {
  return fmt::format("event {} ({} at t={:.6f})", index, ToString(e.kind), e.timestamp);
}

RateSummary Summarize(const std::vector<double>& values, int excluded) {
  RateSummary s;
  s.sessions = static_cast<int>(values.size());
  s.excluded = excluded;
  s.min = *std::min_element(values.begin(), values.end());
  s.max = *std::max_element(values.begin(), values.end());
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / values.size();
  double sq = 0.0;
  for (double v : values) sq += (v - s.mean) * (v - s.mean);
  s.std = std::sqrt(sq / values.size());
  // Guard against round-off pushing the mean outside [min, max].
  s.mean = std::clamp(s.mean, s.min, s.max);
  return s;
}

nlohmann::json OptionalJson(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

}  // namespace

SessionStats ComputeSessionStats(const SessionLog& log) {
  SessionStats stats;
  bool pick_open = false;
  int pick_cube = -1;  // cube of the unresolved Pick, -1 if unnamed
  double last_reset = 0.0;
  double last_time = -std::numeric_limits<double>::infinity();
  // Index of each cube's latest Place that has not been closed off by a
  // Pick or Reset; a Collapse of the cube marks it displaced.
  std::map<int, bool> open_place_displaced;
  int displaced_places = 0;

  for (std::size_t i = 0; i < log.events.size(); ++i) {
    const TaskEvent& e = log.events[i];
    if (e.timestamp < last_time) throw LogCorruptError(Where(e, i) + ": timestamp decreases");
    last_time = e.timestamp;
    switch (e.kind) {
      case EventKind::kPick:
        if (pick_open) throw LogCorruptError(Where(e, i) + ": previous Pick has no outcome");
        pick_open = true;
        pick_cube = e.cube_id.value_or(-1);
        ++stats.picks;
        if (e.cube_id) open_place_displaced.erase(*e.cube_id);
        break;
      case EventKind::kPlace:
      case EventKind::kDrop:
        if (!pick_open) throw LogCorruptError(Where(e, i) + ": outcome without a Pick");
        if (e.cube_id && pick_cube >= 0 && *e.cube_id != pick_cube) {
          throw LogCorruptError(Where(e, i) + ": outcome names a different cube than its Pick");
        }
        pick_open = false;
        if (e.kind == EventKind::kPlace) {
          ++stats.places;
          if (e.cube_id) open_place_displaced[*e.cube_id] = false;
        } else {
          ++stats.drops;
        }
        break;
      case EventKind::kCollapse:
        ++stats.collapses;
        if (e.cube_id) {
          const auto it = open_place_displaced.find(*e.cube_id);
          if (it != open_place_displaced.end() && !it->second) {
            it->second = true;
            ++displaced_places;
          }
        }
        break;
      case EventKind::kTowerComplete:
        ++stats.towers;
        stats.tower_times.push_back(e.timestamp - last_reset);
        break;
      case EventKind::kReset:
        last_reset = e.timestamp;
        open_place_displaced.clear();
        break;
    }
  }
  if (pick_open) throw LogCorruptError("log ends with a Pick that has no outcome");
  stats.placing_rate = Percent(stats.places, stats.picks);
  stats.dropping_rate = Percent(stats.drops, stats.picks);
  if (stats.picks > 0) {
    // Complementary by construction: places + drops == picks.
    stats.dropping_rate = 100.0 - *stats.placing_rate;
  }
  stats.collapse_rate = Percent(stats.collapses, stats.places);
  stats.still_in_place_rate = Percent(stats.places - displaced_places, stats.picks);
  return stats;
}

std::string RateLabel(RateKind kind) {
  switch (kind) {
    case RateKind::kPlacing: return "Placing Rate";
    case RateKind::kDropping: return "Dropping Rate";
    case RateKind::kCollapse: return "Collapse Rate";
    case RateKind::kStillInPlace: return "Still in Place Rate";
  }
  return "?";
}

std::optional<double> RateOf(const SessionStats& stats, RateKind kind) {
  switch (kind) {
    case RateKind::kPlacing: return stats.placing_rate;
    case RateKind::kDropping: return stats.dropping_rate;
    case RateKind::kCollapse: return stats.collapse_rate;
    case RateKind::kStillInPlace: return stats.still_in_place_rate;
  }
  return std::nullopt;
}

const std::optional<RateSummary>& CohortStats::row(RateKind kind) const {
  switch (kind) {
    case RateKind::kPlacing: return placing;
    case RateKind::kDropping: return dropping;
    case RateKind::kCollapse: return collapse;
    case RateKind::kStillInPlace: break;
  }
  return still_in_place;
}

CohortStats AggregateCohort(std::span<const SessionStats> sessions) {
  CohortStats cohort;
  bool any = false;
  for (RateKind kind : kAllRates) {
    std::vector<double> values;
    int excluded = 0;
    for (const SessionStats& s : sessions) {
      if (const auto v = RateOf(s, kind)) {
        values.push_back(*v);
      } else {
        ++excluded;
      }
    }
    if (values.empty()) continue;
    any = true;
    const RateSummary summary = Summarize(values, excluded);
    switch (kind) {
      case RateKind::kPlacing: cohort.placing = summary; break;
      case RateKind::kDropping: cohort.dropping = summary; break;
      case RateKind::kCollapse: cohort.collapse = summary; break;
      case RateKind::kStillInPlace: cohort.still_in_place = summary; break;
    }
  }
  if (!any) throw Error("cohort has no usable sessions (no session recorded a pick)");
  return cohort;
}

std::vector<TowerLevel> TowerPopulationSummary(std::span<const SessionStats> sessions) {
  std::vector<TowerLevel> levels;
  if (sessions.empty()) return levels;
  std::size_t max_k = 0;
  for (const SessionStats& s : sessions) max_k = std::max(max_k, s.tower_times.size());
  for (std::size_t k = 1; k <= max_k; ++k) {
    std::vector<double> times;
    for (const SessionStats& s : sessions) {
      if (s.tower_times.size() >= k) times.push_back(s.tower_times[k - 1]);
    }
    if (times.empty()) continue;
    TowerLevel level;
    level.k = static_cast<int>(k);
    level.sessions = static_cast<int>(times.size());
    level.population_percent = 100.0 * times.size() / sessions.size();
    double sum = 0.0;
    for (double t : times) sum += t;
    level.mean_time = sum / times.size();
    double sq = 0.0;
    for (double t : times) sq += (t - level.mean_time) * (t - level.mean_time);
    level.variance_time = sq / times.size();
    levels.push_back(level);
  }
  return levels;
}

void WriteEventLog(std::ostream& out, std::span<const TaskEvent> events) {
  for (const TaskEvent& e : events) {
    out << fmt::format("{:.6f} {} {}\n", e.timestamp, ToString(e.kind),
                       e.cube_id ? std::to_string(*e.cube_id) : std::string("-"));
  }
}

std::vector<TaskEvent> ParseEventLog(const std::string& text) {
  std::vector<TaskEvent> events;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream fields(line);
    TaskEvent e;
    std::string kind, cube;
    if (!(fields >> e.timestamp >> kind >> cube)) {
      throw ParseError("event line needs: timestamp kind cube_id", line_no);
    }
    const auto k = EventKindFromString(kind);
    if (!k) throw ParseError("unknown event kind '" + kind + "'", line_no);
    e.kind = *k;
    if (cube != "-") {
      try {
        e.cube_id = std::stoi(cube);
      } catch (const std::exception&) {
        throw ParseError("bad cube id '" + cube + "'", line_no);
      }
    }
    events.push_back(e);
  }
  return events;
}

nlohmann::json SessionStatsToJson(const SessionStats& stats) {
  return {
      {"picks", stats.picks},
      {"places", stats.places},
      {"drops", stats.drops},
      {"collapses", stats.collapses},
      {"towers", stats.towers},
      {"placing_rate", OptionalJson(stats.placing_rate)},
      {"dropping_rate", OptionalJson(stats.dropping_rate)},
      {"collapse_rate", OptionalJson(stats.collapse_rate)},
      {"still_in_place_rate", OptionalJson(stats.still_in_place_rate)},
      {"tower_times", stats.tower_times},
  };
}

nlohmann::json CohortToJson(const CohortStats& cohort) {
  nlohmann::json rows = nlohmann::json::array();
  for (RateKind kind : kAllRates) {
    const auto& r = cohort.row(kind);
    nlohmann::json row = {{"rate", RateLabel(kind)}};
    if (r) {
      row["min"] = r->min;
      row["mean"] = r->mean;
      row["std"] = r->std;
      row["max"] = r->max;
      row["sessions"] = r->sessions;
      row["excluded"] = r->excluded;
    } else {
      row["min"] = row["mean"] = row["std"] = row["max"] = nullptr;
    }
    rows.push_back(row);
  }
  return {{"columns", {"Min", "Mean ± Std", "Max"}}, {"rows", rows}};
}

std::string CohortToCsv(const CohortStats& cohort) {
  std::string out = "rate,min,mean,std,max,sessions,excluded\n";
  for (RateKind kind : kAllRates) {
    const auto& r = cohort.row(kind);
    if (r) {
      out += fmt::format("{},{:.4f},{:.4f},{:.4f},{:.4f},{},{}\n", RateLabel(kind), r->min,
                         r->mean, r->std, r->max, r->sessions, r->excluded);
    } else {
      out += fmt::format("{},,,,,0,\n", RateLabel(kind));
    }
  }
  return out;
}

std::string CohortToTable(const CohortStats& cohort) {
  std::string out = fmt::format("{:<20}|{:>9} |{:>20} |{:>9}\n", "", "Min", "Mean ± Std", "Max");
  for (RateKind kind : kAllRates) {
    const auto& r = cohort.row(kind);
    if (r) {
      out += fmt::format("{:<20}|{:>8.2f}% |{:>10.2f}% ± {:>5.2f}% |{:>8.2f}%\n",
                         RateLabel(kind), r->min, r->mean, r->std, r->max);
    } else {
      out += fmt::format("{:<20}|{:>9} |{:>20} |{:>9}\n", RateLabel(kind), "n/a", "n/a", "n/a");
    }
  }
  return out;
}

}  // namespace twinlink
