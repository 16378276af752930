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

#include "twinlink/bus/schema.hpp"

#include <cmath>
#include <set>

namespace twinlink::bus {

namespace {

FieldSpec Num(std::string name, bool required = true) {
  return {std::move(name), FieldKind::kNumber, required};
}
FieldSpec Vec(std::string name, int length, bool required = true) {
  return {std::move(name), FieldKind::kNumberArray, required, length};
}
FieldSpec Single(FieldSpec spec) {
  spec.single_precision = true;
  return spec;
}
FieldSpec Of(std::string name, FieldKind kind, bool required = true) {
  return {std::move(name), kind, required};
}

std::vector<TopicSchema> BuildSchemas() {
  return {
      {std::string(topics::kRawInput),
       {Vec("pos", 3), Vec("quat", 4), Num("grip", false), Num("thumb", false),
        Num("index", false), Of("calibrate", FieldKind::kBool, false)},
       {Vec("position", 3), Vec("orientation", 4), Num("grip_fraction", false),
        Num("thumb_flexion", false), Num("index_flexion", false),
        Of("set_origin", FieldKind::kBool, false)}},
      {std::string(topics::kTargetPose),
       {Vec("pos", 3), Vec("quat", 4)},
       {Vec("position", 3), Vec("orientation", 4)}},
      {std::string(topics::kJointStates),
       {Of("name", FieldKind::kStringArray), Single(Vec("pos_deg", -1)),
        Single(Vec("vel_deg", -1))},
       {Of("names", FieldKind::kStringArray), Vec("position_rad", -1),
        Vec("velocity_rad", -1)}},
      {std::string(topics::kGripperCmd),
       {Num("aperture_fraction")},
       {Num("open_ratio")}},
      {std::string(topics::kWorldState),
       {Num("t"), Of("phase", FieldKind::kString), Num("phase_elapsed"),
        Of("cubes", FieldKind::kObjectArray), Num("gripper_aperture"),
        Vec("zone_center", 3), Num("zone_half_extent"), Vec("control_point", 7)},
       {Num("stamp"), Of("session_phase", FieldKind::kString), Num("phase_time"),
        Of("objects", FieldKind::kObjectArray), Num("gripper_width"),
        Vec("zone_center_xyz", 3), Num("zone_half_size"), Vec("tracked_point", 7)}},
      {std::string(topics::kEvents),
       {Of("kind", FieldKind::kString), Of("cube_id", FieldKind::kNullableInteger),
        Num("time"), Of("stats", FieldKind::kObject, false)},
       {Of("event_type", FieldKind::kString), Of("object_id", FieldKind::kNullableInteger),
        Num("stamp"), Of("session_stats", FieldKind::kObject, false)}},
      {std::string(topics::kHandshake),
       {Of("arm", FieldKind::kObject), Of("scenario", FieldKind::kObject)},
       {Of("arm", FieldKind::kObject), Of("scenario", FieldKind::kObject)}},
  };
}

bool FiniteNumber(const Json& v) {
  return v.is_number() && (!v.is_number_float() || std::isfinite(v.get<double>()));
}

bool FiniteNumber(const Json& v, bool single) {
  if (!FiniteNumber(v)) return false;
  if (!single) return true;
  const double x = v.get<double>();
  return static_cast<double>(static_cast<float>(x)) == x;
}

bool Matches(const FieldSpec& spec, const Json& v) {
  switch (spec.kind) {
    case FieldKind::kNumber:
      return FiniteNumber(v, spec.single_precision);
    case FieldKind::kInteger:
      return v.is_number_integer();
    case FieldKind::kNullableInteger:
      return v.is_null() || v.is_number_integer();
    case FieldKind::kBool:
      return v.is_boolean();
    case FieldKind::kString:
      return v.is_string();
    case FieldKind::kNumberArray:
      if (!v.is_array()) return false;
      if (spec.length >= 0 && v.size() != static_cast<std::size_t>(spec.length)) return false;
      for (const Json& x : v) {
        if (!FiniteNumber(x, spec.single_precision)) return false;
      }
      return true;
    case FieldKind::kStringArray:
      if (!v.is_array()) return false;
      for (const Json& x : v) {
        if (!x.is_string()) return false;
      }
      return true;
    case FieldKind::kObject:
      return v.is_object();
    case FieldKind::kObjectArray:
      if (!v.is_array()) return false;
      for (const Json& x : v) {
        if (!x.is_object()) return false;
      }
      return true;
  }
  return false;
}

}  // namespace

std::string_view ToString(Dialect d) { return d == Dialect::kA ? "A" : "B"; }

std::optional<Dialect> DialectFromString(std::string_view name) {
  if (name == "A") return Dialect::kA;
  if (name == "B") return Dialect::kB;
  return std::nullopt;
}

const std::vector<TopicSchema>& AllSchemas() {
  static const std::vector<TopicSchema> schemas = BuildSchemas();
  return schemas;
}

const TopicSchema* FindSchema(std::string_view topic) {
  for (const TopicSchema& s : AllSchemas()) {
    if (s.topic == topic) return &s;
  }
  return nullptr;
}

const FieldSpec* FindField(std::string_view topic, Dialect dialect, std::string_view field) {
  const TopicSchema* schema = FindSchema(topic);
  if (schema == nullptr) return nullptr;
  for (const FieldSpec& spec : schema->fields(dialect)) {
    if (spec.name == field) return &spec;
  }
  return nullptr;
}

void ValidatePayload(std::string_view topic, Dialect dialect, const Json& payload) {
  const TopicSchema* schema = FindSchema(topic);
  if (schema == nullptr) throw BusError("unknown topic schema '" + std::string(topic) + "'");
  const std::string where =
      std::string(topic) + " (dialect " + std::string(ToString(dialect)) + ")";
  if (!payload.is_object()) throw BusError(where + ": payload must be an object");
  std::set<std::string> declared;
  for (const FieldSpec& spec : schema->fields(dialect)) {
    declared.insert(spec.name);
    const auto it = payload.find(spec.name);
    if (it == payload.end()) {
      if (spec.required) throw BusError(where + ": missing field '" + spec.name + "'");
      continue;
    }
    if (!Matches(spec, *it)) throw BusError(where + ": field '" + spec.name + "' has the wrong type");
  }
  for (const auto& [key, value] : payload.items()) {
    if (!declared.count(key)) throw BusError(where + ": undeclared field '" + key + "'");
  }
}

}  // namespace twinlink::bus
