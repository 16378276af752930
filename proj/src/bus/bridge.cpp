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

#include "twinlink/bus/bridge.hpp"

#include <numbers>
#include <set>

#include "twinlink/bus/schema.hpp"

namespace twinlink::bus {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

Json Scale(const Json& value, double factor, bool forward, bool single) {
  const auto apply = [&](const Json& x) -> Json {
    if (!x.is_number()) throw BusError("scaled bridge field holds a non-numeric value");
    const double v = x.get<double>();
    if (forward) return v * factor;
    return single ? static_cast<double>(static_cast<float>(v / factor)) : v / factor;
  };
  if (value.is_array()) {
    Json out = Json::array();
    for (const Json& x : value) out.push_back(apply(x));
    return out;
  }
  return apply(value);
}

}  // namespace

Bridge::Bridge(std::vector<BridgeRule> rules) {
  for (BridgeRule& rule : rules) {
    std::set<std::string> a_names, b_names;
    for (const FieldMapping& m : rule.fields) {
      if (!a_names.insert(m.a_name).second || !b_names.insert(m.b_name).second) {
        throw BusError("bridge rule for '" + rule.topic + "' is not a bijection");
      }
      if (m.scale && !(*m.scale != 0.0)) {
        throw BusError("bridge rule for '" + rule.topic + "' has a zero scale");
      }
    }
    const std::string topic = rule.topic;
    if (!rules_.emplace(topic, std::move(rule)).second) {
      throw BusError("duplicate bridge rule for '" + topic + "'");
    }
  }
}

Bridge Bridge::Default() {
  return Bridge({
      {std::string(topics::kRawInput),
       {{"pos", "position", {}},
        {"quat", "orientation", {}},
        {"grip", "grip_fraction", {}},
        {"thumb", "thumb_flexion", {}},
        {"index", "index_flexion", {}},
        {"calibrate", "set_origin", {}}}},
      {std::string(topics::kTargetPose),
       {{"pos", "position", {}}, {"quat", "orientation", {}}}},
      {std::string(topics::kJointStates),
       {{"name", "names", {}},
        {"pos_deg", "position_rad", kDegToRad},
        {"vel_deg", "velocity_rad", kDegToRad}}},
      {std::string(topics::kGripperCmd), {{"aperture_fraction", "open_ratio", {}}}},
      {std::string(topics::kWorldState),
       {{"t", "stamp", {}},
        {"phase", "session_phase", {}},
        {"phase_elapsed", "phase_time", {}},
        {"cubes", "objects", {}},
        {"gripper_aperture", "gripper_width", {}},
        {"zone_center", "zone_center_xyz", {}},
        {"zone_half_extent", "zone_half_size", {}},
        {"control_point", "tracked_point", {}}}},
      {std::string(topics::kEvents),
       {{"kind", "event_type", {}},
        {"cube_id", "object_id", {}},
        {"time", "stamp", {}},
        {"stats", "session_stats", {}}}},
  });
}

Envelope Bridge::Translate(const Envelope& envelope) const {
  const auto it = rules_.find(envelope.topic);
  if (it == rules_.end()) throw BusError("no bridge rule for topic '" + envelope.topic + "'");
  const bool forward = envelope.dialect == Dialect::kA;
  if (!envelope.payload.is_object()) throw BusError("bridge payload must be an object");
  Envelope out = envelope;
  out.dialect = Opposite(envelope.dialect);
  out.payload = Json::object();
  for (const auto& [key, value] : envelope.payload.items()) {
    const FieldMapping* mapping = nullptr;
    for (const FieldMapping& m : it->second.fields) {
      if ((forward ? m.a_name : m.b_name) == key) {
        mapping = &m;
        break;
      }
    }
    if (mapping == nullptr) {
      throw BusError("field '" + key + "' on '" + envelope.topic + "' has no bridge mapping");
    }
    const std::string& name = forward ? mapping->b_name : mapping->a_name;
    if (!mapping->scale) {
      out.payload[name] = value;
      continue;
    }
    const FieldSpec* a_spec = FindField(envelope.topic, Dialect::kA, mapping->a_name);
    const bool single = a_spec != nullptr && a_spec->single_precision;
    out.payload[name] = Scale(value, *mapping->scale, forward, single);
  }
  return out;
}

}  // namespace twinlink::bus
