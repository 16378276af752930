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

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "twinlink/bus/envelope.hpp"

namespace twinlink::bus {

enum class FieldKind {
  kNumber,
  kInteger,
  kNullableInteger,
  kBool,
  kString,
  kNumberArray,
  kStringArray,
  kObject,
  kObjectArray,
};

struct FieldSpec {
  std::string name;
  FieldKind kind = FieldKind::kNumber;
  bool required = true;
  int length = -1;  // fixed length for kNumberArray, -1 for any
  // Numbers must be exactly representable as 32-bit floats.
  bool single_precision = false;
};

struct TopicSchema {
  std::string topic;
  std::vector<FieldSpec> dialect_a;
  std::vector<FieldSpec> dialect_b;

  const std::vector<FieldSpec>& fields(Dialect d) const {
    return d == Dialect::kA ? dialect_a : dialect_b;
  }
};

// Every schema known to the bus, in a fixed order.
const std::vector<TopicSchema>& AllSchemas();
const TopicSchema* FindSchema(std::string_view topic);
const FieldSpec* FindField(std::string_view topic, Dialect dialect, std::string_view field);

// Throws BusError naming the topic and the offending field. Numbers must be
// finite; fields outside the schema are rejected.
void ValidatePayload(std::string_view topic, Dialect dialect, const Json& payload);

}  // namespace twinlink::bus
