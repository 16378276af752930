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

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "twinlink/bus/envelope.hpp"

namespace twinlink::bus {

// One field renamed between dialects. When `scale` is set, numeric values
// (or every element of a numeric array) are multiplied by it going A -> B
// and divided by it going B -> A. Dialect-A fields declared single
// precision are rounded to the nearest float on the way back, which makes
// A -> B -> A exact for every valid A payload.
struct FieldMapping {
  std::string a_name;
  std::string b_name;
  std::optional<double> scale;
};

struct BridgeRule {
  std::string topic;
  std::vector<FieldMapping> fields;
};

class Bridge {
 public:
  // Throws BusError if a rule's mapping is not a bijection or a topic has
  // two rules.
  explicit Bridge(std::vector<BridgeRule> rules);

  // Rules for every bridged topic schema (all topics except the handshake).
  static Bridge Default();

  // Renames payload fields into the opposite dialect. seq and timestamp are
  // preserved. Throws BusError for an unruled topic or a payload field the
  // rule does not map.
  Envelope Translate(const Envelope& envelope) const;

  bool HasRule(const std::string& topic) const { return rules_.count(topic) > 0; }
  const std::map<std::string, BridgeRule>& rules() const { return rules_; }

 private:
  std::map<std::string, BridgeRule> rules_;
};

}  // namespace twinlink::bus
