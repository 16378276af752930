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

#include <filesystem>
#include <string_view>

#include "twinlink/kinematics/arm_model.hpp"

namespace twinlink {

// Parses the YAML arm description documented in docs/arm-format.md.
// Throws ParseError (with the offending line) for malformed text and
// ValidationError for documents that break an ArmModel invariant.
ArmModel LoadArmDescription(std::string_view text);
ArmModel LoadArmDescriptionFile(const std::filesystem::path& path);

}  // namespace twinlink
