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

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "twinlink/bus/envelope.hpp"

namespace twinlink::bus {

// Frames larger than this are rejected before any allocation.
inline constexpr std::size_t kMaxFrameBytes = 16u << 20;

// 4-byte big-endian length followed by the envelope as compact UTF-8 JSON
// with lexicographically sorted keys (docs/wire.md).
std::vector<std::uint8_t> EncodeFrame(const Envelope& envelope);

// Decodes exactly one frame occupying all of `bytes`. Returns nullopt for an
// empty input (nothing has arrived yet). Throws BusError for a truncated
// frame, a declared length that disagrees with the byte count, malformed
// JSON, or a payload that fails its topic schema.
std::optional<Envelope> DecodeFrame(std::span<const std::uint8_t> bytes);

// Incremental decoder for a byte stream.
class FrameReader {
 public:
  void Append(std::span<const std::uint8_t> bytes);
  // Next complete envelope, or nullopt if more bytes are needed. Throws
  // BusError on a malformed frame; the reader is unusable afterwards.
  std::optional<Envelope> Next();
  std::size_t buffered() const { return buffer_.size() - offset_; }

 private:
  std::vector<std::uint8_t> buffer_;
  std::size_t offset_ = 0;
};

}  // namespace twinlink::bus
