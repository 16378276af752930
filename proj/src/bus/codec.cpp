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

#include "twinlink/bus/codec.hpp"

#include <string>

#include "twinlink/bus/schema.hpp"

namespace twinlink::bus {

namespace {

constexpr std::size_t kHeaderBytes = 4;

std::uint32_t ReadLength(std::span<const std::uint8_t> bytes) {
  return (std::uint32_t{bytes[0]} << 24) | (std::uint32_t{bytes[1]} << 16) |
         (std::uint32_t{bytes[2]} << 8) | std::uint32_t{bytes[3]};
}

Json ToDocument(const Envelope& e) {
  Json doc = Json::object();
  doc["topic"] = e.topic;
  doc["dialect"] = std::string(ToString(e.dialect));
  doc["seq"] = e.seq;
  doc["timestamp"] = e.timestamp;
  doc["payload"] = e.payload;
  return doc;
}

Envelope FromDocument(std::span<const std::uint8_t> body) {
  Json doc;
  try {
    doc = Json::parse(body.begin(), body.end());
  } catch (const Json::parse_error& e) {
    throw BusError(std::string("malformed frame document: ") + e.what());
  }
  if (!doc.is_object() || doc.size() != 5) {
    throw BusError("frame document must be an object with exactly 5 keys");
  }
  const auto field = [&](const char* key) -> const Json& {
    const auto it = doc.find(key);
    if (it == doc.end()) throw BusError(std::string("frame document missing '") + key + "'");
    return *it;
  };
  Envelope e;
  const Json& topic = field("topic");
  const Json& dialect = field("dialect");
  const Json& seq = field("seq");
  const Json& timestamp = field("timestamp");
  if (!topic.is_string() || !dialect.is_string() || !seq.is_number_unsigned() ||
      !timestamp.is_number()) {
    throw BusError("frame document header has the wrong types");
  }
  e.topic = topic.get<std::string>();
  const auto d = DialectFromString(dialect.get<std::string>());
  if (!d) throw BusError("unknown dialect '" + dialect.get<std::string>() + "'");
  e.dialect = *d;
  e.seq = seq.get<std::uint64_t>();
  e.timestamp = timestamp.get<double>();
  e.payload = field("payload");
  ValidatePayload(e.topic, e.dialect, e.payload);
  return e;
}

}  // namespace

std::vector<std::uint8_t> EncodeFrame(const Envelope& envelope) {
  ValidatePayload(envelope.topic, envelope.dialect, envelope.payload);
  const std::string body = ToDocument(envelope).dump();
  if (body.size() > kMaxFrameBytes) throw BusError("envelope exceeds the maximum frame size");
  const auto n = static_cast<std::uint32_t>(body.size());
  std::vector<std::uint8_t> frame;
  frame.reserve(kHeaderBytes + body.size());
  frame.push_back(static_cast<std::uint8_t>(n >> 24));
  frame.push_back(static_cast<std::uint8_t>(n >> 16));
  frame.push_back(static_cast<std::uint8_t>(n >> 8));
  frame.push_back(static_cast<std::uint8_t>(n));
  frame.insert(frame.end(), body.begin(), body.end());
  return frame;
}

std::optional<Envelope> DecodeFrame(std::span<const std::uint8_t> bytes) {
  if (bytes.empty()) return std::nullopt;
  if (bytes.size() < kHeaderBytes) throw BusError("truncated frame: incomplete length prefix");
  const std::size_t declared = ReadLength(bytes);
  const std::size_t actual = bytes.size() - kHeaderBytes;
  if (declared > kMaxFrameBytes) throw BusError("frame length exceeds the maximum frame size");
  if (declared > actual) {
    throw BusError("truncated frame: declared " + std::to_string(declared) + " bytes, got " +
                   std::to_string(actual));
  }
  if (declared < actual) {
    throw BusError("length mismatch: declared " + std::to_string(declared) + " bytes, got " +
                   std::to_string(actual));
  }
  return FromDocument(bytes.subspan(kHeaderBytes));
}

void FrameReader::Append(std::span<const std::uint8_t> bytes) {
  if (offset_ > 0 && offset_ == buffer_.size()) {
    buffer_.clear();
    offset_ = 0;
  }
  buffer_.insert(buffer_.end(), bytes.begin(), bytes.end());
}

std::optional<Envelope> FrameReader::Next() {
  const std::span<const std::uint8_t> pending(buffer_.data() + offset_,
                                              buffer_.size() - offset_);
  if (pending.size() < kHeaderBytes) return std::nullopt;
  const std::size_t declared = ReadLength(pending);
  if (declared > kMaxFrameBytes) throw BusError("frame length exceeds the maximum frame size");
  if (pending.size() < kHeaderBytes + declared) return std::nullopt;
  offset_ += kHeaderBytes + declared;
  Envelope e = FromDocument(pending.subspan(kHeaderBytes, declared));
  if (offset_ > (1u << 16) && offset_ * 2 > buffer_.size()) {
    buffer_.erase(buffer_.begin(), buffer_.begin() + static_cast<std::ptrdiff_t>(offset_));
    offset_ = 0;
  }
  return e;
}

}  // namespace twinlink::bus
