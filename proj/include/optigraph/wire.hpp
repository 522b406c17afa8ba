// Copyright 2026 The OptiGraph Authors
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

#include <cstdint>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "optigraph/serialize.hpp"

namespace optigraph {

/// Connection loss, timeout or a malformed frame.
class TransportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Error raised on a worker and relayed to the caller.
class RemoteError : public std::runtime_error {
 public:
  RemoteError(std::string type, const std::string& message)
      : std::runtime_error(message), type_(std::move(type)) {}
  const std::string& type() const { return type_; }

 private:
  std::string type_;
};

/// One protocol record. Responses use kind "ok" or "error".
struct WireMessage {
  std::uint64_t request_id = 0;
  std::string kind;
  std::string graph_handle;
  Json body = Json::object();
};

/// Payload text with keys in the fixed order request_id, kind,
/// graph_handle, body.
std::string encode_payload(const WireMessage& m);
WireMessage decode_payload(std::string_view payload);

/// 4-byte big-endian length followed by the payload bytes.
std::string encode_frame(std::string_view payload);
std::uint32_t decode_length(const unsigned char header[4]);
/// Splits a complete frame into its payload; throws on length mismatch.
std::string_view frame_payload(std::string_view frame);

/// Thread-safe frame log, one line per frame: 8 hex digits of the payload
/// length, a space, then the payload.
class Transcript {
 public:
  void record(std::string_view payload);
  std::vector<std::string> lines() const;
  void write(std::ostream& out) const;

  struct Entry {
    std::uint32_t length;
    WireMessage message;
  };
  static Entry parse_line(std::string_view line);

 private:
  mutable std::mutex mu_;
  std::vector<std::string> lines_;
};

/// Checks that every response answers exactly one earlier request and
/// every request is answered. Returns an empty string on success.
std::string check_pairing(const std::vector<std::string>& transcript_lines);

}  // namespace optigraph
