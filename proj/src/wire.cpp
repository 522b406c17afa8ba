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

#include "optigraph/wire.hpp"

#include <cstdio>
#include <map>
#include <set>

namespace optigraph {

std::string encode_payload(const WireMessage& m) {
  Json j;
  j["request_id"] = m.request_id;
  j["kind"] = m.kind;
  j["graph_handle"] = m.graph_handle;
  j["body"] = m.body;
  return j.dump();
}

WireMessage decode_payload(std::string_view payload) {
  Json j = Json::parse(payload, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw TransportError("payload is not a JSON object");
  static const char* kKeys[] = {"request_id", "kind", "graph_handle", "body"};
  if (j.size() != 4) throw TransportError("payload must have exactly 4 fields");
  std::size_t i = 0;
  for (auto it = j.begin(); it != j.end(); ++it, ++i)
    if (it.key() != kKeys[i]) throw TransportError("payload field " + std::to_string(i) +
                                                   " must be '" + kKeys[i] + "'");
  WireMessage m;
  try {
    m.request_id = j["request_id"].get<std::uint64_t>();
    m.kind = j["kind"].get<std::string>();
    m.graph_handle = j["graph_handle"].get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw TransportError(std::string("malformed payload: ") + e.what());
  }
  m.body = std::move(j["body"]);
  return m;
}

std::string encode_frame(std::string_view payload) {
  if (payload.size() > 0xffffffffu) throw TransportError("payload too large for one frame");
  auto n = static_cast<std::uint32_t>(payload.size());
  std::string out;
  out.reserve(4 + payload.size());
  out.push_back(static_cast<char>((n >> 24) & 0xff));
  out.push_back(static_cast<char>((n >> 16) & 0xff));
  out.push_back(static_cast<char>((n >> 8) & 0xff));
  out.push_back(static_cast<char>(n & 0xff));
  out.append(payload);
  return out;
}

std::uint32_t decode_length(const unsigned char header[4]) {
  return (std::uint32_t{header[0]} << 24) | (std::uint32_t{header[1]} << 16) |
         (std::uint32_t{header[2]} << 8) | std::uint32_t{header[3]};
}

std::string_view frame_payload(std::string_view frame) {
  if (frame.size() < 4) throw TransportError("frame shorter than its header");
  std::uint32_t n = decode_length(reinterpret_cast<const unsigned char*>(frame.data()));
  if (frame.size() - 4 != n)
    throw TransportError("frame length " + std::to_string(n) + " does not match " +
                         std::to_string(frame.size() - 4) + " payload bytes");
  return frame.substr(4);
}

void Transcript::record(std::string_view payload) {
  char head[16];
  std::snprintf(head, sizeof(head), "%08zx ", payload.size());
  std::lock_guard lock(mu_);
  lines_.push_back(std::string(head) + std::string(payload));
}

std::vector<std::string> Transcript::lines() const {
  std::lock_guard lock(mu_);
  return lines_;
}

void Transcript::write(std::ostream& out) const {
  for (const auto& l : lines()) out << l << '\n';
}

Transcript::Entry Transcript::parse_line(std::string_view line) {
  if (line.size() < 9 || line[8] != ' ') throw TransportError("malformed transcript line");
  Entry e;
  e.length = static_cast<std::uint32_t>(std::stoul(std::string(line.substr(0, 8)), nullptr, 16));
  std::string_view payload = line.substr(9);
  if (payload.size() != e.length) throw TransportError("transcript length mismatch");
  e.message = decode_payload(payload);
  return e;
}

std::string check_pairing(const std::vector<std::string>& lines) {
  std::set<std::uint64_t> open, answered;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    auto e = Transcript::parse_line(lines[i]);
    const auto id = e.message.request_id;
    bool response = e.message.kind == "ok" || e.message.kind == "error";
    if (!response) {
      if (open.contains(id) || answered.contains(id))
        return "line " + std::to_string(i) + ": request id " + std::to_string(id) + " reused";
      open.insert(id);
    } else {
      if (!open.contains(id))
        return "line " + std::to_string(i) + ": response " + std::to_string(id) +
               " has no pending request";
      open.erase(id);
      answered.insert(id);
    }
  }
  if (!open.empty()) return std::to_string(open.size()) + " request(s) never answered";
  return {};
}

}  // namespace optigraph
