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

#include "optigraph/algebra.hpp"

#include <charconv>
#include <cmath>
#include <mutex>
#include <random>

namespace optigraph {

namespace {

std::mt19937_64& uuid_engine() {
  static std::mt19937_64 engine = [] {
    std::random_device rd;
    std::seed_seq seq{rd(), rd(), rd(), rd(), rd(), rd(), rd(), rd()};
    return std::mt19937_64(seq);
  }();
  return engine;
}

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

Uuid Uuid::generate() {
  static std::mutex mu;
  std::lock_guard lock(mu);
  Uuid id;
  auto& engine = uuid_engine();
  for (int half = 0; half < 2; ++half) {
    std::uint64_t word = engine();
    for (int i = 0; i < 8; ++i) id.bytes[half * 8 + i] = static_cast<std::uint8_t>(word >> (8 * i));
  }
  // RFC 4122 version 4, variant 1.
  id.bytes[6] = static_cast<std::uint8_t>((id.bytes[6] & 0x0f) | 0x40);
  id.bytes[8] = static_cast<std::uint8_t>((id.bytes[8] & 0x3f) | 0x80);
  return id;
}

Uuid Uuid::parse(std::string_view text) {
  Uuid id;
  std::size_t byte = 0;
  int pending = -1;
  for (char c : text) {
    if (c == '-') continue;
    int v = hex_value(c);
    if (v < 0 || byte >= 16) throw ModelError("malformed uuid '" + std::string(text) + "'");
    if (pending < 0) {
      pending = v;
    } else {
      id.bytes[byte++] = static_cast<std::uint8_t>(pending * 16 + v);
      pending = -1;
    }
  }
  if (byte != 16 || pending >= 0) throw ModelError("malformed uuid '" + std::string(text) + "'");
  return id;
}

std::string Uuid::str() const {
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(36);
  for (std::size_t i = 0; i < bytes.size(); ++i) {
    if (i == 4 || i == 6 || i == 8 || i == 10) out.push_back('-');
    out.push_back(kHex[bytes[i] >> 4]);
    out.push_back(kHex[bytes[i] & 0x0f]);
  }
  return out;
}

bool Uuid::is_nil() const {
  for (auto b : bytes)
    if (b != 0) return false;
  return true;
}

AffineExpr::AffineExpr(VariableId v, double coefficient) { add_term(v, coefficient); }

double AffineExpr::coefficient(const VariableId& v) const {
  auto it = terms_.find(v);
  return it == terms_.end() ? 0.0 : it->second;
}

void AffineExpr::add_term(const VariableId& v, double coefficient) {
  if (coefficient == 0.0) return;
  auto [it, inserted] = terms_.try_emplace(v, coefficient);
  if (!inserted) {
    it->second += coefficient;
    if (it->second == 0.0) terms_.erase(it);
  }
}

double AffineExpr::evaluate(const std::function<double(const VariableId&)>& value) const {
  double total = constant_;
  for (const auto& [v, c] : terms_) total += c * value(v);
  return total;
}

AffineExpr& AffineExpr::operator+=(const AffineExpr& other) {
  for (const auto& [v, c] : other.terms_) add_term(v, c);
  constant_ += other.constant_;
  return *this;
}

AffineExpr& AffineExpr::operator-=(const AffineExpr& other) {
  for (const auto& [v, c] : other.terms_) add_term(v, -c);
  constant_ -= other.constant_;
  return *this;
}

AffineExpr& AffineExpr::operator*=(double k) {
  if (k == 0.0) {
    terms_.clear();
    constant_ = 0.0;
    return *this;
  }
  for (auto it = terms_.begin(); it != terms_.end();) {
    it->second *= k;
    // Underflow can still produce an exact zero.
    if (it->second == 0.0)
      it = terms_.erase(it);
    else
      ++it;
  }
  constant_ *= k;
  return *this;
}

AffineExpr expr_add(const AffineExpr& a, const AffineExpr& b) {
  AffineExpr out = a;
  out += b;
  return out;
}

AffineExpr expr_scale(const AffineExpr& a, double k) {
  AffineExpr out = a;
  out *= k;
  return out;
}

AffineExpr operator+(AffineExpr a, const AffineExpr& b) { return a += b; }
AffineExpr operator-(AffineExpr a, const AffineExpr& b) { return a -= b; }
AffineExpr operator-(AffineExpr a) { return a *= -1.0; }
AffineExpr operator*(double k, AffineExpr a) { return a *= k; }
AffineExpr operator*(AffineExpr a, double k) { return a *= k; }

std::string_view sense_symbol(Sense s) {
  switch (s) {
    case Sense::kLessEqual:
      return "<=";
    case Sense::kEqual:
      return "==";
    case Sense::kGreaterEqual:
      return ">=";
  }
  return "?";
}

Sense parse_sense(std::string_view symbol) {
  if (symbol == "<=") return Sense::kLessEqual;
  if (symbol == "==") return Sense::kEqual;
  if (symbol == ">=") return Sense::kGreaterEqual;
  throw ModelError("unknown constraint sense '" + std::string(symbol) + "'");
}

namespace {

Constraint make_row(AffineExpr lhs, const AffineExpr& rhs, Sense sense) {
  lhs -= rhs;
  double constant = lhs.constant();
  lhs.add_constant(-constant);
  return Constraint{std::move(lhs), sense, -constant};
}

}  // namespace

Constraint operator<=(AffineExpr lhs, const AffineExpr& rhs) {
  return make_row(std::move(lhs), rhs, Sense::kLessEqual);
}
Constraint operator>=(AffineExpr lhs, const AffineExpr& rhs) {
  return make_row(std::move(lhs), rhs, Sense::kGreaterEqual);
}
Constraint eq(AffineExpr lhs, const AffineExpr& rhs) {
  return make_row(std::move(lhs), rhs, Sense::kEqual);
}
Constraint operator<=(AffineExpr lhs, double rhs) { return lhs <= AffineExpr(rhs); }
Constraint operator>=(AffineExpr lhs, double rhs) { return lhs >= AffineExpr(rhs); }
Constraint eq(AffineExpr lhs, double rhs) { return eq(std::move(lhs), AffineExpr(rhs)); }

void validate_identifier(std::string_view text, std::string_view what) {
  if (text.empty()) throw ModelError(std::string(what) + " must be nonempty");
  for (char c : text) {
    if (c == '[' || c == ']' || c == ',' || c == '\n' || c == ' ')
      throw ModelError(std::string(what) + " '" + std::string(text) +
                       "' contains a reserved character");
  }
}

std::string canonical_name(std::string_view node_label, std::string_view var_name,
                           std::span<const std::int64_t> subscripts) {
  validate_identifier(node_label, "node label");
  validate_identifier(var_name, "variable name");
  std::string out;
  out.reserve(node_label.size() + var_name.size() + 8);
  out.append(node_label).append("[:").append(var_name).append("]");
  if (!subscripts.empty()) {
    out.push_back('[');
    for (std::size_t i = 0; i < subscripts.size(); ++i) {
      if (i) out.push_back(',');
      out.append(std::to_string(subscripts[i]));
    }
    out.push_back(']');
  }
  return out;
}

std::string_view name_suffix(std::string_view canonical) {
  auto pos = canonical.find('[');
  return pos == std::string_view::npos ? std::string_view{} : canonical.substr(pos);
}

std::string format_double(double value) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (value == 0.0) return "0";  // folds -0
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, end);
}

}  // namespace optigraph
