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

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace optigraph {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Raised for invalid model mutations (duplicate labels, foreign variables,
/// inverted bounds, malformed names).
class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a graph does not have the shape an algorithm requires.
class StructureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// 128-bit identifier. Generated randomly so ids minted on different
/// workers never collide.
struct Uuid {
  std::array<std::uint8_t, 16> bytes{};

  static Uuid generate();
  static Uuid parse(std::string_view text);
  std::string str() const;
  bool is_nil() const;

  auto operator<=>(const Uuid&) const = default;
};

template <class Tag>
struct StrongId {
  Uuid value;

  static StrongId generate() { return {Uuid::generate()}; }
  static StrongId parse(std::string_view text) { return {Uuid::parse(text)}; }
  std::string str() const { return value.str(); }

  auto operator<=>(const StrongId&) const = default;
};

using NodeId = StrongId<struct NodeTag>;
using EdgeId = StrongId<struct EdgeTag>;
using GraphId = StrongId<struct GraphTag>;

/// A variable is addressed by its owning node and a dense per-node index.
/// Node ids are globally unique, so a VariableId is meaningful across
/// workers.
struct VariableId {
  NodeId node;
  std::uint32_t index = 0;

  auto operator<=>(const VariableId&) const = default;
};

struct ConstraintId {
  NodeId node;
  std::uint32_t index = 0;

  auto operator<=>(const ConstraintId&) const = default;
};

enum class Integrality { kContinuous, kInteger };

struct VariableBounds {
  double lower = 0.0;
  double upper = kInf;
  Integrality integrality = Integrality::kContinuous;

  bool is_integer() const { return integrality == Integrality::kInteger; }
  bool operator==(const VariableBounds&) const = default;
};

/// Sparse affine expression sum_i c_i x_i + constant. Terms with an exactly
/// zero coefficient are never stored.
class AffineExpr {
 public:
  using Terms = std::map<VariableId, double>;

  AffineExpr() = default;
  explicit AffineExpr(double constant) : constant_(constant) {}
  AffineExpr(VariableId v, double coefficient = 1.0);

  const Terms& terms() const { return terms_; }
  double constant() const { return constant_; }
  std::size_t size() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }

  double coefficient(const VariableId& v) const;
  void add_term(const VariableId& v, double coefficient);
  void add_constant(double c) { constant_ += c; }

  /// Value at a point; missing variables are a std::out_of_range.
  double evaluate(const std::function<double(const VariableId&)>& value) const;

  AffineExpr& operator+=(const AffineExpr& other);
  AffineExpr& operator-=(const AffineExpr& other);
  AffineExpr& operator*=(double k);

  bool operator==(const AffineExpr&) const = default;

 private:
  Terms terms_;
  double constant_ = 0.0;
};

AffineExpr expr_add(const AffineExpr& a, const AffineExpr& b);
AffineExpr expr_scale(const AffineExpr& a, double k);

AffineExpr operator+(AffineExpr a, const AffineExpr& b);
AffineExpr operator-(AffineExpr a, const AffineExpr& b);
AffineExpr operator-(AffineExpr a);
AffineExpr operator*(double k, AffineExpr a);
AffineExpr operator*(AffineExpr a, double k);

enum class Sense { kLessEqual, kEqual, kGreaterEqual };

std::string_view sense_symbol(Sense s);
Sense parse_sense(std::string_view symbol);

/// body (sense) rhs. A body constant is legal; flattening moves it to the rhs.
struct Constraint {
  AffineExpr body;
  Sense sense = Sense::kLessEqual;
  double rhs = 0.0;

  bool operator==(const Constraint&) const = default;
};

Constraint operator<=(AffineExpr lhs, const AffineExpr& rhs);
Constraint operator>=(AffineExpr lhs, const AffineExpr& rhs);
Constraint operator<=(AffineExpr lhs, double rhs);
Constraint operator>=(AffineExpr lhs, double rhs);
/// Equality row; spelled as a function because AffineExpr keeps value
/// equality for operator==.
Constraint eq(AffineExpr lhs, const AffineExpr& rhs);
Constraint eq(AffineExpr lhs, double rhs);

/// Deterministic variable key: `label[:name]` followed by `[i,j,...]` when
/// subscripts are present. Labels and names must be nonempty and free of
/// '[', ']' and ','.
std::string canonical_name(std::string_view node_label, std::string_view var_name,
                           std::span<const std::int64_t> subscripts = {});

/// Throws ModelError unless `text` is usable as a node label or variable name.
void validate_identifier(std::string_view text, std::string_view what);

/// The part of a canonical name after the node label, e.g. "[:vCAP][3]".
std::string_view name_suffix(std::string_view canonical);

/// Shortest decimal text that parses back to exactly `value`.
std::string format_double(double value);

}  // namespace optigraph

template <class Tag>
struct std::hash<optigraph::StrongId<Tag>> {
  std::size_t operator()(const optigraph::StrongId<Tag>& id) const noexcept {
    std::size_t h = 0;
    for (auto b : id.value.bytes) h = h * 131 + b;
    return h;
  }
};

template <>
struct std::hash<optigraph::VariableId> {
  std::size_t operator()(const optigraph::VariableId& v) const noexcept {
    return std::hash<optigraph::NodeId>{}(v.node) * 31 + v.index;
  }
};
