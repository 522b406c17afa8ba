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

#include <json.hpp>

#include "optigraph/graph.hpp"

namespace optigraph {

using Json = nlohmann::ordered_json;

/// Infinite bounds travel as null: a null lower bound is -inf and a null
/// upper bound is +inf.
Json bound_to_json(double value);
double lower_from_json(const Json& j);
double upper_from_json(const Json& j);

Json to_json(const VariableId& v);
VariableId variable_from_json(const Json& j);

Json to_json(const VariableBounds& b);
VariableBounds bounds_from_json(const Json& j);

/// {"terms": [[node, index, coef], ...], "constant": c}
Json to_json(const AffineExpr& e);
AffineExpr expr_from_json(const Json& j);

Json to_json(const Constraint& c);
Constraint constraint_from_json(const Json& j);

/// Full graph contents including ids, so a graph rebuilt from its JSON has
/// the same node, edge and variable identities.
Json graph_to_json(const OptiGraph& g);
OptiGraph graph_from_json(const Json& j);

}  // namespace optigraph
