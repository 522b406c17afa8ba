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
#include <string>
#include <vector>

#include "optigraph/program.hpp"
#include "optigraph/remote.hpp"

namespace optigraph {

/// Storage sizing and inventory LP.
struct StorageParams {
  int T = 20;
  double alpha = 10;
  std::vector<double> beta;   // purchase cost per period
  std::vector<double> gamma;  // sale price per period
  double zeta = 2;
  double d_sell = 50;
  double d_save = 20;
  double d_buy = 15;
  double y_bar = 10;

  /// The reference data set, truncated or extended to T periods.
  static StorageParams defaults(int T = 20);
  void validate() const;
};

/// Toy two-level capacity expansion model: planning builds plus a weekly
/// emission allocation, and one operations subproblem per week.
struct ToyCemParams {
  int zones = 3;
  int weeks = 4;
  int techs = 2;
  int hours = 4;  // per week
  bool integer_builds = false;
  std::uint64_t seed = 1;

  void validate() const;
};

struct ModelPart {
  std::string label;
  BuildProgram program;
};

/// A model as one program per subgraph plus links between subgraphs,
/// all addressed by canonical names.
struct ModelPlan {
  std::string label = "graph";
  std::vector<ModelPart> parts;
  std::vector<NamedConstraint> links;
  std::size_t root = 0;
};

ModelPlan storage_plan(const StorageParams& p);
ModelPlan toy_cem_plan(const ToyCemParams& p);

/// Subgraph per part under one top graph; links become top-level edges.
OptiGraph build_local(const ModelPlan& plan);

/// Top graph on the main worker, part i on workers[i % workers.size()],
/// links as InterWorkerEdges. Parts on distinct workers build concurrently.
RemoteOptiGraph build_remote(Cluster& cluster, const ModelPlan& plan, const std::vector<WorkerId>& workers,
                             BuildMode mode = BuildMode::kBatched);

/// Default placement: root on the first worker, the remaining parts
/// round-robin over all workers after it (or over all when only one).
std::vector<WorkerId> default_assignment(const ModelPlan& plan, const std::vector<WorkerId>& workers);

/// Largest |a_max / a_min| over the nonzero coefficients of any row.
double max_row_ratio(const StandardFormProblem& p);

}  // namespace optigraph
