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

#include <optional>
#include <string>
#include <vector>

#include "optigraph/benders.hpp"
#include "optigraph/models.hpp"

namespace optigraph {

enum class SolveMode { kMonolithic, kBenders, kBendersRemote };

SolveMode parse_solve_mode(const std::string& text);
std::string_view mode_name(SolveMode m);

struct RunOptions {
  SolveMode mode = SolveMode::kMonolithic;
  std::size_t workers = 3;  // remote mode: workers besides the main one
  Transport transport = Transport::kInProcess;
  /// host:port of running worker daemons; replaces spawning when nonempty.
  std::vector<std::string> connect;
  BuildMode build = BuildMode::kBatched;
  BendersConfig benders;
  SolverConfig solver;
  bool want_dump = false;
  Transcript* transcript = nullptr;
};

struct RunResult {
  SolveStatus status = SolveStatus::kIterationLimit;
  double objective = 0.0;
  double bound = 0.0;
  double seconds = 0.0;  // model build and solve
  std::size_t variables = 0;
  std::size_t rows = 0;
  std::optional<BendersState> benders;
  std::string dump;  // canonical dump of the flattened model, on request
};

/// Builds the plan as the mode requires and solves it.
RunResult run_model(const ModelPlan& plan, const RunOptions& options);

/// Human-readable summary, one "key value" pair per line.
std::string summary(const RunResult& r, SolveMode mode);

}  // namespace optigraph
