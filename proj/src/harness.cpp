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

#include "optigraph/harness.hpp"

#include <chrono>
#include <sstream>

#include "optigraph/worker.hpp"

namespace optigraph {

SolveMode parse_solve_mode(const std::string& text) {
  if (text == "monolithic") return SolveMode::kMonolithic;
  if (text == "benders") return SolveMode::kBenders;
  if (text == "benders-remote") return SolveMode::kBendersRemote;
  throw ModelError("unknown mode '" + text + "' (monolithic, benders, benders-remote)");
}

std::string_view mode_name(SolveMode m) {
  switch (m) {
    case SolveMode::kMonolithic:
      return "monolithic";
    case SolveMode::kBenders:
      return "benders";
    case SolveMode::kBendersRemote:
      return "benders-remote";
  }
  return "?";
}

namespace {

void take_benders(RunResult& out, BendersState st) {
  out.status = st.converged ? SolveStatus::kOptimal : SolveStatus::kIterationLimit;
  out.objective = st.objective();
  out.bound = st.lower();
  out.benders = std::move(st);
}

}  // namespace

RunResult run_model(const ModelPlan& plan, const RunOptions& o) {
  const auto t0 = std::chrono::steady_clock::now();
  RunResult out;
  if (o.mode == SolveMode::kBendersRemote) {
    Cluster cluster;
    cluster.set_transcript(o.transcript);
    std::vector<WorkerId> workers{kMainWorker};
    if (o.connect.empty()) {
      if (o.workers == 0) throw ModelError("remote mode needs at least one worker");
      auto spawned = cluster.spawn_workers(o.workers, o.transport);
      workers.insert(workers.end(), spawned.begin(), spawned.end());
    } else {
      for (const auto& spec : o.connect) {
        auto [host, port] = parse_listen_spec(spec);
        workers.push_back(cluster.connect(host.empty() ? "127.0.0.1" : host, port));
      }
    }
    RemoteOptiGraph rg = build_remote(cluster, plan, default_assignment(plan, workers), o.build);
    if (o.want_dump) {
      StandardFormProblem f = flatten(collect_remote_graph(rg));
      out.variables = f.num_variables();
      out.rows = f.rows.size();
      out.dump = canonical_dump(f);
    }
    take_benders(out, run_benders(rg, rg.subgraphs()[plan.root], o.benders, o.solver));
  } else {
    OptiGraph g = build_local(plan);
    StandardFormProblem f = flatten(g);
    out.variables = f.num_variables();
    out.rows = f.rows.size();
    if (o.want_dump) out.dump = canonical_dump(f);
    if (o.mode == SolveMode::kMonolithic) {
      SolveResult r = solve(f, o.solver);
      out.status = r.status;
      out.objective = r.objective;
      out.bound = r.bound;
    } else {
      take_benders(out, run_benders(g, plan.root, o.benders, o.solver));
    }
  }
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

std::string summary(const RunResult& r, SolveMode mode) {
  std::ostringstream s;
  s << "mode " << mode_name(mode) << '\n' << "status " << status_name(r.status) << '\n';
  if (r.variables) s << "variables " << r.variables << '\n' << "rows " << r.rows << '\n';
  if (r.status == SolveStatus::kOptimal) {
    s << "objective " << format_double(r.objective) << '\n' << "bound " << format_double(r.bound) << '\n';
  }
  if (r.benders) {
    s << "iterations " << r.benders->iteration << '\n'
      << "gap " << format_double(r.benders->gap()) << '\n'
      << "converged " << (r.benders->converged ? "yes" : "no") << '\n'
      << "cuts " << r.benders->cuts.size() << '\n';
  }
  return s.str();
}

}  // namespace optigraph
