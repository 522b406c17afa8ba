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

// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Reference values come from the brute-force and direct-solve
// oracles in oracles.hpp and model_oracles.hpp.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include "model_oracles.hpp"
#include "optigraph/benders.hpp"
#include "optigraph/harness.hpp"
#include "optigraph/remote.hpp"
#include "oracles.hpp"

using namespace optigraph;

namespace {

constexpr double kAgreement = 1e-3;  // relative objective agreement
constexpr double kGap = 5e-4;        // Benders gap used for every run
constexpr double kBoundTol = 1e-6;   // relative slack on LB <= opt <= UB
constexpr int kCutPoints = 25;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

double rel_diff(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

// Collects failures for one criterion.
class Verdict {
 public:
  void require(bool ok, const std::string& what) {
    ++checks_;
    if (!ok && failures_.size() < 5) failures_.push_back(what);
    failed_ = failed_ || !ok;
  }
  void note(const std::string& text) { notes_.push_back(text); }
  bool passed() const { return !failed_; }
  std::string detail() const {
    std::ostringstream s;
    s << checks_ << " checks";
    for (const auto& n : notes_) s << "; " << n;
    for (const auto& f : failures_) s << "; FAILED: " << f;
    return s.str();
  }

 private:
  std::size_t checks_ = 0;
  bool failed_ = false;
  std::vector<std::string> failures_;
  std::vector<std::string> notes_;
};

// Bound history, cut validity and negative control shared by every run.
struct RunChecks {
  Verdict* bounds;
  Verdict* cuts;
};

void check_bound_history(Verdict& v, const std::string& run, const BendersState& st, double optimum,
                         double gap) {
  const double tol = kBoundTol * std::max(1.0, std::abs(optimum));
  bool mono = true, sandwich = true;
  for (std::size_t k = 0; k < st.lower_bound.size(); ++k) {
    if (k > 0 && st.lower_bound[k] < st.lower_bound[k - 1] - 1e-9 * std::max(1.0, std::abs(st.lower_bound[k - 1])))
      mono = false;
    if (st.lower_bound[k] > optimum + tol || st.upper_bound[k] < optimum - tol) sandwich = false;
  }
  v.require(mono, run + ": lower bound decreased");
  v.require(sandwich, run + ": LB <= optimum <= UB violated");
  v.require(st.converged, run + ": not converged");
  v.require(!st.lower_bound.empty() && relative_gap(st.lower_bound.back(), st.upper_bound.back()) <= gap,
            run + ": terminal gap above the configured gap");
}

// Master points are mapped to names so the oracle never sees solver ids.
void check_cuts(Verdict& v, const std::string& run, const BendersSolver& solver, const BendersState& st,
                const oracle::RecourseOracle& recourse, std::uint64_t seed) {
  const StandardFormProblem& master = solver.master();
  auto named = [&](const std::map<VariableId, double>& x) {
    std::map<std::string, double> out;
    for (const auto& [id, value] : x) out[master.name_of(id)] = value;
    return out;
  };
  auto value = [&](std::size_t w, const std::map<VariableId, double>& x) { return recourse(w, named(x)); };
  auto points = solver.sample_master_points(kCutPoints, seed, st);
  v.require(points.size() == kCutPoints, run + ": could not sample master points");
  CutCheckReport ok = cut_validity_check(st, points, value);
  v.require(ok.passed, run + ": " + ok.failure);

  BendersState flipped = st;
  bool any_slope = false;
  for (auto& cut : flipped.cuts) {
    double at = 0.0;
    for (auto& [var, c] : cut.coefficients) {
      c = -c;
      at += c * cut.point.at(var);
      any_slope = any_slope || c != 0.0;
    }
    cut.intercept = cut.value - at;
  }
  if (any_slope) v.require(!cut_validity_check(flipped, points, value).passed, run + ": sign-flipped cuts accepted");
}

struct Solved {
  BendersState state;
  double seconds = 0.0;
};

Solved solve_local(const ModelPlan& plan, const OptiGraph& g, const BendersConfig& cfg, const SolverConfig& scfg,
                   const oracle::RecourseOracle& recourse, RunChecks checks, const std::string& run, double optimum,
                   std::uint64_t seed) {
  auto t0 = Clock::now();
  BendersSolver solver(g, plan.root, cfg, scfg);
  BendersState st = solver.run();
  Solved out{st, seconds_since(t0)};
  check_bound_history(*checks.bounds, run, st, optimum, cfg.rel_gap);
  check_cuts(*checks.cuts, run, solver, st, recourse, seed);
  return out;
}

Solved solve_remote(const ModelPlan& plan, Transport transport, const BendersConfig& cfg,
                    const oracle::RecourseOracle& recourse, RunChecks checks, const std::string& run,
                    double optimum, std::uint64_t seed) {
  auto t0 = Clock::now();
  Cluster c;
  auto spawned = c.spawn_workers(3, transport);
  std::vector<WorkerId> all{kMainWorker};
  all.insert(all.end(), spawned.begin(), spawned.end());
  RemoteOptiGraph rg = build_remote(c, plan, default_assignment(plan, all));
  BendersSolver solver(rg, rg.subgraphs()[plan.root], cfg);
  BendersState st = solver.run();
  Solved out{st, seconds_since(t0)};
  check_bound_history(*checks.bounds, run, st, optimum, cfg.rel_gap);
  check_cuts(*checks.cuts, run, solver, st, recourse, seed);
  return out;
}

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4g", x);
  return buf;
}

void report(int index, const std::string& name, const Verdict& v, bool& all) {
  std::cout << (v.passed() ? "PASS" : "FAIL") << " [" << index << "] " << name << ": " << v.detail() << std::endl;
  all = all && v.passed();
}

// Storage in all four modes.
void storage_runs(Verdict& equivalence, RunChecks checks) {
  ModelPlan plan = storage_plan(StorageParams::defaults());
  oracle::RecourseOracle recourse(plan);
  OptiGraph g = build_local(plan);
  auto t0 = Clock::now();
  SolveResult mono = solve_lp(flatten(g));
  const double mono_s = seconds_since(t0);
  equivalence.require(mono.optimal(), "storage monolithic not optimal");
  equivalence.require(mono_s < 10.0, "storage monolithic took " + fmt(mono_s) + " s");
  BendersConfig cfg;
  cfg.rel_gap = kGap;
  cfg.derive_theta_lower = true;

  std::vector<std::pair<std::string, Solved>> runs;
  runs.emplace_back("local", solve_local(plan, g, cfg, {}, recourse, checks, "storage local", mono.objective, 1));
  runs.emplace_back("inproc", solve_remote(plan, Transport::kInProcess, cfg, recourse, checks, "storage inproc",
                                           mono.objective, 2));
  runs.emplace_back("tcp", solve_remote(plan, Transport::kTcp, cfg, recourse, checks, "storage tcp",
                                        mono.objective, 3));
  double slowest = mono_s;
  for (const auto& [name, r] : runs) {
    equivalence.require(rel_diff(r.state.objective(), mono.objective) <= kAgreement,
                        "storage " + name + " objective " + fmt(r.state.objective()) + " vs " + fmt(mono.objective));
    equivalence.require(r.seconds < 10.0, "storage " + name + " took " + fmt(r.seconds) + " s");
    slowest = std::max(slowest, r.seconds);
  }
  equivalence.note("optimum " + fmt(mono.objective) + ", slowest run " + fmt(slowest) + " s");
}

void cem_runs(Verdict& equivalence, RunChecks checks) {
  double slowest = 0.0, worst = 0.0;
  int runs = 0;
  for (bool integer : {false, true}) {
    const int seeds = integer ? 5 : 20;
    for (int seed = 1; seed <= seeds; ++seed) {
      ToyCemParams p;
      p.zones = 3;
      p.weeks = 8;
      p.techs = 3;
      p.integer_builds = integer;
      p.seed = static_cast<std::uint64_t>(seed);
      ModelPlan plan = toy_cem_plan(p);
      OptiGraph g = build_local(plan);
      StandardFormProblem flat = flatten(g);
      std::size_t integers = 0;
      for (const auto& [v, b] : flat.bounds) integers += b.is_integer() ? 1 : 0;
      const std::string run = std::string(integer ? "integer" : "continuous") + " seed " + std::to_string(seed);
      equivalence.require(integers <= 12, run + ": too many integers");
      SolverConfig scfg;
      scfg.mip_gap = 1e-9;
      SolveResult mono = solve_mip(flat, scfg);
      equivalence.require(mono.optimal(), run + ": monolithic not optimal");
      if (!mono.optimal()) continue;
      oracle::RecourseOracle recourse(plan);
      BendersConfig cfg;
      cfg.rel_gap = kGap;
      Solved r = solve_local(plan, g, cfg, {}, recourse, checks, "cem " + run, mono.objective,
                             100 + static_cast<std::uint64_t>(seed));
      const double d = rel_diff(r.state.objective(), mono.objective);
      equivalence.require(d <= kAgreement, run + ": objective " + fmt(r.state.objective()) + " vs " + fmt(mono.objective));
      equivalence.require(r.seconds < 60.0, run + ": took " + fmt(r.seconds) + " s");
      slowest = std::max(slowest, r.seconds);
      worst = std::max(worst, d);
      ++runs;
    }
  }
  equivalence.note(std::to_string(runs) + " runs, largest difference " + fmt(worst) + ", slowest Benders run " +
                   fmt(slowest) + " s");
}

void solver_suite(Verdict& v) {
  std::mt19937 rng(20260101);
  int optimal = 0, infeasible = 0;
  double worst_obj = 0.0, worst_duality = 0.0;
  for (int k = 0; k < 500; ++k) {
    StandardFormProblem p = oracle::random_lp(rng);
    auto expect = oracle::vertex_enumeration(p);
    SolveResult r = solve_lp(p);
    if (!expect) {
      v.require(r.status == SolveStatus::kInfeasible, "LP " + std::to_string(k) + " should be infeasible");
      ++infeasible;
      continue;
    }
    v.require(r.optimal(), "LP " + std::to_string(k) + " not optimal");
    if (!r.optimal()) continue;
    ++optimal;
    const double d = std::abs(r.objective - *expect) / std::max(1.0, std::abs(*expect));
    v.require(d <= 1e-7, "LP " + std::to_string(k) + " objective off by " + fmt(d));
    LpCertificate cert = certify(p, r);
    v.require(cert.duality_gap <= 1e-6, "LP " + std::to_string(k) + " duality residual " + fmt(cert.duality_gap));
    worst_obj = std::max(worst_obj, d);
    worst_duality = std::max(worst_duality, cert.duality_gap);
  }
  int mip_feasible = 0;
  for (int k = 0; k < 100; ++k) {
    StandardFormProblem p = oracle::random_binary_ip(rng, 12);
    auto expect = oracle::binary_enumeration(p);
    SolveResult r = solve_mip(p);
    if (!expect) {
      v.require(r.status == SolveStatus::kInfeasible, "MIP " + std::to_string(k) + " should be infeasible");
      continue;
    }
    ++mip_feasible;
    v.require(r.optimal() && r.objective == *expect, "MIP " + std::to_string(k) + " objective " +
                                                         fmt(r.objective) + " vs " + fmt(*expect));
  }
  v.note(std::to_string(optimal) + " optimal and " + std::to_string(infeasible) + " infeasible LPs, max objective error " +
         fmt(worst_obj) + ", max duality residual " + fmt(worst_duality) + ", " + std::to_string(mip_feasible) +
         " feasible MIPs");
}

std::string worker_dump(const RemoteOptiGraph& g) {
  return g.cluster().call(g.worker(), "dump_graph", g.handle(), Json::object()).at("dump").get<std::string>();
}

BuildProgram wide_program(int n) {
  BuildProgram p;
  p.add_node("wide");
  NamedExpr sum;
  for (int i = 1; i <= n; ++i) sum.add(p.add_variable("wide", "x", {0.0, 1.0 * i}, {i}));
  p.add_constraint("wide", {sum, Sense::kLessEqual, 50.0});
  p.set_objective("wide", sum);
  p.fetch("wide[:x][1]");
  return p;
}

void distributed_layer(Verdict& v) {
  // Proxy identity.
  OptiGraph g("proxies");
  std::mt19937 rng(3);
  std::vector<NodeId> nodes;
  for (int i = 0; i < 40; ++i) nodes.push_back(g.add_node("n" + std::to_string(i)));
  std::size_t round_trips = 0;
  for (int i = 0; i < 1200; ++i) {
    NodeId n = nodes[std::uniform_int_distribution<std::size_t>(0, nodes.size() - 1)(rng)];
    std::vector<std::int64_t> sub{i};
    VariableId var = g.add_variable(n, "v", {}, sub);
    ProxyVariableRef p = to_proxy(g, var);
    ProxyVariableRef back = proxy_variable_from_json(Json::parse(to_json(p).dump()));
    v.require(back == p && resolve_proxy(g, back) == var, "proxy " + std::to_string(i) + " did not round trip");
    ++round_trips;
  }
  for (const auto& n : nodes) {
    v.require(resolve_proxy(g, proxy_node_from_json(Json::parse(to_json(to_proxy(g, n)).dump()))) == n,
              "node proxy did not round trip");
    ++round_trips;
  }

  // Transcript pairing on a full remote solve over both transports.
  std::size_t frames = 0;
  for (auto t : {Transport::kInProcess, Transport::kTcp}) {
    Transcript transcript;
    RunOptions o;
    o.mode = SolveMode::kBendersRemote;
    o.transport = t;
    o.benders.derive_theta_lower = true;
    o.transcript = &transcript;
    run_model(storage_plan(StorageParams::defaults(8)), o);
    auto lines = transcript.lines();
    std::string pairing = check_pairing(lines);
    v.require(pairing.empty(), "transcript pairing: " + pairing);
    std::size_t requests = 0;
    for (const auto& l : lines) requests += Transcript::parse_line(l).message.kind != "ok" &&
                                            Transcript::parse_line(l).message.kind != "error";
    v.require(2 * requests == lines.size(), "requests and responses are not in bijection");
    frames += lines.size();
  }

  // Span of inter-worker edges.
  {
    Cluster c;
    auto w = c.spawn_workers(2, Transport::kInProcess);
    RemoteOptiGraph top = c.remote_graph(kMainWorker, "top");
    RemoteOptiGraph a = c.remote_graph(w[0], "a"), b = c.remote_graph(w[1], "b");
    top.add_subgraph(a);
    top.add_subgraph(b);
    RemoteNodeRef n1 = a.add_node("n1"), n2 = a.add_node("n2"), m = b.add_node("m");
    RemoteVariableRef x = a.add_variable(n1, "x"), y = a.add_variable(n2, "y"), z = b.add_variable(m, "z");
    bool rejected = false;
    try {
      top.add_interworker_link(AffineExpr(x) + AffineExpr(y) <= 1.0);
    } catch (const StructureError&) {
      rejected = true;
    }
    v.require(rejected, "single-graph inter-worker link accepted");
    top.add_interworker_link(AffineExpr(x) - AffineExpr(z) <= 1.0);
    v.require(top.interworker_edges().size() == 1, "two-graph link not recorded");
  }

  // Batched against per-call construction.
  Cluster c;
  auto w = c.spawn_workers(1, Transport::kInProcess);
  BuildProgram wide = wide_program(100);
  RemoteOptiGraph batched = c.remote_graph(w[0], "wide_graph"), per_call = c.remote_graph(w[0], "wide_graph");
  Transcript tb, tp;
  c.set_transcript(&tb);
  batched.execute_build_program(wide, BuildMode::kBatched);
  c.set_transcript(&tp);
  per_call.execute_build_program(wide, BuildMode::kPerCall);
  c.set_transcript(nullptr);
  const std::size_t batched_frames = tb.lines().size() / 2, per_call_frames = tp.lines().size() / 2;
  v.require(worker_dump(batched) == worker_dump(per_call), "batched and per-call dumps differ");
  v.require(batched_frames == 1, "batched build used " + std::to_string(batched_frames) + " requests");
  v.require(per_call_frames >= 100, "per-call build used " + std::to_string(per_call_frames) + " requests");

  ModelPlan storage = storage_plan(StorageParams::defaults());
  std::string dumps[2];
  for (int mode = 0; mode < 2; ++mode) {
    Cluster cc;
    auto ww = cc.spawn_workers(2, Transport::kInProcess);
    std::vector<WorkerId> all{kMainWorker, ww[0], ww[1]};
    RemoteOptiGraph rg = build_remote(cc, storage, default_assignment(storage, all),
                                      mode ? BuildMode::kPerCall : BuildMode::kBatched);
    dumps[mode] = dump_graph(collect_remote_graph(rg));
  }
  v.require(dumps[0] == dumps[1], "storage batched and per-call collected dumps differ");
  v.note(std::to_string(round_trips) + " proxy round trips, " + std::to_string(frames) + " transcript frames, " +
         "100-variable build: " + std::to_string(batched_frames) + " batched vs " + std::to_string(per_call_frames) +
         " per-call requests");
}

ModelPlan cem_plan(int seed) {
  ToyCemParams p;
  p.zones = 3;
  p.weeks = 8;
  p.techs = 3;
  p.seed = static_cast<std::uint64_t>(seed);
  return toy_cem_plan(p);
}

void collected_graphs(Verdict& v) {
  std::vector<std::pair<std::string, ModelPlan>> plans{{"storage", storage_plan(StorageParams::defaults())},
                                                      {"cem", cem_plan(1)}};
  ToyCemParams integer;
  integer.zones = 3;
  integer.weeks = 8;
  integer.techs = 3;
  integer.integer_builds = true;
  plans.emplace_back("cem integer", toy_cem_plan(integer));
  for (const auto& [name, plan] : plans) {
    const std::string local = canonical_dump(flatten(build_local(plan)));
    Cluster c;
    auto w = c.spawn_workers(3, Transport::kInProcess);
    std::vector<WorkerId> all{kMainWorker};
    all.insert(all.end(), w.begin(), w.end());
    RemoteOptiGraph rg = build_remote(c, plan, default_assignment(plan, all));
    v.require(canonical_dump(flatten(collect_remote_graph(rg))) == local, name + ": collected dump differs");
  }
  v.note(std::to_string(plans.size()) + " models");
}

struct TransportRun {
  std::vector<std::string> worker_dumps;
  std::string collected;
  double objective = 0.0;
};

TransportRun transport_script(const ModelPlan& plan, Transport t, bool derive) {
  Cluster c;
  auto w = c.spawn_workers(3, t);
  std::vector<WorkerId> all{kMainWorker};
  all.insert(all.end(), w.begin(), w.end());
  RemoteOptiGraph rg = build_remote(c, plan, default_assignment(plan, all));
  TransportRun out;
  for (const auto& sg : rg.subgraphs()) out.worker_dumps.push_back(worker_dump(sg));
  out.collected = canonical_dump(flatten(collect_remote_graph(rg)));
  BendersConfig cfg;
  cfg.rel_gap = kGap;
  cfg.derive_theta_lower = derive;
  out.objective = run_benders(rg, rg.subgraphs()[plan.root], cfg).objective();
  return out;
}

void transports(Verdict& v) {
  std::vector<std::tuple<std::string, ModelPlan, bool>> plans{
      {"storage", storage_plan(StorageParams::defaults()), true}, {"cem", cem_plan(2), false}};
  for (const auto& [name, plan, derive] : plans) {
    TransportRun a = transport_script(plan, Transport::kInProcess, derive);
    TransportRun b = transport_script(plan, Transport::kTcp, derive);
    v.require(a.worker_dumps == b.worker_dumps, name + ": worker dumps differ");
    v.require(a.collected == b.collected, name + ": collected dumps differ");
    v.require(rel_diff(b.objective, a.objective) <= kAgreement,
              name + ": objectives " + fmt(a.objective) + " vs " + fmt(b.objective));
    v.note(name + " objective " + fmt(a.objective));
  }
}

template <typename F>
void guarded(Verdict& v, F&& body) {
  try {
    body();
  } catch (const std::exception& e) {
    v.require(false, std::string("exception: ") + e.what());
  }
}

}  // namespace

int main() {
  auto t0 = Clock::now();
  Verdict storage_eq, cem_eq, bounds, cuts, solver, distributed, collected, transport;
  RunChecks checks{&bounds, &cuts};
  guarded(storage_eq, [&] { storage_runs(storage_eq, checks); });
  guarded(cem_eq, [&] { cem_runs(cem_eq, checks); });
  guarded(solver, [&] { solver_suite(solver); });
  guarded(distributed, [&] { distributed_layer(distributed); });
  guarded(collected, [&] { collected_graphs(collected); });
  guarded(transport, [&] { transports(transport); });

  bool all = true;
  report(1, "storage: monolithic, local and remote Benders agree", storage_eq, all);
  report(2, "toy CEM: Benders matches the monolithic solve", cem_eq, all);
  report(3, "Benders bound history", bounds, all);
  report(4, "cut validity and negative control", cuts, all);
  report(5, "LP and MIP solver against enumeration", solver, all);
  report(6, "distributed layer", distributed, all);
  report(7, "collected remote graphs equal local builds", collected, all);
  report(8, "in-process and TCP transports agree", transport, all);
  std::cout << "total " << fmt(seconds_since(t0)) << " s" << std::endl;
  return all ? 0 : 1;
}
