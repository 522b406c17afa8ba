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

#include "optigraph/models.hpp"

#include <cmath>
#include <future>
#include <map>
#include <random>
#include <set>

namespace optigraph {

StorageParams StorageParams::defaults(int T) {
  StorageParams p;
  p.T = T;
  p.beta.assign(static_cast<std::size_t>(std::max(T, 0)), 20.0);
  p.gamma.assign(static_cast<std::size_t>(std::max(T, 0)), 5.0);
  for (int t = 8; t <= std::min(10, T); ++t) p.gamma[t - 1] = 20.0;
  for (int t = 16; t <= std::min(20, T); ++t) p.gamma[t - 1] = 50.0;
  return p;
}

void StorageParams::validate() const {
  if (T < 1) throw ModelError("storage model needs T >= 1");
  if (beta.size() != static_cast<std::size_t>(T) || gamma.size() != static_cast<std::size_t>(T))
    throw ModelError("beta and gamma need one entry per period");
  if (d_sell < 0 || d_save < 0 || d_buy < 0 || y_bar < 0) throw ModelError("storage bounds must be nonnegative");
}

ModelPlan storage_plan(const StorageParams& p) {
  p.validate();
  ModelPlan plan;
  ModelPart planning{"planning_graph", {}};
  planning.program.add_node("planning_node");
  std::string size = planning.program.add_variable("planning_node", "storage_size", {0.0, kInf});
  planning.program.set_objective("planning_node", NamedExpr{}.add(size, p.alpha));

  ModelPart ops{"operation_graph", {}};
  BuildProgram& b = ops.program;
  std::vector<std::string> stored, save;
  for (int t = 1; t <= p.T; ++t) {
    std::string n = "operation_nodes_" + std::to_string(t);
    b.add_node(n);
    stored.push_back(b.add_variable(n, "y_stored", {0.0, kInf}));
    std::string sell = b.add_variable(n, "y_sell", {0.0, p.d_sell});
    save.push_back(b.add_variable(n, "y_save", {-p.d_save, p.d_save}));
    std::string buy = b.add_variable(n, "x_buy", {0.0, p.d_buy});
    b.add_constraint(n, {NamedExpr{}.add(save.back()).add(sell).add(buy, -p.zeta), Sense::kEqual, 0.0});
    b.set_objective(n, NamedExpr{}.add(buy, p.beta[t - 1]).add(sell, -p.gamma[t - 1]));
  }
  b.add_constraint("operation_nodes_1", {NamedExpr{}.add(stored[0]), Sense::kEqual, p.y_bar});
  for (int i = 0; i + 1 < p.T; ++i)
    b.add_link({NamedExpr{}.add(stored[i + 1]).add(stored[i], -1.0).add(save[i + 1], -1.0), Sense::kEqual, 0.0});

  for (const auto& s : stored) plan.links.push_back({NamedExpr{}.add(s).add(size, -1.0), Sense::kLessEqual, 0.0});
  plan.parts.push_back(std::move(planning));
  plan.parts.push_back(std::move(ops));
  plan.root = 0;
  return plan;
}

void ToyCemParams::validate() const {
  if (zones < 1 || weeks < 1 || techs < 1 || hours < 1)
    throw ModelError("toy CEM needs zones, weeks, techs and hours >= 1");
}

namespace {

struct TechType {
  double invest_lo, invest_hi;
  double var_lo, var_hi;
  double emission;
  bool variable_availability;
};

// baseload, peaker, renewable
const TechType kTechTypes[] = {
    {55.0, 70.0, 20.0, 30.0, 1.0, false},
    {15.0, 25.0, 60.0, 80.0, 0.5, false},
    {35.0, 50.0, 0.0, 0.0, 0.0, true},
};

std::vector<std::int64_t> subs(std::initializer_list<int> v) { return {v.begin(), v.end()}; }

}  // namespace

ModelPlan toy_cem_plan(const ToyCemParams& p) {
  p.validate();
  std::mt19937_64 rng(p.seed);
  auto uniform = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };

  const int Z = p.zones, W = p.weeks, K = p.techs, H = p.hours;
  const double unit = p.integer_builds ? 25.0 : 1.0;
  const double max_units = p.integer_builds ? 8.0 : 200.0;
  const double voll = 1000.0;
  // Investment rates are per MW and scaled to the modeled horizon.
  const double horizon = static_cast<double>(W * H);

  std::vector<std::vector<double>> invest(Z, std::vector<double>(K)), var_cost(Z, std::vector<double>(K));
  for (int z = 0; z < Z; ++z)
    for (int k = 0; k < K; ++k) {
      const TechType& tt = kTechTypes[k % 3];
      invest[z][k] = uniform(tt.invest_lo, tt.invest_hi) * horizon * 0.05 * unit;
      var_cost[z][k] = tt.var_hi > 0 ? uniform(tt.var_lo, tt.var_hi) : 0.0;
    }
  std::vector<double> line_cap(Z > 1 ? Z - 1 : 0);
  for (auto& c : line_cap) c = uniform(20.0, 60.0);
  // demand[w][z][h], availability[w][z][k][h]
  std::vector<std::vector<std::vector<double>>> demand(W, std::vector<std::vector<double>>(Z, std::vector<double>(H)));
  std::vector<std::vector<std::vector<std::vector<double>>>> avail(
      W, std::vector<std::vector<std::vector<double>>>(Z, std::vector<std::vector<double>>(K, std::vector<double>(H, 1.0))));
  double total_baseload_emission = 0.0;
  for (int w = 0; w < W; ++w) {
    double season = uniform(0.8, 1.2);
    for (int z = 0; z < Z; ++z)
      for (int h = 0; h < H; ++h) {
        demand[w][z][h] = season * uniform(50.0, 150.0);
        total_baseload_emission += demand[w][z][h];
        for (int k = 0; k < K; ++k)
          if (kTechTypes[k % 3].variable_availability) avail[w][z][k][h] = uniform(0.1, 1.0);
      }
  }
  const double policy_cap = 0.5 * total_baseload_emission;

  ModelPlan plan;
  ModelPart planning{"planning_graph", {}};
  BuildProgram& pb = planning.program;
  const std::string pn = "planning_node";
  pb.add_node(pn);
  VariableBounds build{0.0, max_units, p.integer_builds ? Integrality::kInteger : Integrality::kContinuous};
  std::map<std::pair<int, int>, std::string> cap;
  NamedExpr invest_obj;
  for (int z = 1; z <= Z; ++z)
    for (int k = 1; k <= K; ++k) {
      cap[{z, k}] = pb.add_variable(pn, "vCAP", build, subs({z, k}));
      invest_obj.add(cap[{z, k}], invest[z - 1][k - 1]);
    }
  std::vector<std::string> q;
  NamedExpr allocation;
  for (int w = 1; w <= W; ++w) {
    q.push_back(pb.add_variable(pn, "vQ", {0.0, policy_cap}, subs({w})));
    allocation.add(q.back());
  }
  pb.add_constraint(pn, {allocation, Sense::kLessEqual, policy_cap});
  pb.set_objective(pn, invest_obj);
  plan.parts.push_back(std::move(planning));

  for (int w = 1; w <= W; ++w) {
    ModelPart week{"operation_graph_w" + std::to_string(w), {}};
    BuildProgram& b = week.program;
    const std::string n = "operation_node_w" + std::to_string(w);
    b.add_node(n);
    std::map<std::pair<int, int>, std::string> cap_copy;
    for (int z = 1; z <= Z; ++z)
      for (int k = 1; k <= K; ++k) {
        cap_copy[{z, k}] = b.add_variable(n, "vCAP", {0.0, max_units}, subs({z, k}));
        plan.links.push_back({NamedExpr{}.add(cap_copy[{z, k}]).add(cap[{z, k}], -1.0), Sense::kEqual, 0.0});
      }
    std::string q_copy = b.add_variable(n, "vQ", {0.0, policy_cap}, subs({w}));
    plan.links.push_back({NamedExpr{}.add(q_copy).add(q[w - 1], -1.0), Sense::kEqual, 0.0});

    NamedExpr cost, emissions;
    std::map<std::tuple<int, int, int>, std::string> gen;
    for (int z = 1; z <= Z; ++z)
      for (int k = 1; k <= K; ++k)
        for (int h = 1; h <= H; ++h) {
          std::string g = b.add_variable(n, "gen", {0.0, kInf}, subs({z, k, h}));
          gen[{z, k, h}] = g;
          double a = avail[w - 1][z - 1][k - 1][h - 1] * unit;
          b.add_constraint(n, {NamedExpr{}.add(g).add(cap_copy[{z, k}], -a), Sense::kLessEqual, 0.0});
          if (var_cost[z - 1][k - 1] != 0.0) cost.add(g, var_cost[z - 1][k - 1]);
          if (kTechTypes[(k - 1) % 3].emission != 0.0) emissions.add(g, kTechTypes[(k - 1) % 3].emission);
        }
    std::map<std::pair<int, int>, std::string> flow;
    for (int l = 1; l < Z; ++l)
      for (int h = 1; h <= H; ++h)
        flow[{l, h}] = b.add_variable(n, "flow", {-line_cap[l - 1], line_cap[l - 1]}, subs({l, h}));
    for (int z = 1; z <= Z; ++z)
      for (int h = 1; h <= H; ++h) {
        double d = demand[w - 1][z - 1][h - 1];
        std::string u = b.add_variable(n, "unmet", {0.0, d}, subs({z, h}));
        cost.add(u, voll);
        NamedExpr balance;
        for (int k = 1; k <= K; ++k) balance.add(gen[{z, k, h}]);
        if (z > 1) balance.add(flow[{z - 1, h}], 1.0);  // line z-1 flows from z-1 into z
        if (z < Z) balance.add(flow[{z, h}], -1.0);
        balance.add(u);
        b.add_constraint(n, {balance, Sense::kEqual, d});
      }
    if (!emissions.terms.empty())
      b.add_constraint(n, {emissions.add(q_copy, -1.0), Sense::kLessEqual, 0.0});
    b.set_objective(n, cost);
    plan.parts.push_back(std::move(week));
  }
  plan.root = 0;
  return plan;
}

double max_row_ratio(const StandardFormProblem& p) {
  double worst = 1.0;
  for (const auto& r : p.rows) {
    double lo = kInf, hi = 0.0;
    for (const auto& [v, c] : r.body.terms()) {
      lo = std::min(lo, std::abs(c));
      hi = std::max(hi, std::abs(c));
    }
    if (hi > 0) worst = std::max(worst, hi / lo);
  }
  return worst;
}

OptiGraph build_local(const ModelPlan& plan) {
  OptiGraph top(plan.label);
  for (const auto& part : plan.parts) {
    OptiGraph sub(part.label);
    execute(sub, part.program);
    top.add_subgraph(std::move(sub));
  }
  for (const auto& link : plan.links) top.add_link_constraint(resolve(top, link));
  return top;
}

std::vector<WorkerId> default_assignment(const ModelPlan& plan, const std::vector<WorkerId>& workers) {
  if (workers.empty()) throw ModelError("no workers to place the model on");
  std::vector<WorkerId> out(plan.parts.size());
  std::size_t next = workers.size() > 1 ? 1 : 0;
  for (std::size_t i = 0; i < plan.parts.size(); ++i) {
    if (i == plan.root) {
      out[i] = workers.front();
      continue;
    }
    out[i] = workers[next];
    next = next + 1 < workers.size() ? next + 1 : (workers.size() > 1 ? 1 : 0);
  }
  return out;
}

RemoteOptiGraph build_remote(Cluster& cluster, const ModelPlan& plan, const std::vector<WorkerId>& workers,
                             BuildMode mode) {
  if (workers.size() != plan.parts.size())
    throw ModelError("need one worker per model part (" + std::to_string(plan.parts.size()) + "), got " +
                     std::to_string(workers.size()));
  RemoteOptiGraph top = cluster.remote_graph(kMainWorker, plan.label);

  std::set<std::string> linked;
  for (const auto& l : plan.links)
    for (const auto& [name, c] : l.body.terms) linked.insert(name);

  std::vector<RemoteOptiGraph> parts;
  std::vector<BuildProgram> programs;
  for (std::size_t i = 0; i < plan.parts.size(); ++i) {
    parts.push_back(cluster.remote_graph(workers[i], plan.parts[i].label));
    top.add_subgraph(parts.back());
    BuildProgram prog = plan.parts[i].program;
    for (const auto& ins : prog.instructions())
      if (const auto* v = std::get_if<program::AddVariable>(&ins)) {
        std::string name = canonical_name(v->node, v->name, v->subscripts);
        if (linked.contains(name)) prog.fetch(name);
      }
    programs.push_back(std::move(prog));
  }

  std::vector<std::future<std::vector<ProxyVariableRef>>> running;
  for (std::size_t i = 0; i < parts.size(); ++i)
    running.push_back(std::async(std::launch::async, [&, i] { return parts[i].execute_build_program(programs[i], mode); }));
  std::map<std::string, RemoteVariableRef> refs;
  std::exception_ptr failure;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    try {
      for (const auto& p : running[i].get()) refs.emplace(p.name, parts[i].proxy_to_remote(p));
    } catch (...) {
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);

  for (const auto& l : plan.links) {
    AffineExpr body(l.body.constant);
    for (const auto& [name, c] : l.body.terms) {
      auto it = refs.find(name);
      if (it == refs.end()) throw ModelError("link references unknown variable '" + name + "'");
      body.add_term(it->second.id(), c);
    }
    top.add_interworker_link(Constraint{std::move(body), l.sense, l.rhs});
  }
  return top;
}

}  // namespace optigraph
