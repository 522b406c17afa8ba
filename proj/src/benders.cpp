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

#include "optigraph/benders.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <future>
#include <optional>
#include <random>
#include <set>
#include <sstream>

#include "optigraph/remote.hpp"

namespace optigraph {

void BendersConfig::validate() const {
  if (!(rel_gap > 0)) throw ModelError("rel_gap must be positive");
  if (!(slack_penalty > 0)) throw ModelError("slack_penalty must be positive");
  if (!(cut_tol >= 0)) throw ModelError("cut_tol must be nonnegative");
  if (max_iterations == 0) throw ModelError("max_iterations must be positive");
}

double relative_gap(double lower, double upper) {
  if (!std::isfinite(lower) || !std::isfinite(upper)) return kInf;
  return (upper - lower) / std::max(std::abs(upper), 1.0);
}

double BendersState::gap() const {
  if (lower_bound.empty()) return kInf;
  return relative_gap(lower(), objective());
}

std::string BendersState::trace_csv(bool with_timing) const {
  std::ostringstream out;
  out << "iteration,wall_seconds,lower_bound,upper_bound,rel_gap\n";
  for (std::size_t i = 0; i < lower_bound.size(); ++i) {
    out << (i + 1) << ',' << (with_timing ? format_double(seconds[i]) : std::string("0")) << ','
        << format_double(lower_bound[i]) << ',' << format_double(upper_bound[i]) << ','
        << format_double(relative_gap(lower_bound[i], upper_bound[i])) << '\n';
  }
  return out.str();
}

double BendersCut::evaluate(const std::map<VariableId, double>& x) const {
  double v = intercept;
  for (const auto& [var, c] : coefficients) {
    auto it = x.find(var);
    if (it == x.end()) throw ModelError("cut evaluation point lacks a master variable");
    v += c * it->second;
  }
  return v;
}

// ---- serialization -------------------------------------------------------

namespace {

SolveStatus parse_status(const std::string& s) {
  for (auto st : {SolveStatus::kOptimal, SolveStatus::kInfeasible, SolveStatus::kUnbounded,
                  SolveStatus::kIterationLimit})
    if (status_name(st) == s) return st;
  throw ModelError("unknown solve status '" + s + "'");
}

const NodeId kCopyNode{Uuid::parse("00000000-0000-4000-8000-00000000c091")};
const NodeId kSlackNode{Uuid::parse("00000000-0000-4000-8000-00000000c092")};
const NodeId kThetaNode{Uuid::parse("00000000-0000-4000-8000-00000000c093")};

}  // namespace

Json to_json(const SubproblemSpec& s) {
  Json comp = Json::array();
  for (const auto& c : s.complicating) comp.push_back(Json::array({c.id.node.str(), c.id.index, c.name}));
  Json links = Json::array();
  for (const auto& c : s.links) links.push_back(to_json(c));
  Json j;
  j["complicating"] = std::move(comp);
  j["links"] = std::move(links);
  j["add_slacks"] = s.add_slacks;
  j["slack_penalty"] = s.slack_penalty;
  return j;
}

SubproblemSpec subproblem_spec_from_json(const Json& j) {
  SubproblemSpec s;
  for (const auto& c : j.at("complicating"))
    s.complicating.push_back({{NodeId::parse(c.at(0).get<std::string>()), c.at(1).get<std::uint32_t>()},
                              c.at(2).get<std::string>()});
  for (const auto& c : j.at("links")) s.links.push_back(constraint_from_json(c));
  s.add_slacks = j.at("add_slacks").get<bool>();
  s.slack_penalty = j.at("slack_penalty").get<double>();
  return s;
}

Json to_json(const SubproblemSolution& s) {
  Json j;
  j["status"] = std::string(status_name(s.status));
  j["value"] = s.value;
  j["duals"] = s.duals;
  j["slack"] = s.slack;
  return j;
}

SubproblemSolution subproblem_solution_from_json(const Json& j) {
  SubproblemSolution s;
  s.status = parse_status(j.at("status").get<std::string>());
  s.value = j.at("value").get<double>();
  s.duals = j.at("duals").get<std::vector<double>>();
  s.slack = j.at("slack").get<double>();
  return s;
}

// ---- subproblem ----------------------------------------------------------

BendersSubproblem::BendersSubproblem(const OptiGraph& sub, SubproblemSpec spec, SolverConfig cfg)
    : spec_(std::move(spec)), cfg_(cfg), problem_(flatten(sub)) {
  if (problem_.has_integers())
    throw StructureError("subproblem graph '" + sub.label() +
                         "' has integer variables; subproblems must be LPs");
  std::map<VariableId, VariableId> copy_of;
  for (std::size_t k = 0; k < spec_.complicating.size(); ++k) {
    VariableId copy{kCopyNode, static_cast<std::uint32_t>(k)};
    copy_of.emplace(spec_.complicating[k].id, copy);
    problem_.add_variable(copy, spec_.complicating[k].name + "@copy", {-kInf, kInf});
  }
  for (const auto& link : spec_.links) {
    AffineExpr body(link.body.constant());
    for (const auto& [v, c] : link.body.terms()) {
      if (auto it = copy_of.find(v); it != copy_of.end())
        body.add_term(it->second, c);
      else if (problem_.bounds.contains(v))
        body.add_term(v, c);
      else
        throw StructureError("link constraint of subproblem '" + sub.label() +
                             "' references a variable outside the root and the subproblem");
    }
    problem_.add_row(Constraint{std::move(body), link.sense, link.rhs}, {RowOrigin::kInterWorker, ""});
  }
  for (std::size_t k = 0; k < spec_.complicating.size(); ++k) {
    AffineExpr body(VariableId{kCopyNode, static_cast<std::uint32_t>(k)});
    if (spec_.add_slacks) {
      VariableId up{kSlackNode, static_cast<std::uint32_t>(2 * k)};
      VariableId down{kSlackNode, static_cast<std::uint32_t>(2 * k + 1)};
      const std::string& n = spec_.complicating[k].name;
      problem_.add_variable(up, n + "@slack+", {0.0, kInf});
      problem_.add_variable(down, n + "@slack-", {0.0, kInf});
      body.add_term(up, 1.0);
      body.add_term(down, -1.0);
      problem_.objective.add_term(up, spec_.slack_penalty);
      problem_.objective.add_term(down, spec_.slack_penalty);
      slacks_.push_back(up);
      slacks_.push_back(down);
    }
    fixing_rows_.push_back(problem_.add_row(Constraint{std::move(body), Sense::kEqual, 0.0},
                                            {RowOrigin::kAuxiliary, "fixing"}));
  }
}

SubproblemSolution BendersSubproblem::solve(const std::vector<double>& xhat) const {
  if (xhat.size() != fixing_rows_.size())
    throw ModelError("expected " + std::to_string(fixing_rows_.size()) + " fixed values, got " +
                     std::to_string(xhat.size()));
  StandardFormProblem p = problem_;
  for (std::size_t k = 0; k < xhat.size(); ++k) p.rows[fixing_rows_[k]].rhs = xhat[k];
  SolveResult r = solve_lp(p, cfg_);
  SubproblemSolution out;
  out.status = r.status;
  if (!r.optimal()) return out;
  out.value = r.objective;
  for (auto row : fixing_rows_) out.duals.push_back(r.duals[row]);
  for (const auto& s : slacks_) out.slack += r.value(s);
  return out;
}

double BendersSubproblem::relaxation_bound() const {
  StandardFormProblem p = problem_;
  std::set<std::size_t> drop(fixing_rows_.begin(), fixing_rows_.end());
  StandardFormProblem q;
  q.objective = p.objective;
  q.variable_order = p.variable_order;
  q.bounds = p.bounds;
  q.names = p.names;
  for (std::size_t i = 0; i < p.rows.size(); ++i)
    if (!drop.contains(i)) q.add_row(p.rows[i], p.provenance[i]);
  SolveResult r = solve_lp(q, cfg_);
  if (r.status == SolveStatus::kUnbounded)
    throw StructureError("subproblem value is unbounded below once its fixing rows are removed; "
                         "set theta_lower explicitly");
  if (!r.optimal())
    throw StructureError("cannot bound subproblem: relaxation is " + std::string(status_name(r.status)));
  return r.objective;
}

// ---- linking map and structure -------------------------------------------

LinkingVariableMap map_linking_variables(const OptiGraph& root, const OptiGraph& sub,
                                         const std::vector<Constraint>& links) {
  std::map<std::string, std::vector<VariableId>> by_suffix;
  for (const auto* n : root.all_nodes())
    for (std::uint32_t i = 0; i < n->num_variables(); ++i)
      by_suffix[std::string(name_suffix(n->variables()[i].name))].push_back(n->variable(i));
  LinkingVariableMap map;
  for (const auto* n : sub.all_nodes())
    for (std::uint32_t i = 0; i < n->num_variables(); ++i) {
      const std::string& name = n->variables()[i].name;
      auto it = by_suffix.find(std::string(name_suffix(name)));
      if (it == by_suffix.end()) continue;
      if (it->second.size() > 1)
        throw ModelError("variable '" + name + "' matches " + std::to_string(it->second.size()) +
                         " root variables with the same suffix");
      map.sub_to_master.emplace(n->variable(i), it->second.front());
    }
  // Copy-form links (x_sub - x_root == 0) must agree with the name pairing.
  for (const auto& c : links) {
    if (c.sense != Sense::kEqual || c.rhs != 0.0 || c.body.size() != 2) continue;
    auto a = c.body.terms().begin();
    auto b = std::next(a);
    if (a->second != -b->second || std::abs(a->second) != 1.0) continue;
    VariableId sv = a->first, mv = b->first;
    if (!sub.contains_variable(sv)) std::swap(sv, mv);
    if (!sub.contains_variable(sv) || !root.contains_variable(mv)) continue;
    auto m = map.sub_to_master.find(sv);
    if (m == map.sub_to_master.end() || m->second != mv)
      throw ModelError("link-constraint variable '" + sub.variable_name(sv) +
                       "' has no master counterpart named '" + root.variable_name(mv) + "'");
  }
  return map;
}

namespace {

std::size_t owning_part(const OptiGraph& g, const NodeId& node) {
  for (std::size_t i = 0; i < g.num_subgraphs(); ++i)
    if (g.subgraph(i).contains_node(node)) return i;
  throw StructureError("top-level edge touches node " + node.str() + " outside every subgraph");
}

std::size_t owning_part(const RemoteOptiGraph& g, const GraphId& graph) {
  const auto& subs = g.subgraphs();
  for (std::size_t i = 0; i < subs.size(); ++i)
    if (subs[i].find_graph(graph)) return i;
  throw StructureError("inter-worker edge touches graph " + graph.str() + " outside every subgraph");
}

void check_edge_parts(const std::set<std::size_t>& parts, std::size_t root, const std::string& edge) {
  if (parts.size() != 2 || !parts.contains(root))
    throw StructureError("edge " + edge + " connects " + std::to_string(parts.size()) +
                         " subgraph(s); every top-level link must join the root and one subproblem");
}

std::size_t remote_integers(const RemoteOptiGraph& g) {
  std::size_t n = g.stats().integers;
  for (const auto& sg : g.subgraphs()) n += remote_integers(sg);
  return n;
}

}  // namespace

void validate_structure(const OptiGraph& g, std::size_t root) {
  if (root >= g.num_subgraphs()) throw StructureError("root must be a direct subgraph");
  if (!g.nodes().empty())
    throw StructureError("graph '" + g.label() + "' owns nodes directly; they belong to neither master nor subproblems");
  for (const auto& e : g.edges()) {
    std::set<std::size_t> parts;
    for (const auto& n : e.nodes) parts.insert(owning_part(g, n));
    check_edge_parts(parts, root, e.id.str());
  }
  for (std::size_t i = 0; i < g.num_subgraphs(); ++i) {
    if (i == root) continue;
    for (const auto* n : g.subgraph(i).all_nodes())
      for (const auto& v : n->variables())
        if (v.bounds.is_integer())
          throw StructureError("subproblem '" + g.subgraph(i).label() + "' has integer variable '" +
                               v.name + "'; subproblems must be LPs");
  }
}

void validate_structure(const RemoteOptiGraph& g, const RemoteOptiGraph& root) {
  const auto& subs = g.subgraphs();
  auto it = std::find(subs.begin(), subs.end(), root);
  if (it == subs.end()) throw StructureError("root must be a direct subgraph");
  std::size_t r = static_cast<std::size_t>(it - subs.begin());
  if (g.stats().nodes != 0)
    throw StructureError("graph '" + g.label() + "' owns nodes directly; they belong to neither master nor subproblems");
  for (const auto& e : g.interworker_edges()) {
    std::set<std::size_t> parts;
    for (const auto& [graph, node] : e.endpoints) parts.insert(owning_part(g, graph));
    check_edge_parts(parts, r, e.id.str());
  }
  for (std::size_t i = 0; i < subs.size(); ++i)
    if (i != r && remote_integers(subs[i]) > 0)
      throw StructureError("subproblem '" + subs[i].label() + "' has integer variables; subproblems must be LPs");
}

// ---- solver --------------------------------------------------------------

namespace {

class SubHandle {
 public:
  virtual ~SubHandle() = default;
  virtual SubproblemSolution solve(const std::vector<double>& xhat) = 0;
  virtual double relaxation_bound() = 0;
};

class LocalSub : public SubHandle {
 public:
  LocalSub(const OptiGraph& g, SubproblemSpec spec, const SolverConfig& cfg) : sub_(g, std::move(spec), cfg) {}
  SubproblemSolution solve(const std::vector<double>& xhat) override { return sub_.solve(xhat); }
  double relaxation_bound() override { return sub_.relaxation_bound(); }

 private:
  BendersSubproblem sub_;
};

class RemoteSub : public SubHandle {
 public:
  RemoteSub(Cluster& c, WorkerId w, std::string handle, const SubproblemSpec& spec, const SolverConfig& cfg)
      : c_(c), w_(w), handle_(std::move(handle)), key_(Uuid::generate().str()) {
    Json solver{{"feas_tol", cfg.feas_tol}, {"pivot_tol", cfg.pivot_tol}, {"max_iterations", cfg.max_iterations}};
    c_.call(w_, "prepare_subproblem", handle_, Json{{"key", key_}, {"spec", to_json(spec)}, {"solver", solver}});
  }
  SubproblemSolution solve(const std::vector<double>& xhat) override {
    return subproblem_solution_from_json(
        c_.call(w_, "solve_subproblem", handle_, Json{{"key", key_}, {"values", xhat}}));
  }
  double relaxation_bound() override {
    return c_.call(w_, "bound_subproblem", handle_, Json{{"key", key_}}).at("bound").get<double>();
  }

 private:
  Cluster& c_;
  WorkerId w_;
  std::string handle_;
  std::string key_;
};

/// Root variables appearing in the links, in master column order.
std::vector<ComplicatingVariable> complicating_of(const StandardFormProblem& master,
                                                  const std::vector<Constraint>& links) {
  std::set<VariableId> used;
  for (const auto& c : links)
    for (const auto& [v, coef] : c.body.terms())
      if (master.bounds.contains(v)) used.insert(v);
  std::vector<ComplicatingVariable> out;
  for (const auto& v : master.variable_order)
    if (used.contains(v)) out.push_back({v, master.name_of(v)});
  return out;
}

}  // namespace

struct BendersSolver::Impl {
  BendersConfig cfg;
  SolverConfig scfg;
  StandardFormProblem master;
  AffineExpr root_objective;
  std::size_t root_rows = 0;
  std::optional<std::size_t> base_rows;  // master rows before any cut
  std::vector<VariableId> root_columns;
  std::vector<VariableId> theta;
  struct Sub {
    std::string name;
    std::vector<ComplicatingVariable> complicating;
    std::unique_ptr<SubHandle> handle;
  };
  std::vector<Sub> subs;

  void init_master(StandardFormProblem root) {
    cfg.validate();
    scfg.validate();
    master = std::move(root);
    root_objective = master.objective;
    root_rows = master.num_rows();
    root_columns = master.variable_order;
  }

  void add_thetas() {
    std::vector<double> lower(subs.size(), cfg.theta_lower);
    if (cfg.derive_theta_lower) {
      std::vector<std::future<double>> f;
      for (auto& s : subs) f.push_back(std::async(std::launch::async, [&s] { return s.handle->relaxation_bound(); }));
      for (std::size_t w = 0; w < subs.size(); ++w) lower[w] = f[w].get();
    }
    for (std::size_t w = 0; w < subs.size(); ++w) {
      VariableId t{kThetaNode, static_cast<std::uint32_t>(w)};
      std::vector<std::int64_t> sub{static_cast<std::int64_t>(w + 1)};
      master.add_variable(t, canonical_name("benders", "theta", sub), {lower[w], kInf});
      master.objective.add_term(t, 1.0);
      theta.push_back(t);
    }
  }

  std::vector<double> fixed_values(std::size_t w, const std::map<VariableId, double>& x) const {
    std::vector<double> out;
    for (const auto& c : subs[w].complicating) {
      auto it = x.find(c.id);
      if (it == x.end()) throw ModelError("master point lacks '" + c.name + "'");
      out.push_back(it->second);
    }
    return out;
  }

  BendersState run() {
    if (!base_rows) base_rows = master.rows.size();
    master.rows.resize(*base_rows);
    master.provenance.resize(*base_rows);
    BendersState st;
    for (const auto& s : subs) st.subproblems.push_back(s.name);
    const auto t0 = std::chrono::steady_clock::now();
    double lb = -kInf, ub = kInf;
    // Integer masters start on their relaxation; those cuts stay valid.
    bool relaxed = cfg.relax_first && master.has_integers();
    double relaxed_ub = kInf;
    // Previous integer master point, lifted onto the new cuts.
    std::optional<std::map<VariableId, double>> start;
    for (std::size_t it = 1; it <= cfg.max_iterations; ++it) {
      st.iteration = it;
      SolveResult mr = relaxed ? solve_lp(master, scfg) : solve(master, scfg, start ? &*start : nullptr);
      if (mr.status == SolveStatus::kInfeasible) throw StructureError("master problem is infeasible");
      if (mr.status == SolveStatus::kUnbounded)
        throw StructureError("master problem is unbounded; give theta a lower bound (theta_lower or derive_theta_lower)");
      if (!mr.optimal()) throw StructureError("master solve stopped: " + std::string(status_name(mr.status)));
      lb = std::max(lb, master.has_integers() ? std::min(mr.bound, mr.objective) : mr.objective);

      std::map<VariableId, double> xhat;
      for (const auto& v : root_columns) xhat[v] = mr.value(v);
      for (const auto& [v, x] : xhat)
        if (!std::isfinite(x)) throw StructureError("master solve returned a non-finite point");
      std::vector<std::future<SubproblemSolution>> pending;
      for (std::size_t w = 0; w < subs.size(); ++w) {
        auto values = fixed_values(w, xhat);
        pending.push_back(std::async(std::launch::async, [this, w, values] { return subs[w].handle->solve(values); }));
      }
      double total = root_objective.evaluate([&](const VariableId& v) { return xhat.at(v); });
      double slack = 0.0;
      const std::size_t cuts_before = st.cuts.size();
      for (std::size_t w = 0; w < subs.size(); ++w) {
        SubproblemSolution sol = pending[w].get();
        if (sol.status == SolveStatus::kInfeasible)
          throw StructureError("subproblem '" + subs[w].name + "' is infeasible at the master point; enable slacks");
        if (!(sol.status == SolveStatus::kOptimal))
          throw StructureError("subproblem '" + subs[w].name + "' returned " + std::string(status_name(sol.status)));
        BendersCut cut;
        cut.subproblem = w;
        cut.iteration = it;
        cut.value = sol.value;
        cut.intercept = sol.value;
        AffineExpr row(theta[w]);
        double largest = 1.0;
        for (double lambda : sol.duals) largest = std::max(largest, std::abs(lambda));
        for (std::size_t k = 0; k < subs[w].complicating.size(); ++k) {
          const VariableId& v = subs[w].complicating[k].id;
          double lambda = std::abs(sol.duals[k]) <= 1e-12 * largest ? 0.0 : sol.duals[k];
          cut.intercept -= lambda * xhat.at(v);
          cut.point[v] = xhat.at(v);
          if (lambda != 0.0) {
            cut.coefficients[v] += lambda;
            row.add_term(v, -lambda);
          }
        }
        total += sol.value;
        slack += sol.slack;
        // A cut the master already satisfies would only repeat an earlier row.
        if (mr.value(theta[w]) >= sol.value - cfg.cut_tol * (1.0 + std::abs(sol.value))) continue;
        master.add_row(Constraint{std::move(row), Sense::kGreaterEqual, cut.intercept},
                       {RowOrigin::kAuxiliary, "cut"});
        st.cuts.push_back(std::move(cut));
      }
      if (!relaxed && master.has_integers()) {
        start = mr.primal;
        for (std::size_t k = cuts_before; k < st.cuts.size(); ++k) {
          double& t = (*start)[theta[st.cuts[k].subproblem]];
          t = std::max(t, st.cuts[k].evaluate(xhat));
        }
      }
      if (relaxed) {
        // Fractional points give no incumbent.
        relaxed_ub = std::min(relaxed_ub, total);
        if (relative_gap(mr.objective, relaxed_ub) <= cfg.rel_gap || st.cuts.size() == cuts_before) relaxed = false;
      } else if (total < ub) {
        ub = total;
        st.incumbent = xhat;
        st.slack_activity = slack;
      }
      st.lower_bound.push_back(lb);
      st.upper_bound.push_back(ub);
      st.seconds.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
      if (relative_gap(lb, ub) <= cfg.rel_gap) {
        st.converged = true;
        break;
      }
      // No violated cut: the master cannot move, so further rounds repeat.
      if (st.cuts.size() == cuts_before && !relaxed && ub < kInf) break;
    }
    return st;
  }
};

BendersSolver::BendersSolver(const OptiGraph& g, std::size_t root, BendersConfig cfg, SolverConfig solver_cfg)
    : impl_(std::make_unique<Impl>()) {
  impl_->cfg = cfg;
  impl_->scfg = solver_cfg;
  validate_structure(g, root);
  const OptiGraph& r = g.subgraph(root);
  impl_->init_master(flatten(r));
  std::vector<std::vector<Constraint>> links(g.num_subgraphs());
  for (const auto& e : g.edges()) {
    std::size_t part = root;
    for (const auto& n : e.nodes)
      if (std::size_t p = owning_part(g, n); p != root) part = p;
    links[part].insert(links[part].end(), e.constraints.begin(), e.constraints.end());
  }
  for (std::size_t i = 0; i < g.num_subgraphs(); ++i) {
    if (i == root) continue;
    map_linking_variables(r, g.subgraph(i), links[i]);
    SubproblemSpec spec{complicating_of(impl_->master, links[i]), links[i], cfg.add_slacks, cfg.slack_penalty};
    auto comp = spec.complicating;
    impl_->subs.push_back({g.subgraph(i).label(), std::move(comp),
                           std::make_unique<LocalSub>(g.subgraph(i), std::move(spec), solver_cfg)});
  }
  impl_->add_thetas();
}

BendersSolver::BendersSolver(const RemoteOptiGraph& g, const RemoteOptiGraph& root, BendersConfig cfg,
                             SolverConfig solver_cfg)
    : impl_(std::make_unique<Impl>()) {
  impl_->cfg = cfg;
  impl_->scfg = solver_cfg;
  validate_structure(g, root);
  impl_->init_master(flatten(collect_remote_graph(root)));
  const auto& subs = g.subgraphs();
  std::size_t r = static_cast<std::size_t>(std::find(subs.begin(), subs.end(), root) - subs.begin());
  std::vector<std::vector<Constraint>> links(subs.size());
  for (const auto& e : g.interworker_edges()) {
    std::size_t part = r;
    for (const auto& [graph, node] : e.endpoints)
      if (std::size_t p = owning_part(g, graph); p != r) part = p;
    links[part].insert(links[part].end(), e.link_constraints.begin(), e.link_constraints.end());
  }
  std::vector<std::future<std::unique_ptr<SubHandle>>> prepared;
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < subs.size(); ++i) {
    if (i == r) continue;
    SubproblemSpec spec{complicating_of(impl_->master, links[i]), links[i], cfg.add_slacks, cfg.slack_penalty};
    impl_->subs.push_back({subs[i].label(), spec.complicating, nullptr});
    const RemoteOptiGraph& s = subs[i];
    prepared.push_back(std::async(std::launch::async, [s, spec, solver_cfg]() -> std::unique_ptr<SubHandle> {
      std::string handle = s.handle();
      if (!s.subgraphs().empty() || !s.interworker_edges().empty()) {
        Json body{{"graph", graph_to_json(collect_remote_graph(s))}};
        handle = s.cluster().call(s.worker(), "create_subproblem_graph", "", std::move(body)).at("handle").get<std::string>();
      }
      return std::make_unique<RemoteSub>(s.cluster(), s.worker(), handle, spec, solver_cfg);
    }));
  }
  for (std::size_t w = 0; w < prepared.size(); ++w) impl_->subs[w].handle = prepared[w].get();
  impl_->add_thetas();
}

BendersSolver::~BendersSolver() = default;

BendersState BendersSolver::run() { return impl_->run(); }
std::size_t BendersSolver::num_subproblems() const { return impl_->subs.size(); }
const StandardFormProblem& BendersSolver::master() const { return impl_->master; }
const std::vector<ComplicatingVariable>& BendersSolver::complicating(std::size_t w) const {
  return impl_->subs.at(w).complicating;
}

SubproblemSolution BendersSolver::evaluate(std::size_t w, const std::map<VariableId, double>& x) const {
  return impl_->subs.at(w).handle->solve(impl_->fixed_values(w, x));
}

std::vector<std::map<VariableId, double>> BendersSolver::sample_master_points(std::size_t n, std::uint64_t seed,
                                                                             const BendersState& state) const {
  const Impl& m = *impl_;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::map<VariableId, double> base;
  for (const auto& v : m.root_columns) {
    auto it = state.incumbent.find(v);
    const auto& b = m.master.bounds.at(v);
    double x = it != state.incumbent.end() ? it->second : std::clamp(0.0, b.lower, b.upper);
    base[v] = x;
  }
  auto feasible = [&](const std::map<VariableId, double>& x) {
    auto at = [&](const VariableId& v) { return x.at(v); };
    for (std::size_t i = 0; i < m.root_rows; ++i) {
      const auto& r = m.master.rows[i];
      double lhs = r.body.evaluate(at), tol = 1e-9 * (1 + std::abs(r.rhs));
      if ((r.sense != Sense::kGreaterEqual && lhs > r.rhs + tol) ||
          (r.sense != Sense::kLessEqual && lhs < r.rhs - tol))
        return false;
    }
    return true;
  };
  std::vector<std::map<VariableId, double>> out;
  for (std::size_t s = 0; s < n; ++s) {
    std::map<VariableId, double> target;
    for (const auto& v : m.root_columns) {
      const auto& b = m.master.bounds.at(v);
      double spread = 2.0 * std::max(1.0, std::abs(base[v]));
      double lo = std::isfinite(b.lower) ? b.lower : base[v] - spread;
      double hi = std::isfinite(b.upper) ? b.upper : std::max(lo, base[v]) + spread;
      target[v] = lo + unit(rng) * (hi - lo);
    }
    double t = unit(rng);
    std::map<VariableId, double> x = base;
    for (int attempt = 0; attempt < 20; ++attempt, t *= 0.5) {
      std::map<VariableId, double> y;
      for (const auto& v : m.root_columns) {
        double val = base[v] + t * (target[v] - base[v]);
        if (m.master.bounds.at(v).is_integer()) val = std::round(val);
        y[v] = val;
      }
      if (feasible(y)) {
        x = std::move(y);
        break;
      }
    }
    out.push_back(std::move(x));
  }
  return out;
}

BendersState run_benders(const OptiGraph& g, std::size_t root, const BendersConfig& cfg,
                         const SolverConfig& solver_cfg) {
  return BendersSolver(g, root, cfg, solver_cfg).run();
}

BendersState run_benders(const RemoteOptiGraph& g, const RemoteOptiGraph& root, const BendersConfig& cfg,
                         const SolverConfig& solver_cfg) {
  return BendersSolver(g, root, cfg, solver_cfg).run();
}

CutCheckReport cut_validity_check(const BendersState& state,
                                  const std::vector<std::map<VariableId, double>>& points,
                                  const SubproblemOracle& value) {
  CutCheckReport rep;
  for (std::size_t p = 0; p < points.size(); ++p) {
    std::map<std::size_t, double> cache;
    for (std::size_t k = 0; k < state.cuts.size(); ++k) {
      const BendersCut& cut = state.cuts[k];
      auto it = cache.find(cut.subproblem);
      if (it == cache.end()) it = cache.emplace(cut.subproblem, value(cut.subproblem, points[p])).first;
      double v = it->second;
      double excess = cut.evaluate(points[p]) - v;
      rep.max_violation = std::max(rep.max_violation, excess);
      ++rep.checked;
      if (excess > 1e-6 * (1.0 + std::abs(v)) && rep.passed) {
        rep.passed = false;
        std::string sub = cut.subproblem < state.subproblems.size() ? state.subproblems[cut.subproblem]
                                                                     : std::to_string(cut.subproblem);
        rep.failure = "cut " + std::to_string(k) + " of subproblem '" + sub + "' (iteration " +
                      std::to_string(cut.iteration) + ") exceeds the subproblem value at point " +
                      std::to_string(p) + " by " + format_double(excess);
      }
    }
  }
  return rep;
}

}  // namespace optigraph
