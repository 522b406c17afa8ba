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

#include "optigraph/remote.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <condition_variable>
#include <cstring>
#include <deque>
#include <functional>
#include <future>
#include <set>
#include <thread>

#include "optigraph/worker.hpp"

namespace optigraph {

std::string_view transport_name(Transport t) { return t == Transport::kTcp ? "tcp" : "inproc"; }

Transport parse_transport(std::string_view name) {
  if (name == "inproc" || name == "in_process") return Transport::kInProcess;
  if (name == "tcp") return Transport::kTcp;
  throw ModelError("unknown transport '" + std::string(name) + "' (expected inproc or tcp)");
}

// ---- proxies -------------------------------------------------------------

Json to_json(const ProxyNodeRef& p) { return Json{{"node", p.node.str()}, {"label", p.label}}; }

Json to_json(const ProxyVariableRef& p) {
  return Json{{"node", p.node.str()}, {"index", p.index}, {"name", p.name}};
}

Json to_json(const ProxyEdgeRef& p) { return Json{{"edge", p.edge.str()}}; }

ProxyNodeRef proxy_node_from_json(const Json& j) {
  return {NodeId::parse(j.at("node").get<std::string>()), j.at("label").get<std::string>()};
}

ProxyVariableRef proxy_variable_from_json(const Json& j) {
  return {NodeId::parse(j.at("node").get<std::string>()), j.at("index").get<std::uint32_t>(),
          j.at("name").get<std::string>()};
}

ProxyEdgeRef proxy_edge_from_json(const Json& j) { return {EdgeId::parse(j.at("edge").get<std::string>())}; }

ProxyNodeRef to_proxy(const OptiGraph& g, const NodeId& node) { return {node, g.node(node).label()}; }

ProxyVariableRef to_proxy(const OptiGraph& g, const VariableId& v) {
  return {v.node, v.index, g.variable_name(v)};
}

ProxyEdgeRef to_proxy(const EdgeId& e) { return {e}; }

NodeId resolve_proxy(const OptiGraph& g, const ProxyNodeRef& p) {
  const OptiNode* n = g.find_node(p.node);
  if (!n) throw ModelError("stale node reference " + p.node.str() + " ('" + p.label + "')");
  return p.node;
}

VariableId resolve_proxy(const OptiGraph& g, const ProxyVariableRef& p) {
  const OptiNode* n = g.find_node(p.node);
  if (!n) throw ModelError("stale variable reference: node " + p.node.str() + " not found");
  if (p.index >= n->num_variables() || n->variables()[p.index].name != p.name)
    throw ModelError("stale variable reference '" + p.name + "' on node " + p.node.str());
  return p.id();
}

EdgeId resolve_proxy(const OptiGraph& g, const ProxyEdgeRef& p) {
  for (const auto* e : g.all_edges())
    if (e->id == p.edge) return p.edge;
  throw ModelError("stale edge reference " + p.edge.str());
}

// ---- transports ----------------------------------------------------------

class Connection {
 public:
  virtual ~Connection() = default;
  /// Sends a request payload and returns the response payload.
  virtual std::string exchange(const std::string& payload, std::chrono::milliseconds timeout) = 0;
};

namespace {

/// Worker thread fed through a queue of complete frames.
class InProcessConnection : public Connection {
 public:
  explicit InProcessConnection(std::shared_ptr<WorkerService> service)
      : service_(std::move(service)), thread_([this] { loop(); }) {}

  ~InProcessConnection() override {
    {
      std::lock_guard lock(mu_);
      stopping_ = true;
    }
    cv_.notify_all();
    thread_.join();
  }

  std::string exchange(const std::string& payload, std::chrono::milliseconds timeout) override {
    auto job = std::make_shared<Job>();
    job->frame = encode_frame(payload);
    auto reply = job->reply.get_future();
    {
      std::lock_guard lock(mu_);
      queue_.push_back(job);
    }
    cv_.notify_one();
    if (reply.wait_for(timeout) != std::future_status::ready)
      throw TransportError("in-process worker did not answer within " +
                           std::to_string(timeout.count()) + " ms");
    return std::string(frame_payload(reply.get()));
  }

 private:
  struct Job {
    std::string frame;
    std::promise<std::string> reply;
  };

  void loop() {
    while (true) {
      std::shared_ptr<Job> job;
      {
        std::unique_lock lock(mu_);
        cv_.wait(lock, [&] { return stopping_ || !queue_.empty(); });
        if (queue_.empty()) return;
        job = queue_.front();
        queue_.pop_front();
      }
      try {
        job->reply.set_value(encode_frame(service_->handle(frame_payload(job->frame))));
      } catch (...) {
        job->reply.set_exception(std::current_exception());
      }
    }
  }

  std::shared_ptr<WorkerService> service_;
  std::mutex mu_;
  std::condition_variable cv_;
  std::deque<std::shared_ptr<Job>> queue_;
  bool stopping_ = false;
  std::thread thread_;
};

class TcpConnection : public Connection {
 public:
  TcpConnection(const std::string& host, int port) {
    addrinfo hints{};
    hints.ai_family = AF_INET;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* res = nullptr;
    if (::getaddrinfo(host.c_str(), std::to_string(port).c_str(), &hints, &res) != 0 || !res)
      throw TransportError("cannot resolve worker host '" + host + "'");
    fd_ = ::socket(res->ai_family, res->ai_socktype, res->ai_protocol);
    if (fd_ < 0 || ::connect(fd_, res->ai_addr, res->ai_addrlen) < 0) {
      std::string err = std::strerror(errno);
      ::freeaddrinfo(res);
      if (fd_ >= 0) ::close(fd_);
      throw TransportError("cannot connect to worker at " + host + ":" + std::to_string(port) + ": " + err);
    }
    ::freeaddrinfo(res);
    int one = 1;
    ::setsockopt(fd_, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
  }

  ~TcpConnection() override {
    if (fd_ >= 0) ::close(fd_);
  }

  std::string exchange(const std::string& payload, std::chrono::milliseconds timeout) override {
    if (broken_) throw TransportError("connection to worker is no longer usable");
    try {
      write_frame(fd_, payload);
      std::string reply;
      if (!read_frame(fd_, reply, timeout)) throw TransportError("worker closed the connection");
      return reply;
    } catch (const TransportError&) {
      broken_ = true;
      throw;
    }
  }

 private:
  int fd_ = -1;
  bool broken_ = false;
};

}  // namespace

// ---- cluster -------------------------------------------------------------

struct Cluster::Worker {
  WorkerId id = 0;
  std::mutex mu;  // FIFO per worker
  std::shared_ptr<WorkerService> service;
  std::unique_ptr<TcpWorkerServer> server;
  std::unique_ptr<Connection> connection;
};

Cluster::Cluster() {
  auto service = std::make_shared<WorkerService>(kMainWorker);
  add_worker(std::make_unique<InProcessConnection>(service), service, nullptr);
}

Cluster::~Cluster() {
  std::lock_guard lock(mu_);
  for (auto& [id, w] : workers_) {
    w->connection.reset();
    if (w->server) w->server->stop();
  }
}

WorkerId Cluster::add_worker(std::unique_ptr<Connection> connection, std::shared_ptr<WorkerService> service,
                             std::unique_ptr<TcpWorkerServer> server) {
  std::lock_guard lock(mu_);
  auto w = std::make_unique<Worker>();
  w->id = next_worker_++;
  if (service) service->set_worker_id(w->id);
  w->service = std::move(service);
  w->server = std::move(server);
  w->connection = std::move(connection);
  WorkerId id = w->id;
  workers_.emplace(id, std::move(w));
  return id;
}

std::vector<WorkerId> Cluster::spawn_workers(std::size_t n, Transport transport) {
  if (n == 0) throw ModelError("spawn_workers needs at least one worker");
  std::vector<WorkerId> out;
  for (std::size_t i = 0; i < n; ++i) {
    auto service = std::make_shared<WorkerService>();
    if (transport == Transport::kInProcess) {
      out.push_back(add_worker(std::make_unique<InProcessConnection>(service), service, nullptr));
    } else {
      auto server = std::make_unique<TcpWorkerServer>(service, "127.0.0.1", 0);
      server->start();
      auto conn = std::make_unique<TcpConnection>("127.0.0.1", server->port());
      out.push_back(add_worker(std::move(conn), service, std::move(server)));
    }
  }
  for (WorkerId w : out)
    if (!ping(w)) throw TransportError("worker " + std::to_string(w) + " did not answer ping");
  return out;
}

WorkerId Cluster::connect(const std::string& host, int port) {
  WorkerId w = add_worker(std::make_unique<TcpConnection>(host, port), nullptr, nullptr);
  if (!ping(w)) throw TransportError("worker at " + host + ":" + std::to_string(port) + " did not answer ping");
  return w;
}

std::vector<WorkerId> Cluster::workers() const {
  std::lock_guard lock(mu_);
  std::vector<WorkerId> out;
  for (const auto& [id, w] : workers_) out.push_back(id);
  return out;
}

bool Cluster::is_registered(WorkerId w) const {
  std::lock_guard lock(mu_);
  return workers_.contains(w);
}

Cluster::Worker& Cluster::worker(WorkerId w) const {
  std::lock_guard lock(mu_);
  auto it = workers_.find(w);
  if (it == workers_.end()) throw ModelError("worker " + std::to_string(w) + " is not registered");
  return *it->second;
}

bool Cluster::ping(WorkerId w, std::chrono::milliseconds timeout) {
  try {
    call_with_timeout(w, "ping", "", Json::object(), timeout);
    return true;
  } catch (const TransportError&) {
    return false;
  }
}

Json Cluster::call(WorkerId w, const std::string& kind, const std::string& handle, Json body) {
  return call_with_timeout(w, kind, handle, std::move(body), std::chrono::hours(24));
}

Json Cluster::call_with_timeout(WorkerId w, const std::string& kind, const std::string& handle, Json body,
                                std::chrono::milliseconds timeout) {
  Worker& target = worker(w);
  std::lock_guard lock(target.mu);
  WireMessage req{next_request_++, kind, handle, std::move(body)};
  std::string payload = encode_payload(req);
  if (transcript_) transcript_->record(payload);
  std::string reply;
  try {
    reply = target.connection->exchange(payload, timeout);
  } catch (const TransportError& e) {
    throw TransportError("request " + std::to_string(req.request_id) + " (" + kind + ") to worker " +
                         std::to_string(w) + ": " + e.what());
  }
  if (transcript_) transcript_->record(reply);
  WireMessage resp = decode_payload(reply);
  if (resp.request_id != req.request_id)
    throw TransportError("response id " + std::to_string(resp.request_id) + " does not match request " +
                         std::to_string(req.request_id));
  if (resp.kind == "error") {
    std::string type = resp.body.value("type", "internal");
    std::string message = resp.body.value("message", "remote error");
    if (type == "model") throw ModelError(message);
    if (type == "structure") throw StructureError(message);
    if (type == "transport") throw TransportError(message);
    throw RemoteError(type, message);
  }
  return std::move(resp.body);
}

std::optional<GraphId> Cluster::node_owner(const NodeId& node) const {
  std::lock_guard lock(mu_);
  auto it = node_owner_.find(node);
  if (it == node_owner_.end()) return std::nullopt;
  return it->second;
}

std::string Cluster::handle_of(const GraphId& graph) const {
  std::lock_guard lock(mu_);
  auto it = handles_.find(graph);
  if (it == handles_.end()) throw ModelError("graph " + graph.str() + " is not registered");
  return it->second;
}

void Cluster::register_node(const NodeId& node, const GraphId& graph) {
  std::lock_guard lock(mu_);
  node_owner_[node] = graph;
}

// ---- remote graphs -------------------------------------------------------

struct RemoteOptiGraph::State {
  Cluster* cluster = nullptr;
  GraphId id;
  WorkerId worker = 0;
  std::string handle;
  std::string label;
  std::vector<RemoteOptiGraph> subgraphs;
  std::vector<InterWorkerEdge> interworker;
  bool has_parent = false;
};

RemoteOptiGraph Cluster::remote_graph(WorkerId w, const std::string& label) {
  validate_identifier(label, "graph label");
  Json r = call(w, "create_graph", "", Json{{"label", label}});
  auto s = std::make_shared<RemoteOptiGraph::State>();
  s->cluster = this;
  s->id = GraphId::parse(r.at("id").get<std::string>());
  s->worker = w;
  s->handle = r.at("handle").get<std::string>();
  s->label = label;
  {
    std::lock_guard lock(mu_);
    handles_[s->id] = s->handle;
  }
  return RemoteOptiGraph(std::move(s));
}

RemoteOptiGraph::State& RemoteOptiGraph::state() const {
  if (!state_) throw ModelError("use of an empty RemoteOptiGraph handle");
  return *state_;
}

GraphId RemoteOptiGraph::id() const { return state().id; }
WorkerId RemoteOptiGraph::worker() const { return state().worker; }
const std::string& RemoteOptiGraph::handle() const { return state().handle; }
const std::string& RemoteOptiGraph::label() const { return state().label; }
Cluster& RemoteOptiGraph::cluster() const { return *state().cluster; }
const std::vector<RemoteOptiGraph>& RemoteOptiGraph::subgraphs() const { return state().subgraphs; }
const std::vector<InterWorkerEdge>& RemoteOptiGraph::interworker_edges() const { return state().interworker; }

const RemoteOptiGraph* RemoteOptiGraph::find_graph(const GraphId& id) const {
  if (state().id == id) return this;
  for (const auto& sg : state().subgraphs)
    if (const auto* found = sg.find_graph(id)) return found;
  return nullptr;
}

void RemoteOptiGraph::add_subgraph(const RemoteOptiGraph& child) {
  State& s = state();
  if (child.state_ == state_) throw ModelError("a graph cannot be its own subgraph");
  if (child.state().cluster != s.cluster) throw ModelError("subgraph belongs to another cluster");
  if (child.state().has_parent)
    throw ModelError("remote graph '" + child.label() + "' already has a parent");
  if (child.find_graph(s.id)) throw ModelError("adding '" + child.label() + "' would create a cycle");
  child.state().has_parent = true;
  s.subgraphs.push_back(child);
}

RemoteNodeRef RemoteOptiGraph::add_node(const std::string& label) {
  State& s = state();
  Json r = s.cluster->call(s.worker, "add_node", s.handle, Json{{"label", label}});
  ProxyNodeRef p = proxy_node_from_json(r);
  s.cluster->register_node(p.node, s.id);
  return {s.cluster, s.id, s.worker, p};
}

RemoteVariableRef RemoteOptiGraph::add_variable(const RemoteNodeRef& node, const std::string& name,
                                                VariableBounds bounds,
                                                const std::vector<std::int64_t>& subscripts) {
  State& s = state();
  if (node.graph != s.id) throw ModelError("node '" + node.proxy.label + "' belongs to another remote graph");
  Json body{{"node", to_json(node.proxy)}, {"name", name}, {"subscripts", subscripts}, {"bounds", to_json(bounds)}};
  Json r = s.cluster->call(s.worker, "add_variable", s.handle, std::move(body));
  return {s.cluster, s.id, s.worker, proxy_variable_from_json(r)};
}

void RemoteOptiGraph::check_owned(const Constraint& c, const char* what) const {
  const State& s = state();
  for (const auto& [v, coef] : c.body.terms()) {
    auto owner = s.cluster->node_owner(v.node);
    if (owner && *owner != s.id)
      throw ModelError(std::string(what) + " on '" + s.label +
                       "' references a variable on another remote graph; use add_interworker_link");
  }
}

void RemoteOptiGraph::add_constraint(const RemoteNodeRef& node, const Constraint& c) {
  State& s = state();
  check_owned(c, "constraint");
  s.cluster->call(s.worker, "add_constraint", s.handle,
                  Json{{"node", to_json(node.proxy)}, {"constraint", to_json(c)}});
}

void RemoteOptiGraph::set_objective(const RemoteNodeRef& node, const AffineExpr& objective) {
  State& s = state();
  s.cluster->call(s.worker, "set_objective", s.handle,
                  Json{{"node", to_json(node.proxy)}, {"objective", to_json(objective)}});
}

RemoteEdgeRef RemoteOptiGraph::add_link_constraint(const Constraint& c) {
  State& s = state();
  check_owned(c, "link constraint");
  Json r = s.cluster->call(s.worker, "add_link", s.handle, Json{{"constraint", to_json(c)}});
  return {s.cluster, s.id, s.worker, proxy_edge_from_json(r)};
}

EdgeId RemoteOptiGraph::add_interworker_link(const Constraint& c) {
  State& s = state();
  std::set<std::pair<GraphId, NodeId>> endpoints;
  std::set<GraphId> graphs;
  for (const auto& [v, coef] : c.body.terms()) {
    auto owner = s.cluster->node_owner(v.node);
    if (!owner) throw ModelError("inter-worker link references unknown remote node " + v.node.str());
    if (!find_graph(*owner))
      throw ModelError("inter-worker link references a graph outside the hierarchy of '" + s.label + "'");
    endpoints.emplace(*owner, v.node);
    graphs.insert(*owner);
  }
  if (graphs.size() < 2)
    throw StructureError("inter-worker link spans " + std::to_string(graphs.size()) +
                         " remote graph(s); use add_link_constraint for links inside one graph");
  if (!std::isfinite(c.rhs)) throw ModelError("constraint rhs must be finite");
  std::vector<std::pair<GraphId, NodeId>> ends(endpoints.begin(), endpoints.end());
  auto it = std::find_if(s.interworker.begin(), s.interworker.end(),
                         [&](const InterWorkerEdge& e) { return e.endpoints == ends; });
  if (it == s.interworker.end()) {
    s.interworker.push_back(InterWorkerEdge{EdgeId::generate(), ends, {}});
    it = s.interworker.end() - 1;
  }
  Constraint row = c;
  if (row.body.constant() != 0.0) {
    row.rhs -= row.body.constant();
    row.body.add_constant(-row.body.constant());
  }
  it->link_constraints.push_back(std::move(row));
  return it->id;
}

RemoteVariableRef RemoteOptiGraph::proxy_to_remote(const ProxyVariableRef& p) const {
  const State& s = state();
  s.cluster->register_node(p.node, s.id);
  return {s.cluster, s.id, s.worker, p};
}

RemoteVariableRef RemoteOptiGraph::variable(const std::string& canonical_name) const {
  const State& s = state();
  Json r = s.cluster->call(s.worker, "lookup_variable", s.handle, Json{{"name", canonical_name}});
  return proxy_to_remote(proxy_variable_from_json(r));
}

namespace {

/// Coordinator-side replay of a program, one request per instruction.
class PerCallBuilder {
 public:
  PerCallBuilder(Cluster& c, WorkerId w, std::string handle) : c_(c), w_(w), handle_(std::move(handle)) {}

  void run(const BuildProgram& p) {
    for (std::size_t i = 0; i < p.size(); ++i) {
      try {
        step(p.instructions()[i]);
      } catch (const ModelError& e) {
        throw ModelError("build program failed at instruction " + std::to_string(i) + ": " + e.what());
      }
    }
  }

  ProxyVariableRef lookup(const std::string& name) {
    auto it = vars_.find(name);
    if (it != vars_.end()) return it->second;
    return fetch(name);
  }

  ProxyVariableRef fetch(const std::string& name) {
    return proxy_variable_from_json(c_.call(w_, "lookup_variable", handle_, Json{{"name", name}}));
  }

 private:
  Json node(const std::string& label) {
    auto it = nodes_.find(label);
    if (it == nodes_.end()) throw ModelError("unknown node '" + label + "'");
    return to_json(it->second);
  }

  AffineExpr expr(const NamedExpr& e) {
    AffineExpr out(e.constant);
    for (const auto& [name, coef] : e.terms) out.add_term(lookup(name).id(), coef);
    return out;
  }

  Constraint row(const NamedConstraint& c) { return {expr(c.body), c.sense, c.rhs}; }

  void step(const Instruction& ins) {
    if (auto* a = std::get_if<program::AddNode>(&ins)) {
      nodes_[a->label] = proxy_node_from_json(c_.call(w_, "add_node", handle_, Json{{"label", a->label}}));
    } else if (auto* v = std::get_if<program::AddVariable>(&ins)) {
      Json body{{"node", node(v->node)}, {"name", v->name}, {"subscripts", v->subscripts},
                {"bounds", to_json(v->bounds)}};
      ProxyVariableRef p = proxy_variable_from_json(c_.call(w_, "add_variable", handle_, std::move(body)));
      vars_[p.name] = p;
    } else if (auto* k = std::get_if<program::AddConstraint>(&ins)) {
      c_.call(w_, "add_constraint", handle_, Json{{"node", node(k->node)}, {"constraint", to_json(row(k->constraint))}});
    } else if (auto* o = std::get_if<program::SetObjective>(&ins)) {
      c_.call(w_, "set_objective", handle_, Json{{"node", node(o->node)}, {"objective", to_json(expr(o->objective))}});
    } else if (auto* l = std::get_if<program::AddLink>(&ins)) {
      c_.call(w_, "add_link", handle_, Json{{"constraint", to_json(row(l->constraint))}});
    }
  }

  Cluster& c_;
  WorkerId w_;
  std::string handle_;
  std::map<std::string, ProxyNodeRef> nodes_;
  std::map<std::string, ProxyVariableRef> vars_;
};

}  // namespace

std::vector<ProxyVariableRef> RemoteOptiGraph::execute_build_program(const BuildProgram& program,
                                                                     BuildMode mode) {
  State& s = state();
  std::vector<ProxyVariableRef> out;
  if (mode == BuildMode::kBatched) {
    if (program.empty() && program.fetches().empty()) return out;
    Json r = s.cluster->call(s.worker, "execute_program", s.handle, Json{{"program", to_json(program)}});
    for (const auto& p : r.at("proxies")) out.push_back(proxy_variable_from_json(p));
  } else {
    PerCallBuilder builder(*s.cluster, s.worker, s.handle);
    builder.run(program);
    for (const auto& name : program.fetches()) out.push_back(builder.fetch(name));
  }
  for (const auto& p : out) s.cluster->register_node(p.node, s.id);
  return out;
}

GraphStats RemoteOptiGraph::stats() const {
  const State& s = state();
  Json r = s.cluster->call(s.worker, "stats", s.handle, Json::object());
  return {r.at("nodes").get<std::size_t>(), r.at("edges").get<std::size_t>(),
          r.at("variables").get<std::size_t>(), r.at("constraints").get<std::size_t>(),
          r.at("integers").get<std::size_t>()};
}

void set_lower_bound(const RemoteVariableRef& v, double value) {
  if (!v.cluster) throw ModelError("remote variable reference has no cluster");
  v.cluster->call(v.worker, "set_lower_bound", v.cluster->handle_of(v.graph),
                  Json{{"variable", to_json(v.proxy)}, {"value", value}});
}

void set_upper_bound(const RemoteVariableRef& v, double value) {
  if (!v.cluster) throw ModelError("remote variable reference has no cluster");
  v.cluster->call(v.worker, "set_upper_bound", v.cluster->handle_of(v.graph),
                  Json{{"variable", to_json(v.proxy)}, {"value", value}});
}

VariableBounds get_bounds(const RemoteVariableRef& v) {
  if (!v.cluster) throw ModelError("remote variable reference has no cluster");
  return bounds_from_json(v.cluster->call(v.worker, "get_bounds", v.cluster->handle_of(v.graph),
                                          Json{{"variable", to_json(v.proxy)}}));
}

OptiGraph collect_remote_graph(const RemoteOptiGraph& g) {
  Json r = g.cluster().call(g.worker(), "fetch_graph", g.handle(), Json::object());
  OptiGraph local = graph_from_json(r.at("graph"));
  for (const auto& sg : g.subgraphs()) local.add_subgraph(collect_remote_graph(sg));
  for (const auto& e : g.interworker_edges())
    for (const auto& c : e.link_constraints) local.add_link_constraint(c, e.id);
  return local;
}

}  // namespace optigraph
