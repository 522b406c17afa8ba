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

#include <atomic>
#include <chrono>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "optigraph/program.hpp"
#include "optigraph/wire.hpp"

namespace optigraph {

using WorkerId = int;

/// Worker 1 is the coordinator's own process.
inline constexpr WorkerId kMainWorker = 1;

enum class Transport { kInProcess, kTcp };

std::string_view transport_name(Transport t);
Transport parse_transport(std::string_view name);

// Proxies carry identity only: no graph pointer, no coefficients.

struct ProxyNodeRef {
  NodeId node;
  std::string label;

  bool operator==(const ProxyNodeRef&) const = default;
};

struct ProxyVariableRef {
  NodeId node;
  std::uint32_t index = 0;
  std::string name;

  VariableId id() const { return {node, index}; }
  bool operator==(const ProxyVariableRef&) const = default;
};

struct ProxyEdgeRef {
  EdgeId edge;

  bool operator==(const ProxyEdgeRef&) const = default;
};

Json to_json(const ProxyNodeRef& p);
Json to_json(const ProxyVariableRef& p);
Json to_json(const ProxyEdgeRef& p);
ProxyNodeRef proxy_node_from_json(const Json& j);
ProxyVariableRef proxy_variable_from_json(const Json& j);
ProxyEdgeRef proxy_edge_from_json(const Json& j);

ProxyNodeRef to_proxy(const OptiGraph& g, const NodeId& node);
ProxyVariableRef to_proxy(const OptiGraph& g, const VariableId& v);
ProxyEdgeRef to_proxy(const EdgeId& e);

/// Lookups on the owning worker; a stale id raises ModelError naming it.
NodeId resolve_proxy(const OptiGraph& g, const ProxyNodeRef& p);
VariableId resolve_proxy(const OptiGraph& g, const ProxyVariableRef& p);
EdgeId resolve_proxy(const OptiGraph& g, const ProxyEdgeRef& p);

class Cluster;

struct RemoteNodeRef {
  Cluster* cluster = nullptr;
  GraphId graph;
  WorkerId worker = 0;
  ProxyNodeRef proxy;

  NodeId id() const { return proxy.node; }
};

struct RemoteVariableRef {
  Cluster* cluster = nullptr;
  GraphId graph;
  WorkerId worker = 0;
  ProxyVariableRef proxy;

  VariableId id() const { return proxy.id(); }
  const std::string& name() const { return proxy.name; }
  operator VariableId() const { return id(); }
};

struct RemoteEdgeRef {
  Cluster* cluster = nullptr;
  GraphId graph;
  WorkerId worker = 0;
  ProxyEdgeRef proxy;
};

/// Link constraints between nodes on different remote graphs. Held only by
/// the coordinator.
struct InterWorkerEdge {
  EdgeId id;
  std::vector<std::pair<GraphId, NodeId>> endpoints;
  std::vector<Constraint> link_constraints;
};

struct GraphStats {
  std::size_t nodes = 0;
  std::size_t edges = 0;
  std::size_t variables = 0;
  std::size_t constraints = 0;
  std::size_t integers = 0;
};

enum class BuildMode { kBatched, kPerCall };

/// Coordinator-side handle to an OptiGraph living on a worker. Copies share
/// the same underlying state.
class RemoteOptiGraph {
 public:
  RemoteOptiGraph() = default;

  GraphId id() const;
  WorkerId worker() const;
  const std::string& handle() const;
  const std::string& label() const;
  Cluster& cluster() const;
  bool valid() const { return state_ != nullptr; }

  const std::vector<RemoteOptiGraph>& subgraphs() const;
  const std::vector<InterWorkerEdge>& interworker_edges() const;
  /// This graph or a remote subgraph below it with the given id.
  const RemoteOptiGraph* find_graph(const GraphId& id) const;

  void add_subgraph(const RemoteOptiGraph& child);

  RemoteNodeRef add_node(const std::string& label);
  RemoteVariableRef add_variable(const RemoteNodeRef& node, const std::string& name,
                                 VariableBounds bounds = {},
                                 const std::vector<std::int64_t>& subscripts = {});
  void add_constraint(const RemoteNodeRef& node, const Constraint& c);
  void set_objective(const RemoteNodeRef& node, const AffineExpr& objective);
  /// Link between nodes of this graph; forwarded to its worker.
  RemoteEdgeRef add_link_constraint(const Constraint& c);
  /// Link spanning two or more remote graphs in this hierarchy; stored here.
  EdgeId add_interworker_link(const Constraint& c);

  /// Batched: one request for the whole program. Per call: one request per
  /// instruction plus one per fetched variable.
  std::vector<ProxyVariableRef> execute_build_program(const BuildProgram& program,
                                                      BuildMode mode = BuildMode::kBatched);
  RemoteVariableRef proxy_to_remote(const ProxyVariableRef& p) const;
  RemoteVariableRef variable(const std::string& canonical_name) const;

  GraphStats stats() const;

  bool operator==(const RemoteOptiGraph& o) const { return state_ == o.state_; }

 private:
  friend class Cluster;
  struct State;
  explicit RemoteOptiGraph(std::shared_ptr<State> s) : state_(std::move(s)) {}
  State& state() const;
  void check_owned(const Constraint& c, const char* what) const;

  std::shared_ptr<State> state_;
};

void set_lower_bound(const RemoteVariableRef& v, double value);
void set_upper_bound(const RemoteVariableRef& v, double value);
VariableBounds get_bounds(const RemoteVariableRef& v);

/// Local copy of a remote hierarchy: each worker graph is fetched and
/// rebuilt with its ids, remote subgraphs become subgraphs, and
/// InterWorkerEdges become ordinary edges of the collected parent.
OptiGraph collect_remote_graph(const RemoteOptiGraph& g);

class Connection;
class WorkerService;
class TcpWorkerServer;

/// Registry of workers and the transport to each. Requests to one worker
/// are serialized; requests to different workers may run concurrently.
class Cluster {
 public:
  Cluster();
  ~Cluster();
  Cluster(const Cluster&) = delete;
  Cluster& operator=(const Cluster&) = delete;

  /// Starts n workers behind the given transport. TCP workers listen on a
  /// loopback port and are reached through a socket.
  std::vector<WorkerId> spawn_workers(std::size_t n, Transport transport);
  /// Registers an already running worker daemon.
  WorkerId connect(const std::string& host, int port);

  std::vector<WorkerId> workers() const;
  bool is_registered(WorkerId w) const;
  /// Synchronous liveness probe.
  bool ping(WorkerId w, std::chrono::milliseconds timeout = std::chrono::seconds(5));

  Json call(WorkerId w, const std::string& kind, const std::string& handle, Json body);
  void set_transcript(Transcript* t) { transcript_ = t; }
  std::uint64_t requests_sent() const { return next_request_.load() - 1; }

  RemoteOptiGraph remote_graph(WorkerId w, const std::string& label = "graph");

  std::optional<GraphId> node_owner(const NodeId& node) const;
  void register_node(const NodeId& node, const GraphId& graph);
  std::string handle_of(const GraphId& graph) const;

 private:
  friend class RemoteOptiGraph;
  struct Worker;
  Worker& worker(WorkerId w) const;
  Json call_with_timeout(WorkerId w, const std::string& kind, const std::string& handle, Json body,
                         std::chrono::milliseconds timeout);
  WorkerId add_worker(std::unique_ptr<Connection> connection, std::shared_ptr<WorkerService> service,
                      std::unique_ptr<TcpWorkerServer> server);

  mutable std::mutex mu_;
  std::map<WorkerId, std::unique_ptr<Worker>> workers_;
  WorkerId next_worker_ = kMainWorker;
  std::atomic<std::uint64_t> next_request_{1};
  Transcript* transcript_ = nullptr;
  std::map<NodeId, GraphId> node_owner_;
  std::map<GraphId, std::string> handles_;
};

}  // namespace optigraph
