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

#include "optigraph/worker.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "optigraph/program.hpp"
#include "optigraph/remote.hpp"

namespace optigraph {

namespace {

Json stats_of(const OptiGraph& g) {
  std::size_t vars = 0, rows = 0, integers = 0;
  for (const auto& n : g.nodes()) {
    vars += n.num_variables();
    for (const auto& v : n.variables()) integers += v.bounds.is_integer() ? 1 : 0;
    rows += n.constraints().size();
  }
  for (const auto& e : g.edges()) rows += e.constraints.size();
  Json j;
  j["nodes"] = g.nodes().size();
  j["edges"] = g.edges().size();
  j["variables"] = vars;
  j["constraints"] = rows;
  j["integers"] = integers;
  return j;
}

Json error_body(const std::string& type, const std::string& message) {
  Json j;
  j["type"] = type;
  j["message"] = message;
  return j;
}

SolverConfig solver_from_json(const Json& j) {
  SolverConfig cfg;
  if (j.is_object()) {
    cfg.feas_tol = j.value("feas_tol", cfg.feas_tol);
    cfg.pivot_tol = j.value("pivot_tol", cfg.pivot_tol);
    cfg.max_iterations = j.value("max_iterations", cfg.max_iterations);
  }
  cfg.validate();
  return cfg;
}

}  // namespace

OptiGraph& WorkerService::graph(const std::string& handle) {
  auto it = graphs_.find(handle);
  if (it == graphs_.end()) throw ModelError("unknown graph handle '" + handle + "'");
  return it->second;
}

Json WorkerService::dispatch(const WireMessage& m) {
  const Json& b = m.body;
  const std::string& k = m.kind;
  if (k == "ping") return Json{{"worker", worker_id_}};
  if (k == "create_graph") {
    std::string handle = "w" + std::to_string(worker_id_) + "g" + std::to_string(next_graph_++);
    OptiGraph g(b.at("label").get<std::string>());
    Json out{{"handle", handle}, {"id", g.id().str()}};
    graphs_.emplace(handle, std::move(g));
    return out;
  }
  if (k == "drop_graph") {
    graphs_.erase(m.graph_handle);
    return Json::object();
  }
  if (k == "create_subproblem_graph") {
    // Full graph shipped by the coordinator when a subproblem spans workers.
    std::string handle = "w" + std::to_string(worker_id_) + "g" + std::to_string(next_graph_++);
    graphs_.emplace(handle, graph_from_json(b.at("graph")));
    return Json{{"handle", handle}};
  }
  if (k == "prepare_subproblem") {
    OptiGraph& g = graph(m.graph_handle);
    auto sub = std::make_unique<BendersSubproblem>(g, subproblem_spec_from_json(b.at("spec")),
                                                   solver_from_json(b.value("solver", Json())));
    Json out{{"columns", sub->problem().num_variables()}, {"rows", sub->problem().num_rows()}};
    subproblems_[b.at("key").get<std::string>()] = std::move(sub);
    return out;
  }
  if (k == "solve_subproblem" || k == "bound_subproblem") {
    auto it = subproblems_.find(b.at("key").get<std::string>());
    if (it == subproblems_.end()) throw ModelError("unknown subproblem key");
    if (k == "bound_subproblem") return Json{{"bound", it->second->relaxation_bound()}};
    return to_json(it->second->solve(b.at("values").get<std::vector<double>>()));
  }

  OptiGraph& g = graph(m.graph_handle);
  if (k == "add_node") {
    NodeId id = g.add_node(b.at("label").get<std::string>());
    return to_json(to_proxy(g, id));
  }
  if (k == "add_variable") {
    NodeId node = resolve_proxy(g, proxy_node_from_json(b.at("node")));
    auto subs = b.at("subscripts").get<std::vector<std::int64_t>>();
    VariableId v = g.add_variable(node, b.at("name").get<std::string>(),
                                  bounds_from_json(b.at("bounds")), subs);
    return to_json(to_proxy(g, v));
  }
  if (k == "add_constraint") {
    NodeId node = resolve_proxy(g, proxy_node_from_json(b.at("node")));
    ConstraintId c = g.add_constraint(node, constraint_from_json(b.at("constraint")));
    return Json{{"index", c.index}};
  }
  if (k == "set_objective") {
    NodeId node = resolve_proxy(g, proxy_node_from_json(b.at("node")));
    g.set_node_objective(node, expr_from_json(b.at("objective")));
    return Json::object();
  }
  if (k == "add_link") return to_json(to_proxy(g.add_link_constraint(constraint_from_json(b.at("constraint")))));
  if (k == "set_lower_bound" || k == "set_upper_bound") {
    VariableId v = resolve_proxy(g, proxy_variable_from_json(b.at("variable")));
    double value = b.at("value").get<double>();
    if (k == "set_lower_bound")
      g.set_lower_bound(v, value);
    else
      g.set_upper_bound(v, value);
    return Json::object();
  }
  if (k == "get_bounds") return to_json(g.bounds(resolve_proxy(g, proxy_variable_from_json(b.at("variable")))));
  if (k == "lookup_variable") {
    auto v = g.find_variable(b.at("name").get<std::string>());
    if (!v) throw ModelError("unknown variable '" + b.at("name").get<std::string>() + "'");
    return to_json(to_proxy(g, *v));
  }
  if (k == "stats") return stats_of(g);
  if (k == "execute_program") {
    auto vars = execute(g, program_from_json(b.at("program")));
    Json out = Json::array();
    for (const auto& v : vars) out.push_back(to_json(to_proxy(g, v)));
    return Json{{"proxies", std::move(out)}};
  }
  if (k == "fetch_graph") return Json{{"graph", graph_to_json(g)}};
  if (k == "dump_graph") return Json{{"dump", dump_graph(g)}};
  throw ModelError("unknown command '" + k + "'");
}

std::string WorkerService::handle(std::string_view request_payload) {
  std::lock_guard lock(mu_);
  WireMessage req;
  try {
    req = decode_payload(request_payload);
  } catch (const std::exception& e) {
    return encode_payload({0, "error", "", error_body("transport", e.what())});
  }
  WireMessage resp{req.request_id, "ok", req.graph_handle, Json::object()};
  try {
    resp.body = dispatch(req);
  } catch (const StructureError& e) {
    resp.kind = "error";
    resp.body = error_body("structure", e.what());
  } catch (const ModelError& e) {
    resp.kind = "error";
    resp.body = error_body("model", e.what());
  } catch (const std::exception& e) {
    resp.kind = "error";
    resp.body = error_body("internal", e.what());
  }
  return encode_payload(resp);
}

namespace {

void write_all(int fd, const char* data, std::size_t n) {
  while (n > 0) {
    ssize_t w = ::send(fd, data, n, MSG_NOSIGNAL);
    if (w < 0) {
      if (errno == EINTR) continue;
      throw TransportError(std::string("send failed: ") + std::strerror(errno));
    }
    data += w;
    n -= static_cast<std::size_t>(w);
  }
}

// Reads exactly n bytes. Returns false on EOF before the first byte when
// allow_eof is set.
bool read_exact(int fd, char* out, std::size_t n, std::chrono::milliseconds timeout, bool allow_eof) {
  std::size_t got = 0;
  auto deadline = std::chrono::steady_clock::now() + timeout;
  while (got < n) {
    auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0) throw TransportError("timed out waiting for frame");
    pollfd p{fd, POLLIN, 0};
    int rc = ::poll(&p, 1, static_cast<int>(std::min<long long>(left.count(), 1000)));
    if (rc < 0) {
      if (errno == EINTR) continue;
      throw TransportError(std::string("poll failed: ") + std::strerror(errno));
    }
    if (rc == 0) continue;
    ssize_t r = ::recv(fd, out + got, n - got, 0);
    if (r == 0) {
      if (got == 0 && allow_eof) return false;
      throw TransportError("connection closed mid-frame");
    }
    if (r < 0) {
      if (errno == EINTR || errno == EAGAIN) continue;
      throw TransportError(std::string("recv failed: ") + std::strerror(errno));
    }
    got += static_cast<std::size_t>(r);
  }
  return true;
}

}  // namespace

void write_frame(int fd, std::string_view payload) {
  std::string f = encode_frame(payload);
  write_all(fd, f.data(), f.size());
}

bool read_frame(int fd, std::string& payload, std::chrono::milliseconds timeout) {
  unsigned char header[4];
  if (!read_exact(fd, reinterpret_cast<char*>(header), 4, timeout, true)) return false;
  std::uint32_t n = decode_length(header);
  payload.assign(n, '\0');
  if (n > 0) read_exact(fd, payload.data(), n, timeout, false);
  return true;
}

std::pair<std::string, int> parse_listen_spec(const std::string& spec) {
  std::string host = "127.0.0.1";
  std::string port = spec;
  auto colon = spec.rfind(':');
  if (colon != std::string::npos) {
    if (colon > 0) host = spec.substr(0, colon);
    port = spec.substr(colon + 1);
  }
  try {
    std::size_t used = 0;
    int p = std::stoi(port, &used);
    if (used != port.size() || p < 0 || p > 65535) throw std::invalid_argument("port");
    return {host, p};
  } catch (const std::exception&) {
    throw TransportError("bad address '" + spec + "' (expected host:port)");
  }
}

TcpWorkerServer::TcpWorkerServer(std::shared_ptr<WorkerService> service, const std::string& host, int port)
    : service_(std::move(service)) {
  listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (listen_fd_ < 0) throw TransportError(std::string("socket: ") + std::strerror(errno));
  int one = 1;
  ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(static_cast<std::uint16_t>(port));
  if (::inet_pton(AF_INET, host == "localhost" ? "127.0.0.1" : host.c_str(), &addr.sin_addr) != 1) {
    ::close(listen_fd_);
    throw TransportError("cannot listen on host '" + host + "'");
  }
  if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) < 0 ||
      ::listen(listen_fd_, 16) < 0) {
    std::string err = std::strerror(errno);
    ::close(listen_fd_);
    throw TransportError("cannot listen on " + host + ":" + std::to_string(port) + ": " + err);
  }
  socklen_t len = sizeof(addr);
  ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
}

TcpWorkerServer::~TcpWorkerServer() { stop(); }

void TcpWorkerServer::start() {
  accept_thread_ = std::thread([this] { serve(); });
}

void TcpWorkerServer::serve() {
  while (!stopping_) {
    pollfd p{listen_fd_, POLLIN, 0};
    int rc = ::poll(&p, 1, 100);
    if (rc <= 0) continue;
    int fd = ::accept(listen_fd_, nullptr, nullptr);
    if (fd < 0) continue;
    int one = 1;
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
    std::lock_guard lock(conn_mu_);
    connection_fds_.push_back(fd);
    connection_threads_.emplace_back([this, fd] { serve_connection(fd); });
  }
}

void TcpWorkerServer::serve_connection(int fd) {
  std::string payload;
  try {
    while (!stopping_ && read_frame(fd, payload, std::chrono::hours(24 * 365)))
      write_frame(fd, service_->handle(payload));
  } catch (const std::exception&) {
    // Peer went away.
  }
}

void TcpWorkerServer::stop() {
  if (stopping_.exchange(true)) return;
  if (accept_thread_.joinable()) accept_thread_.join();
  {
    std::lock_guard lock(conn_mu_);
    for (int fd : connection_fds_) ::shutdown(fd, SHUT_RDWR);
  }
  for (auto& t : connection_threads_)
    if (t.joinable()) t.join();
  for (int fd : connection_fds_) ::close(fd);
  if (listen_fd_ >= 0) ::close(listen_fd_);
  listen_fd_ = -1;
}

}  // namespace optigraph
