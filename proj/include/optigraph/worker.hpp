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
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "optigraph/benders.hpp"
#include "optigraph/wire.hpp"

namespace optigraph {

/// Graph store and command interpreter of one worker. handle() is
/// serialized internally, so a worker behaves as a single-threaded loop no
/// matter how many connections feed it.
class WorkerService {
 public:
  explicit WorkerService(int worker_id = 0) : worker_id_(worker_id) {}

  /// Consumes one request payload and returns the response payload.
  std::string handle(std::string_view request_payload);
  void set_worker_id(int id) { worker_id_ = id; }

 private:
  Json dispatch(const WireMessage& m);
  OptiGraph& graph(const std::string& handle);

  std::mutex mu_;
  int worker_id_;
  std::size_t next_graph_ = 1;
  std::map<std::string, OptiGraph> graphs_;
  std::map<std::string, std::unique_ptr<BendersSubproblem>> subproblems_;
};

/// Blocking helpers for framed I/O on a socket.
void write_frame(int fd, std::string_view payload);
/// Returns false on orderly EOF before any header byte.
bool read_frame(int fd, std::string& payload, std::chrono::milliseconds timeout);

/// Accepts loopback or remote connections and feeds their frames to a
/// WorkerService, one thread per connection.
class TcpWorkerServer {
 public:
  /// Port 0 picks an ephemeral port.
  TcpWorkerServer(std::shared_ptr<WorkerService> service, const std::string& host, int port);
  ~TcpWorkerServer();
  TcpWorkerServer(const TcpWorkerServer&) = delete;
  TcpWorkerServer& operator=(const TcpWorkerServer&) = delete;

  int port() const { return port_; }
  void start();
  /// Runs the accept loop on the calling thread until stop().
  void serve();
  void stop();

 private:
  void serve_connection(int fd);

  std::shared_ptr<WorkerService> service_;
  int listen_fd_ = -1;
  int port_ = 0;
  std::atomic<bool> stopping_{false};
  std::thread accept_thread_;
  std::mutex conn_mu_;
  std::vector<std::thread> connection_threads_;
  std::vector<int> connection_fds_;
};

/// "host:port" or ":port" or "port".
std::pair<std::string, int> parse_listen_spec(const std::string& spec);

}  // namespace optigraph
