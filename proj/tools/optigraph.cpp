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

// optigraph: solve the bundled models, run a worker daemon, or capture a
// protocol transcript.
//
// Exit status: 0 optimal, 1 usage or other failure, 2 infeasible,
// 3 structural or model error, 4 transport error.

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>

#include "optigraph/harness.hpp"
#include "optigraph/worker.hpp"

using namespace optigraph;

namespace {

constexpr int kExitOptimal = 0;
constexpr int kExitOther = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitStructure = 3;
constexpr int kExitTransport = 4;

std::size_t default_workers() {
  if (const char* env = std::getenv("OPTIGRAPH_WORKERS")) {
    char* end = nullptr;
    unsigned long n = std::strtoul(env, &end, 10);
    if (end != env && *end == '\0' && n > 0) return n;
  }
  return 3;
}

struct SolveFlags {
  std::string mode = "monolithic";
  std::size_t workers = default_workers();
  std::string transport = "inproc";
  std::vector<std::string> connect;
  double gap = 1e-3;
  bool per_call = false;
  std::string trace;
  std::string dump;
  bool no_timing = false;
};

void add_solve_flags(CLI::App* cmd, SolveFlags& f) {
  cmd->add_option("--mode", f.mode, "monolithic, benders or benders-remote")
      ->check(CLI::IsMember({"monolithic", "benders", "benders-remote"}));
  cmd->add_option("--workers", f.workers, "Workers to spawn in remote mode (env OPTIGRAPH_WORKERS)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--transport", f.transport, "inproc or tcp")->check(CLI::IsMember({"inproc", "tcp"}));
  cmd->add_option("--connect", f.connect, "host:port of a running worker (repeatable)");
  cmd->add_option("--gap", f.gap, "Benders relative gap")->check(CLI::PositiveNumber);
  cmd->add_flag("--per-call", f.per_call, "Build remote graphs one request per call");
  cmd->add_option("--trace", f.trace, "Write the Benders convergence trace (CSV)");
  cmd->add_option("--dump", f.dump, "Write the canonical dump of the flattened model");
  cmd->add_flag("--no-timing", f.no_timing, "Zero the wall-clock column of the trace");
}

int status_exit(SolveStatus s) {
  switch (s) {
    case SolveStatus::kOptimal:
      return kExitOptimal;
    case SolveStatus::kInfeasible:
      return kExitInfeasible;
    default:
      return kExitOther;
  }
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << text;
}

int solve_plan(const ModelPlan& plan, const SolveFlags& f, bool derive_theta) {
  RunOptions o;
  o.mode = parse_solve_mode(f.mode);
  o.workers = f.workers;
  o.transport = parse_transport(f.transport);
  o.connect = f.connect;
  o.build = f.per_call ? BuildMode::kPerCall : BuildMode::kBatched;
  o.benders.rel_gap = f.gap;
  o.benders.derive_theta_lower = derive_theta;
  o.want_dump = !f.dump.empty();
  RunResult r = run_model(plan, o);
  std::cout << summary(r, o.mode);
  if (!f.no_timing) std::cout << "seconds " << format_double(r.seconds) << '\n';
  if (!f.dump.empty()) write_file(f.dump, r.dump);
  if (!f.trace.empty()) {
    if (!r.benders) throw ModelError("--trace needs a Benders mode");
    write_file(f.trace, r.benders->trace_csv(!f.no_timing));
  }
  return status_exit(r.status);
}

int run_worker(const std::string& listen) {
  auto [host, port] = parse_listen_spec(listen);
  auto service = std::make_shared<WorkerService>();
  TcpWorkerServer server(service, host.empty() ? "127.0.0.1" : host, port);
  std::cout << "listening " << (host.empty() ? "127.0.0.1" : host) << ':' << server.port() << std::endl;
  server.serve();
  return kExitOptimal;
}

int protocol_dump(const std::string& path, int periods, const std::string& transport) {
  Transcript transcript;
  RunOptions o;
  o.mode = SolveMode::kBendersRemote;
  o.workers = 2;
  o.transport = parse_transport(transport);
  o.benders.derive_theta_lower = true;
  o.transcript = &transcript;
  RunResult r = run_model(storage_plan(StorageParams::defaults(periods)), o);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  transcript.write(out);
  auto lines = transcript.lines();
  std::string pairing = check_pairing(lines);
  std::cout << "frames " << lines.size() << '\n'
            << "pairing " << (pairing.empty() ? "ok" : pairing) << '\n'
            << "objective " << format_double(r.objective) << '\n';
  return pairing.empty() ? status_exit(r.status) : kExitTransport;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Graph-structured optimization models with Benders decomposition"};
  app.require_subcommand(1);

  auto* storage = app.add_subcommand("storage", "Storage sizing and inventory model");
  storage->require_subcommand(1);
  auto* storage_solve = storage->add_subcommand("solve", "Solve the storage model");
  SolveFlags storage_flags;
  int periods = 20;
  add_solve_flags(storage_solve, storage_flags);
  storage_solve->add_option("--periods", periods, "Number of periods")->check(CLI::PositiveNumber);

  auto* cem = app.add_subcommand("cem", "Toy capacity expansion model");
  cem->require_subcommand(1);
  auto* cem_solve = cem->add_subcommand("solve", "Solve a generated capacity expansion instance");
  SolveFlags cem_flags;
  ToyCemParams cem_params;
  add_solve_flags(cem_solve, cem_flags);
  cem_solve->add_option("--zones", cem_params.zones, "Zones")->check(CLI::PositiveNumber);
  cem_solve->add_option("--weeks", cem_params.weeks, "Weekly subproblems")->check(CLI::PositiveNumber);
  cem_solve->add_option("--techs", cem_params.techs, "Technologies per zone")->check(CLI::PositiveNumber);
  cem_solve->add_option("--hours", cem_params.hours, "Hours per week")->check(CLI::PositiveNumber);
  cem_solve->add_flag("--integer", cem_params.integer_builds, "Integer build decisions");
  cem_solve->add_option("--seed", cem_params.seed, "Data seed");

  auto* worker = app.add_subcommand("worker", "Serve a worker over TCP");
  std::string listen;
  worker->add_option("--listen", listen, "host:port to listen on (port 0 picks one)")->required();

  auto* dump = app.add_subcommand("protocol-dump", "Record the wire transcript of a remote solve");
  std::string capture;
  std::string dump_transport = "inproc";
  int dump_periods = 4;
  dump->add_option("--capture", capture, "Transcript output file")->required();
  dump->add_option("--transport", dump_transport, "inproc or tcp")->check(CLI::IsMember({"inproc", "tcp"}));
  dump->add_option("--periods", dump_periods, "Storage periods")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    std::cerr << app.help();
    return code == 0 ? kExitOther : code;
  }

  try {
    if (*storage_solve) return solve_plan(storage_plan(StorageParams::defaults(periods)), storage_flags, true);
    if (*cem_solve) return solve_plan(toy_cem_plan(cem_params), cem_flags, false);
    if (*worker) return run_worker(listen);
    if (*dump) return protocol_dump(capture, dump_periods, dump_transport);
  } catch (const StructureError& e) {
    std::cerr << "structural error: " << e.what() << '\n';
    return kExitStructure;
  } catch (const ModelError& e) {
    std::cerr << "model error: " << e.what() << '\n';
    return kExitStructure;
  } catch (const TransportError& e) {
    std::cerr << "transport error: " << e.what() << '\n';
    return kExitTransport;
  } catch (const RemoteError& e) {
    std::cerr << "worker error (" << e.type() << "): " << e.what() << '\n';
    return kExitTransport;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitOther;
  }
  return kExitOther;
}
