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

#include <doctest.h>

#include "optigraph/models.hpp"
#include "optigraph/solver.hpp"

using namespace optigraph;

namespace {

std::size_t count_integers(const StandardFormProblem& p) {
  std::size_t n = 0;
  for (const auto& [v, b] : p.bounds)
    if (b.is_integer()) ++n;
  return n;
}

}  // namespace

TEST_CASE("storage model sizes") {
  StorageParams p = StorageParams::defaults();
  StandardFormProblem f = flatten(build_local(storage_plan(p)));
  // One size column plus four per period; balance, start, inventory and
  // capacity rows.
  CHECK(f.num_variables() == static_cast<std::size_t>(1 + 4 * p.T));
  CHECK(f.rows.size() == static_cast<std::size_t>(3 * p.T));
  CHECK(max_row_ratio(f) <= 1e6);

  StandardFormProblem one = flatten(build_local(storage_plan(StorageParams::defaults(1))));
  CHECK(one.num_variables() == 5);
  CHECK(one.rows.size() == 3);
}

TEST_CASE("storage parameters are validated") {
  StorageParams p = StorageParams::defaults(4);
  p.beta.pop_back();
  CHECK_THROWS_AS(p.validate(), ModelError);
  CHECK_THROWS_AS(StorageParams::defaults(0).validate(), ModelError);
}

TEST_CASE("toy CEM sizes and integrality") {
  for (bool integer : {false, true}) {
    CAPTURE(integer);
    ToyCemParams p;
    p.zones = 3;
    p.weeks = 8;
    p.techs = 3;
    p.integer_builds = integer;
    ModelPlan plan = toy_cem_plan(p);
    CHECK(plan.parts.size() == 9);
    StandardFormProblem f = flatten(build_local(plan));
    const std::size_t Z = 3, W = 8, K = 3, H = 4;
    const std::size_t week_vars = Z * K + 1 + Z * K * H + (Z - 1) * H + Z * H;
    CHECK(f.num_variables() == Z * K + W + W * week_vars);
    CHECK(f.rows.size() == 1 + W * (Z * K * H + Z * H + 1) + W * (Z * K + 1));
    CHECK(count_integers(f) == (integer ? Z * K : 0));
    CHECK(max_row_ratio(f) <= 1e6);
    SolveResult r = solve(f);
    CHECK(r.optimal());
  }
}

TEST_CASE("toy CEM data is a function of the seed") {
  ToyCemParams a;
  a.seed = 5;
  ToyCemParams b = a;
  CHECK(canonical_dump(flatten(build_local(toy_cem_plan(a)))) ==
        canonical_dump(flatten(build_local(toy_cem_plan(b)))));
  b.seed = 6;
  CHECK(canonical_dump(flatten(build_local(toy_cem_plan(a)))) !=
        canonical_dump(flatten(build_local(toy_cem_plan(b)))));
  ToyCemParams bad;
  bad.zones = 0;
  CHECK_THROWS_AS(bad.validate(), ModelError);
}

TEST_CASE("remote builds collect to the local graph") {
  ToyCemParams cem;
  cem.zones = 2;
  cem.weeks = 3;
  std::vector<ModelPlan> plans{storage_plan(StorageParams::defaults(6)), toy_cem_plan(cem)};
  for (const auto& plan : plans) {
    const std::string local = canonical_dump(flatten(build_local(plan)));
    for (auto transport : {Transport::kInProcess, Transport::kTcp})
      for (auto mode : {BuildMode::kBatched, BuildMode::kPerCall}) {
        CAPTURE(static_cast<int>(transport));
        CAPTURE(static_cast<int>(mode));
        Cluster c;
        auto spawned = c.spawn_workers(3, transport);
        std::vector<WorkerId> all{kMainWorker};
        all.insert(all.end(), spawned.begin(), spawned.end());
        RemoteOptiGraph rg = build_remote(c, plan, default_assignment(plan, all), mode);
        CHECK(canonical_dump(flatten(collect_remote_graph(rg))) == local);
      }
  }
}

TEST_CASE("default assignment keeps the root on the main worker") {
  ModelPlan plan = toy_cem_plan(ToyCemParams{});
  auto a = default_assignment(plan, {1, 2, 3, 4});
  REQUIRE(a.size() == plan.parts.size());
  CHECK(a[plan.root] == 1);
  for (std::size_t i = 0; i < a.size(); ++i)
    if (i != plan.root) CHECK(a[i] != 1);
  auto single = default_assignment(plan, {1});
  for (auto w : single) CHECK(w == 1);
}
