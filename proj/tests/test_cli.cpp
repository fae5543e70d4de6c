/*
 * Copyright 2026 The hevfl Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <filesystem>
#include <sstream>
#include <string>

#include "doctest.h"
#include "hevfl/cli/commands.hpp"
#include "hevfl/error.hpp"

using namespace hevfl;
using matmult::Method;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return ErrorCode::kConfigInvalid;
}

cli::RunConfig bench_config(std::vector<Method> methods, std::vector<std::size_t> m, std::vector<std::size_t> n) {
  cli::RunConfig cfg;
  cfg.command = "bench-matmult";
  cfg.methods = std::move(methods);
  cfg.m = std::move(m);
  cfg.n = std::move(n);
  cfg.workers = 2;
  return cfg;
}

bool is_grid_case(const cli::ReportRow& r) {
  auto p2 = [](std::size_t v) { return next_power_of_two(v); };
  return r.method == "packvfl" && p2(r.m) > r.slots && p2(r.n) > r.slots;
}

}  // namespace

TEST_CASE("bench over two sizes and three methods is exact") {
  const auto r = cli::cmd_bench_matmult(bench_config({Method::kNaive, Method::kGala, Method::kPackVfl}, {64, 256}, {64, 256}));
  REQUIRE(r.rows.size() == 6);
  for (const auto& row : r.rows) {
    CHECK(row.max_abs_error == 0.0);
    CHECK(row.pass());
  }
  CHECK(r.pass());
}

TEST_CASE("64x64 packvfl and gala counts are equal at 4096 slots") {
  auto cfg = bench_config({Method::kGala, Method::kPackVfl}, {64}, {64});
  cfg.slots = {4096};
  cfg.preset = "paper-122";
  const auto r = cli::cmd_bench_matmult(cfg);
  REQUIRE(r.rows.size() == 2);
  CHECK(r.rows[0].ops == r.rows[1].ops);
}

TEST_CASE("empty method list is rejected") {
  CHECK(code_of([] { cli::cmd_bench_matmult(bench_config({}, {4}, {4})); }) == ErrorCode::kConfigInvalid);
  cli::RunConfig cfg;
  cfg.command = "verify-complexity";
  CHECK(code_of([&] { cli::cmd_verify_complexity(cfg); }) == ErrorCode::kConfigInvalid);
}

TEST_CASE("bench rejects sizes a method cannot take") {
  auto cfg = bench_config({Method::kNaive}, {1024}, {4});
  CHECK(code_of([&] { cli::cmd_bench_matmult(cfg); }) == ErrorCode::kConfigInvalid);
  cfg = bench_config({Method::kNaive}, {4, 8, 16}, {4, 8});
  CHECK(code_of([&] { cli::cmd_bench_matmult(cfg); }) == ErrorCode::kConfigInvalid);
}

TEST_CASE("bench on the lattice backend is exact") {
  auto cfg = bench_config(matmult::all_methods(), {8, 4}, {4, 16});
  cfg.backend = cli::BackendKind::kRlwe;
  cfg.slots = {32};
  const auto r = cli::cmd_bench_matmult(cfg);
  for (const auto& row : r.rows) {
    CAPTURE(row.method);
    CHECK(row.max_abs_error == 0.0);
    CHECK(row.counts_match);
  }
}

TEST_CASE("verify-complexity sweep: only the grid-case add count disagrees") {
  cli::RunConfig cfg;
  cfg.command = "verify-complexity";
  cfg.methods = matmult::all_methods();
  const auto r = cli::cmd_verify_complexity(cfg);
  CHECK(r.rows.size() > 300);
  std::size_t grid_failures = 0;
  for (const auto& row : r.rows) {
    CAPTURE(row.method);
    CAPTURE(row.m);
    CAPTURE(row.n);
    CAPTURE(row.slots);
    CHECK(row.max_abs_error == 0.0);
    CHECK(row.audit_pass);
    if (is_grid_case(row)) {
      // The closed form for tiles in both directions counts mn/N' - 1
      // additions; the tiled product needs mn/N' - m/N'.
      CHECK_FALSE(row.counts_match);
      REQUIRE(row.notes.size() == 1);
      const std::size_t tiles = row.m * row.n / row.slots, rows = row.m / row.slots;
      CHECK(row.notes[0] == "add: measured " + std::to_string(tiles - rows) + ", predicted " + std::to_string(tiles - 1));
      ++grid_failures;
    } else {
      CHECK(row.pass());
    }
  }
  CHECK(grid_failures > 0);
}

TEST_CASE("verify-complexity passes the tall and wide large-operand cases") {
  cli::RunConfig cfg;
  cfg.command = "verify-complexity";
  cfg.methods = {Method::kPackVfl};
  cfg.m = {16, 4, 64, 8};
  cfg.n = {4, 16, 8, 64};
  cfg.slots = {8};
  const auto r = cli::cmd_verify_complexity(cfg);
  REQUIRE(r.rows.size() == 4);
  CHECK(r.pass());
  CHECK(r.rows[1].ops == OpCounter{7, 8, 0, 6});
}

TEST_CASE("a corrupted predictor fails with an itemized diff") {
  cli::RunConfig cfg;
  cfg.command = "verify-complexity";
  cfg.methods = {Method::kGala};
  cfg.m = {8};
  cfg.n = {8};
  cfg.slots = {8};
  auto broken = [](Method m, std::size_t rows, std::size_t cols, std::size_t slots) {
    auto p = matmult::predict_complexity(m, rows, cols, slots);
    p.ops.rot += 1;
    p.ct_a_to_b = 2;
    return p;
  };
  const auto r = cli::cmd_verify_complexity(cfg, broken);
  REQUIRE(r.rows.size() == 1);
  CHECK_FALSE(r.pass());
  const auto& notes = r.rows[0].notes;
  REQUIRE(notes.size() == 2);
  CHECK(notes[0].rfind("rot: measured", 0) == 0);
  CHECK(notes[1].find("A->B") != std::string::npos);
}

TEST_CASE("reports are deterministic apart from wall time") {
  auto cfg = bench_config({Method::kNaive, Method::kPackVfl, Method::kCheetah}, {8, 4}, {4, 8});
  std::ostringstream a, b, ja, jb;
  const auto r1 = cli::cmd_bench_matmult(cfg);
  cfg.workers = 1;
  const auto r2 = cli::cmd_bench_matmult(cfg);
  cli::write_csv(a, r1, false);
  cli::write_csv(b, r2, false);
  cli::write_jsonl(ja, r1, false);
  cli::write_jsonl(jb, r2, false);
  CHECK(a.str() == b.str());
  CHECK(ja.str() == jb.str());
}

TEST_CASE("gen-dataset then train") {
  const auto dir = std::filesystem::temp_directory_path();
  cli::RunConfig gen;
  gen.command = "gen-dataset";
  gen.generation = {256, 4, 4, GroundTruthKind::kLinear, 0.1, 5};
  gen.out = (dir / "hevfl_cli_linear.csv").string();
  const auto paths = cli::cmd_gen_dataset(gen);
  REQUIRE(paths.size() == 2);
  for (const auto& p : paths) CHECK(std::filesystem::exists(p));

  cli::RunConfig cfg;
  cfg.command = "train";
  cfg.dataset = gen.out;
  cfg.training.epochs = 2;
  const auto out = cli::cmd_train(cfg);
  CHECK(out.pass);
  CHECK(out.report.epochs.size() == 3);
  std::ostringstream csv;
  cli::write_csv(csv, out.report);
  CHECK(csv.str().rfind("protocol,epoch,loss,loss_central,abs_diff\n", 0) == 0);

  cfg.dataset = (dir / "hevfl_missing.csv").string();
  CHECK(code_of([&] { cli::cmd_train(cfg); }) == ErrorCode::kDatasetMissing);
  cfg.dataset = gen.out;
  cfg.backend = cli::BackendKind::kRlwe;
  CHECK(code_of([&] { cli::cmd_train(cfg); }) == ErrorCode::kConfigInvalid);
}
