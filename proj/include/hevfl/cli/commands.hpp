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

#pragma once

#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "hevfl/dataset.hpp"
#include "hevfl/matmult/matmult.hpp"
#include "hevfl/training.hpp"

namespace hevfl::cli {

enum class BackendKind { kSemantic, kRlwe };

std::string to_string(BackendKind b);
BackendKind backend_from_string(const std::string& name);

struct RunConfig {
  std::string command;
  std::vector<matmult::Method> methods;
  std::vector<std::size_t> m, n;  // paired element-wise; a single value broadcasts
  std::vector<std::size_t> slots;
  BackendKind backend = BackendKind::kSemantic;
  std::string preset = "desk-1024";
  std::string dataset;
  TrainingConfig training;
  DatasetSpec generation;
  std::uint64_t seed = 1;
  std::string out;
  std::size_t workers = 0;  // 0: hardware concurrency

  // Throws ConfigInvalid naming the offending flag.
  void validate() const;
};

struct ReportRow {
  std::string method;
  std::size_t m = 0, n = 0, slots = 0;
  OpCounter ops;
  std::uint64_t bytes_in = 0;   // toward the matrix owner
  std::uint64_t bytes_out = 0;  // back to the key owner
  double modeled_time = 0.0;
  double modeled_cost = 0.0;
  double wall_time = 0.0;
  double max_abs_error = 0.0;
  bool counts_match = true;
  bool audit_pass = true;
  std::vector<std::string> notes;  // itemized mismatches

  bool pass() const { return counts_match && audit_pass && max_abs_error == 0.0; }
};

struct Report {
  std::vector<ReportRow> rows;
  bool pass() const;
};

using Predictor = std::function<matmult::ComplexityPrediction(matmult::Method, std::size_t, std::size_t, std::size_t)>;

// One row per (method, size) pair: random matrices, measured counts against
// the predictor, transcript audit, and oracle error.
Report cmd_bench_matmult(const RunConfig& cfg, const Predictor& predictor = matmult::predict_complexity);

// Sweeps every supported (method, m, n, N') on the semantic backend. Without
// explicit sizes: m, n in {2, ..., 64}, N' in {8, 64}, plus the large-operand cases.
Report cmd_verify_complexity(const RunConfig& cfg, const Predictor& predictor = matmult::predict_complexity);

// Loss tolerance between the federated run and the centralized reference.
double parity_tolerance(Protocol p);

struct TrainOutcome {
  TrainingReport report;
  bool pass = true;
};

// Throws DatasetMissing when cfg.dataset does not exist.
TrainOutcome cmd_train(const RunConfig& cfg);

// Writes the CSV and its ground-truth weights; returns the written paths.
std::vector<std::string> cmd_gen_dataset(const RunConfig& cfg);

// CSV with a header line; structured records as one JSON object per line.
void write_csv(std::ostream& os, const Report& r, bool include_wall_time = true);
void write_jsonl(std::ostream& os, const Report& r, bool include_wall_time = true);
void write_csv(std::ostream& os, const TrainingReport& r);
void write_jsonl(std::ostream& os, const TrainingReport& r);

}  // namespace hevfl::cli
