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

#include "hevfl/cli/commands.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>
#include <random>
#include <thread>

#include <json.hpp>

#include "hevfl/error.hpp"
#include "hevfl/matmult/matmult.hpp"
#include "hevfl/presets.hpp"
#include "hevfl/protocols/session.hpp"
#include "hevfl/rlwe/rlwe_backend.hpp"
#include "hevfl/simd/semantic_backend.hpp"

namespace hevfl::cli {

namespace {

using matmult::Method;
using protocols::IMat;
using protocols::IVec;

constexpr u64 kRlwePlainModulus = 786433;

struct Case {
  Method method;
  std::size_t m, n, slots;
};

std::vector<std::pair<std::size_t, std::size_t>> size_pairs(const RunConfig& cfg) {
  const std::size_t count = std::max(cfg.m.size(), cfg.n.size());
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t i = 0; i < count; ++i) {
    out.emplace_back(cfg.m.size() == 1 ? cfg.m[0] : cfg.m[i], cfg.n.size() == 1 ? cfg.n[0] : cfg.n[i]);
  }
  return out;
}

// Entries bounded so that every inner product stays below t/2.
i64 entry_bound(std::size_t n, u64 t) {
  const double b = std::sqrt(static_cast<double>(t / 2 - 1) / static_cast<double>(n));
  return std::max<i64>(1, std::min<i64>(50, static_cast<i64>(b)));
}

IMat random_matrix(std::mt19937_64& rng, std::size_t m, std::size_t n, i64 bound) {
  std::uniform_int_distribution<i64> d(-bound, bound);
  IMat x(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = d(rng);
  return x;
}

std::string diff(const char* what, std::uint64_t got, std::uint64_t want) {
  return std::string(what) + ": measured " + std::to_string(got) + ", predicted " + std::to_string(want);
}

std::unique_ptr<Backend> make_backend(BackendKind kind, std::size_t slots, std::size_t max_dim) {
  if (kind == BackendKind::kSemantic) return std::make_unique<SemanticBackend>(semantic_params(slots));
  std::vector<std::size_t> offsets;
  for (std::size_t i = 1; i < slots; ++i) {
    if (i <= max_dim || i >= slots - max_dim) offsets.push_back(i);
  }
  return std::make_unique<rlwe::RlweBackend>(rlwe::rlwe_params(2 * slots, kRlwePlainModulus),
                                             rlwe::RlweOptions{offsets});
}

ReportRow run_case(const Backend& be, const Case& c, const CostModel& sizes, const Predictor& predictor,
                   std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const i64 bound = entry_bound(c.n, be.params().plain_modulus);
  const IMat x = random_matrix(rng, c.m, c.n, bound);
  const IVec y = random_matrix(rng, c.n, 1, bound).col(0);
  const auto r = protocols::run_matmult_session(be, c.method, x, y, sizes);
  const IVec expect = x * y;
  ReportRow row;
  row.method = matmult::to_string(c.method);
  row.m = c.m;
  row.n = c.n;
  row.slots = c.slots;
  row.ops = r.ops;
  row.bytes_in = r.comm.direction("B", "A").bytes;
  row.bytes_out = r.comm.direction("A", "B").bytes;
  row.modeled_time = r.comm.modeled_seconds;
  row.modeled_cost = sizes.cost(r.ops);
  row.wall_time = r.wall_seconds;
  for (Eigen::Index i = 0; i < expect.size(); ++i) {
    const double e = std::abs(static_cast<double>(r.values[static_cast<std::size_t>(i)] - expect(i)));
    row.max_abs_error = std::max(row.max_abs_error, e);
  }
  const auto pred = predictor(c.method, c.m, c.n, c.slots);
  const OpCounter& p = pred.ops;
  if (r.ops.add != p.add) row.notes.push_back(diff("add", r.ops.add, p.add));
  if (r.ops.mult != p.mult) row.notes.push_back(diff("mult", r.ops.mult, p.mult));
  if (r.ops.rot != p.rot) row.notes.push_back(diff("rot", r.ops.rot, p.rot));
  if (r.ops.hst_rot != p.hst_rot) row.notes.push_back(diff("hst", r.ops.hst_rot, p.hst_rot));
  row.counts_match = row.notes.empty();
  const auto audit = netsim::audit(r.transcript, pred);
  row.audit_pass = audit.pass;
  row.notes.insert(row.notes.end(), audit.mismatches.begin(), audit.mismatches.end());
  if (row.max_abs_error != 0.0) row.notes.push_back("oracle error " + std::to_string(row.max_abs_error));
  return row;
}

// Runs cases on a worker pool; rows keep case order.
Report run_cases(const std::vector<Case>& cases, BackendKind kind, const CostModel& sizes,
                 const Predictor& predictor, std::uint64_t seed, std::size_t workers) {
  // One backend per slot count, shared read-only by the workers.
  std::map<std::size_t, std::unique_ptr<Backend>> backends;
  std::map<std::size_t, std::size_t> max_dim;
  for (const Case& c : cases) max_dim[c.slots] = std::max({max_dim[c.slots], c.m, c.n});
  for (const auto& [slots, dim] : max_dim) backends[slots] = make_backend(kind, slots, dim);

  Report report;
  report.rows.resize(cases.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, std::max<std::size_t>(cases.size(), 1));
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < cases.size(); i = next++) {
          try {
            report.rows[i] = run_case(*backends.at(cases[i].slots), cases[i], sizes, predictor, seed + i);
          } catch (...) {
            std::lock_guard<std::mutex> lock(failure_mu);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
  return report;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(9);
  os << v;
  return os.str();
}

}  // namespace

std::string to_string(BackendKind b) { return b == BackendKind::kSemantic ? "semantic" : "rlwe"; }

BackendKind backend_from_string(const std::string& name) {
  if (name == "semantic") return BackendKind::kSemantic;
  if (name == "rlwe") return BackendKind::kRlwe;
  throw Error(ErrorCode::kConfigInvalid, "unknown backend '" + name + "' (semantic, rlwe)");
}

void RunConfig::validate() const {
  (void)hevfl::preset(preset);
  auto positive = [](const std::vector<std::size_t>& v, const char* flag) {
    for (std::size_t x : v) {
      if (x == 0) throw Error(ErrorCode::kConfigInvalid, std::string(flag) + " values must be positive");
    }
  };
  positive(m, "--m");
  positive(n, "--n");
  positive(slots, "--slots");
  for (std::size_t s : slots) {
    if (!is_power_of_two(s)) throw Error(ErrorCode::kConfigInvalid, "--slots values must be powers of two");
  }
  if (command == "bench-matmult") {
    if (methods.empty()) throw Error(ErrorCode::kConfigInvalid, "--method needs at least one method");
    if (m.empty() || n.empty()) throw Error(ErrorCode::kConfigInvalid, "--m and --n are required");
    if (m.size() != n.size() && m.size() != 1 && n.size() != 1) {
      throw Error(ErrorCode::kConfigInvalid, "--m and --n lists must have equal length or a single value");
    }
    if (slots.size() > 1) throw Error(ErrorCode::kConfigInvalid, "bench-matmult takes one --slots value");
  }
  if (command == "verify-complexity") {
    if (methods.empty()) throw Error(ErrorCode::kConfigInvalid, "--method needs at least one method");
  }
  if (command == "train") {
    if (backend != BackendKind::kSemantic) {
      throw Error(ErrorCode::kConfigInvalid, "train runs on the semantic backend (the protocols need a 61-bit t)");
    }
    training.validate();
  }
}

bool Report::pass() const {
  return std::all_of(rows.begin(), rows.end(), [](const ReportRow& r) { return r.pass(); });
}

Report cmd_bench_matmult(const RunConfig& cfg, const Predictor& predictor) {
  cfg.validate();
  const Preset ps = preset(cfg.preset);
  const std::size_t slots = cfg.slots.empty() ? ps.ring_degree / 2 : cfg.slots.front();
  std::vector<Case> cases;
  for (const auto& [m, n] : size_pairs(cfg)) {
    for (Method method : cfg.methods) {
      const std::size_t ring = cfg.backend == BackendKind::kRlwe ? 2 * slots : slots;
      if (!matmult::method_supports(method, m, n, slots, ring)) {
        throw Error(ErrorCode::kConfigInvalid, matmult::to_string(method) + " does not accept " + std::to_string(m) +
                                                   "x" + std::to_string(n) + " with " + std::to_string(slots) +
                                                   " slots");
      }
      cases.push_back({method, m, n, slots});
    }
  }
  return run_cases(cases, cfg.backend, cost_model_for(ps), predictor, cfg.seed, cfg.workers);
}

Report cmd_verify_complexity(const RunConfig& cfg, const Predictor& predictor) {
  cfg.validate();
  std::vector<std::size_t> dims{2, 4, 8, 16, 32, 64};
  const std::vector<std::size_t> slot_list = cfg.slots.empty() ? std::vector<std::size_t>{8, 64} : cfg.slots;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  if (cfg.m.empty() && cfg.n.empty()) {
    for (std::size_t m : dims) {
      for (std::size_t n : dims) pairs.emplace_back(m, n);
    }
  } else {
    if (cfg.m.empty() || cfg.n.empty()) throw Error(ErrorCode::kConfigInvalid, "give both --m and --n or neither");
    pairs = size_pairs(cfg);
  }
  std::vector<Case> cases;
  for (std::size_t slots : slot_list) {
    for (const auto& [m, n] : pairs) {
      for (Method method : cfg.methods) {
        if (matmult::method_supports(method, m, n, slots, slots)) cases.push_back({method, m, n, slots});
      }
    }
  }
  if (cfg.m.empty() && std::find(cfg.methods.begin(), cfg.methods.end(), Method::kPackVfl) != cfg.methods.end()) {
    // Large-operand cases: tall, wide and grid.
    for (auto [m, n] : std::vector<std::pair<std::size_t, std::size_t>>{{16, 4}, {4, 16}, {32, 16}, {16, 32}}) {
      cases.push_back({Method::kPackVfl, m, n, 8});
    }
  }
  return run_cases(cases, BackendKind::kSemantic, cost_model_for(preset(cfg.preset)), predictor, cfg.seed,
                   cfg.workers);
}

double parity_tolerance(Protocol p) { return p == Protocol::kLinr ? 1e-3 : 1e-2; }

TrainOutcome cmd_train(const RunConfig& cfg) {
  cfg.validate();
  if (cfg.dataset.empty()) throw Error(ErrorCode::kDatasetMissing, "--data is required for train");
  const Dataset data = read_dataset(cfg.dataset);
  TrainOutcome out{train(data, cfg.training), true};
  const double tol = parity_tolerance(cfg.training.protocol);
  for (const auto& e : out.report.epochs) {
    if (!(std::abs(e.loss - e.loss_central) <= tol)) out.pass = false;
  }
  return out;
}

std::vector<std::string> cmd_gen_dataset(const RunConfig& cfg) {
  if (cfg.out.empty()) throw Error(ErrorCode::kConfigInvalid, "--out is required for gen-dataset");
  auto [data, truth] = generate_dataset(cfg.generation);
  write_dataset(cfg.out, data, truth);
  return {cfg.out, weights_path(cfg.out)};
}

void write_csv(std::ostream& os, const Report& r, bool include_wall_time) {
  os << "method,m,n,slots,add,mult,rot,hst,bytes_in,bytes_out,modeled_time,modeled_cost,";
  if (include_wall_time) os << "wall_time,";
  os << "max_abs_error,pass\n";
  for (const auto& row : r.rows) {
    os << row.method << ',' << row.m << ',' << row.n << ',' << row.slots << ',' << row.ops.add << ','
       << row.ops.mult << ',' << row.ops.rot << ',' << row.ops.hst_rot << ',' << row.bytes_in << ','
       << row.bytes_out << ',' << fmt(row.modeled_time) << ',' << fmt(row.modeled_cost) << ',';
    if (include_wall_time) os << fmt(row.wall_time) << ',';
    os << fmt(row.max_abs_error) << ',' << (row.pass() ? "PASS" : "FAIL") << '\n';
  }
}

void write_jsonl(std::ostream& os, const Report& r, bool include_wall_time) {
  for (const auto& row : r.rows) {
    nlohmann::ordered_json j;
    j["method"] = row.method;
    j["m"] = row.m;
    j["n"] = row.n;
    j["slots"] = row.slots;
    j["add"] = row.ops.add;
    j["mult"] = row.ops.mult;
    j["rot"] = row.ops.rot;
    j["hst"] = row.ops.hst_rot;
    j["bytes_in"] = row.bytes_in;
    j["bytes_out"] = row.bytes_out;
    j["modeled_time"] = row.modeled_time;
    j["modeled_cost"] = row.modeled_cost;
    if (include_wall_time) j["wall_time"] = row.wall_time;
    j["max_abs_error"] = row.max_abs_error;
    j["pass"] = row.pass();
    j["notes"] = row.notes;
    os << j.dump() << '\n';
  }
}

void write_csv(std::ostream& os, const TrainingReport& r) {
  const bool auc = !r.epochs.empty() && r.epochs.front().auc.has_value();
  os << "protocol,epoch,loss,loss_central,abs_diff";
  if (auc) os << ",auc,auc_central";
  os << '\n';
  for (const auto& e : r.epochs) {
    os << to_string(r.protocol) << ',' << e.epoch << ',' << fmt(e.loss) << ',' << fmt(e.loss_central) << ','
       << fmt(std::abs(e.loss - e.loss_central));
    if (auc) os << ',' << fmt(*e.auc) << ',' << fmt(*e.auc_central);
    os << '\n';
  }
}

void write_jsonl(std::ostream& os, const TrainingReport& r) {
  for (const auto& e : r.epochs) {
    nlohmann::ordered_json j;
    j["protocol"] = to_string(r.protocol);
    j["epoch"] = e.epoch;
    j["loss"] = e.loss;
    j["loss_central"] = e.loss_central;
    if (e.auc) {
      j["auc"] = *e.auc;
      j["auc_central"] = *e.auc_central;
    }
    os << j.dump() << '\n';
  }
  nlohmann::ordered_json total;
  total["iterations"] = r.iterations;
  total["add"] = r.ops.add;
  total["mult"] = r.ops.mult;
  total["rot"] = r.ops.rot;
  total["hst"] = r.ops.hst_rot;
  total["bytes"] = r.comm.total_bytes();
  total["modeled_time"] = r.comm.modeled_seconds;
  os << total.dump() << '\n';
}

}  // namespace hevfl::cli
