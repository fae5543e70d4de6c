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

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hevfl/cli/commands.hpp"
#include "hevfl/error.hpp"

using namespace hevfl;

namespace {

std::vector<matmult::Method> parse_methods(const std::vector<std::string>& names, bool given) {
  if (!given) return matmult::all_methods();
  std::vector<matmult::Method> out;
  for (const auto& n : names) {
    if (!n.empty()) out.push_back(matmult::method_from_string(n));
  }
  return out;
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

template <typename R>
void emit(const R& report, const std::string& out) {
  cli::write_csv(std::cout, report);
  if (out.empty()) return;
  std::ofstream os(out);
  if (!os) throw Error(ErrorCode::kIoFailure, "cannot write " + out);
  if (ends_with(out, ".csv")) {
    cli::write_csv(os, report);
  } else {
    cli::write_jsonl(os, report);
  }
}

void print_failures(const cli::Report& r) {
  for (const auto& row : r.rows) {
    if (row.pass()) continue;
    std::cerr << "FAIL " << row.method << ' ' << row.m << 'x' << row.n << " slots=" << row.slots << '\n';
    for (const auto& note : row.notes) std::cerr << "  " << note << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Packed-HE matrix multiplication and vertical federated learning toolkit"};
  app.require_subcommand(1);

  cli::RunConfig cfg;
  std::vector<std::string> methods;
  std::string backend = "semantic", protocol = "linr", kind = "linear";

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--preset", cfg.preset, "paper-122, paper-156 or desk-1024")->capture_default_str();
    sub->add_option("--seed", cfg.seed, "random seed")->capture_default_str();
    sub->add_option("--out", cfg.out, "output file (.csv for CSV, otherwise JSON lines)");
  };
  auto add_sizes = [&](CLI::App* sub) {
    sub->add_option("--method", methods, "methods, comma separated")->delimiter(',');
    sub->add_option("--m", cfg.m, "row counts, comma separated")->delimiter(',');
    sub->add_option("--n", cfg.n, "column counts, comma separated")->delimiter(',');
    sub->add_option("--slots", cfg.slots, "slot counts N'")->delimiter(',');
    sub->add_option("--workers", cfg.workers, "worker threads (0: all cores)");
  };

  auto* bench = app.add_subcommand("bench-matmult", "run MatMult methods on random matrices");
  add_sizes(bench);
  add_common(bench);
  bench->add_option("--backend", backend, "semantic or rlwe")->capture_default_str();

  auto* verify = app.add_subcommand("verify-complexity", "check measured counts against the closed forms");
  add_sizes(verify);
  add_common(verify);

  auto* train = app.add_subcommand("train", "federated training against a centralized reference");
  add_common(train);
  train->add_option("--data", cfg.dataset, "dataset CSV")->required();
  train->add_option("--protocol", protocol, "linr, caesar or nn")->capture_default_str();
  train->add_option("--epochs", cfg.training.epochs)->capture_default_str();
  train->add_option("--batch", cfg.training.batch_size)->capture_default_str();
  train->add_option("--lr", cfg.training.lr)->capture_default_str();
  train->add_option("--backend", backend, "semantic")->capture_default_str();

  auto* gen = app.add_subcommand("gen-dataset", "write a synthetic two-party dataset");
  add_common(gen);
  gen->add_option("--rows", cfg.generation.rows)->capture_default_str();
  gen->add_option("--features-a", cfg.generation.features_a)->capture_default_str();
  gen->add_option("--features-b", cfg.generation.features_b)->capture_default_str();
  gen->add_option("--kind", kind, "linear or logistic")->capture_default_str();
  gen->add_option("--noise", cfg.generation.noise)->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    cfg.backend = cli::backend_from_string(backend);
    if (bench->parsed()) {
      cfg.command = "bench-matmult";
      cfg.methods = parse_methods(methods, bench->count("--method") > 0);
      const auto r = cli::cmd_bench_matmult(cfg);
      emit(r, cfg.out);
      print_failures(r);
      return r.pass() ? 0 : 1;
    }
    if (verify->parsed()) {
      cfg.command = "verify-complexity";
      cfg.methods = parse_methods(methods, verify->count("--method") > 0);
      const auto r = cli::cmd_verify_complexity(cfg);
      emit(r, cfg.out);
      print_failures(r);
      std::cerr << r.rows.size() << " cases, " << (r.pass() ? "all pass" : "mismatches found") << '\n';
      return r.pass() ? 0 : 1;
    }
    if (train->parsed()) {
      cfg.command = "train";
      cfg.training.protocol = protocol_from_string(protocol);
      cfg.training.preset = cfg.preset;
      cfg.training.seed = cfg.seed;
      const auto r = cli::cmd_train(cfg);
      emit(r.report, cfg.out);
      std::cerr << "iterations " << r.report.iterations << ", bytes " << r.report.comm.total_bytes()
                << ", modeled seconds " << r.report.comm.modeled_seconds << '\n';
      if (!r.pass) std::cerr << "FAIL loss differs from the centralized reference beyond tolerance\n";
      return r.pass ? 0 : 1;
    }
    cfg.command = "gen-dataset";
    cfg.generation.kind = ground_truth_from_string(kind);
    cfg.generation.seed = cfg.seed;
    for (const auto& path : cli::cmd_gen_dataset(cfg)) std::cout << path << '\n';
    return 0;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
