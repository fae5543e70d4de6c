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

#include <optional>
#include <string>
#include <vector>

#include "hevfl/dataset.hpp"
#include "hevfl/protocols/caesar.hpp"
#include "hevfl/simd/metering.hpp"

namespace hevfl {

enum class Protocol { kLinr, kCaesar, kNn };

std::string to_string(Protocol p);
Protocol protocol_from_string(const std::string& name);

struct TrainingConfig {
  Protocol protocol = Protocol::kLinr;
  std::size_t batch_size = 64;
  std::size_t epochs = 10;
  double lr = 0.1;
  std::string preset = "desk-1024";
  std::uint64_t seed = 1;
  // VFL-NN widths: bottom models of A and B, interactive layer.
  std::size_t hidden_a = 4;
  std::size_t hidden_b = 4;
  std::size_t interactive = 4;
  protocols::SigmoidPoly poly;
  bool fold_levels = true;  // CAESAR gradient in the one-level form

  // Throws ConfigInvalid with the offending field.
  void validate() const;
};

struct EpochRecord {
  std::size_t epoch = 0;  // 0 is the initial model
  double loss = 0.0;
  double loss_central = 0.0;
  std::optional<double> auc;  // classification protocols only
  std::optional<double> auc_central;
};

struct TrainingReport {
  Protocol protocol = Protocol::kLinr;
  std::vector<EpochRecord> epochs;
  std::size_t iterations = 0;
  OpCounter ops;  // every party, whole run
  CommStats comm;
};

// Runs the federated protocol and a centralized cleartext reference with the
// same initialization and batches, evaluating both on the full data after
// every epoch. Throws ShapeMismatch when the data does not suit the protocol.
TrainingReport train(const Dataset& data, const TrainingConfig& cfg);

// Rows of every batch in one epoch: a permutation seeded by seed + epoch.
std::vector<std::vector<Eigen::Index>> epoch_batches(std::size_t rows, std::size_t batch, std::uint64_t seed,
                                                     std::size_t epoch);

// Area under the ROC curve with ties counted half. Labels are 0/1.
double roc_auc(const Eigen::VectorXd& scores, const Eigen::VectorXd& labels);

}  // namespace hevfl
