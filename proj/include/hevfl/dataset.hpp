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

#include <Eigen/Dense>
#include <cstdint>
#include <string>

namespace hevfl {

enum class GroundTruthKind { kLinear, kLogistic };

struct DatasetSpec {
  std::size_t rows = 512;
  std::size_t features_a = 4;
  std::size_t features_b = 4;
  GroundTruthKind kind = GroundTruthKind::kLinear;
  double noise = 0.1;
  std::uint64_t seed = 1;
};

// Party A holds the a_* columns, party B the b_* columns and the label.
struct Dataset {
  Eigen::MatrixXd xa, xb;
  Eigen::VectorXd y;
  std::size_t rows() const { return static_cast<std::size_t>(y.size()); }
};

struct GroundTruth {
  GroundTruthKind kind = GroundTruthKind::kLinear;
  Eigen::VectorXd w_a, w_b;
};

// Features uniform in [-1, 1], weights standard normal. Linear labels are
// x.w + noise * N(0, 1); logistic labels are Bernoulli(sigmoid(x.w + noise * N(0, 1))).
// Throws ConfigInvalid for empty sizes or negative noise.
std::pair<Dataset, GroundTruth> generate_dataset(const DatasetSpec& spec);

// CSV "id,a_0..,b_0..,label" at `path`, weights as JSON at weights_path(path).
// Throws IoFailure when a file cannot be written.
void write_dataset(const std::string& path, const Dataset& data, const GroundTruth& truth);
std::string weights_path(const std::string& csv_path);

// Throws DatasetMissing when the file does not exist and IoFailure when it is malformed.
Dataset read_dataset(const std::string& path);
GroundTruth read_ground_truth(const std::string& csv_path);

std::string to_string(GroundTruthKind kind);
GroundTruthKind ground_truth_from_string(const std::string& name);

}  // namespace hevfl
