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

#include "hevfl/dataset.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "hevfl/error.hpp"

namespace hevfl {

namespace {

std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

Eigen::VectorXd from_std(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

std::string to_string(GroundTruthKind kind) { return kind == GroundTruthKind::kLinear ? "linear" : "logistic"; }

GroundTruthKind ground_truth_from_string(const std::string& name) {
  if (name == "linear") return GroundTruthKind::kLinear;
  if (name == "logistic") return GroundTruthKind::kLogistic;
  throw Error(ErrorCode::kConfigInvalid, "unknown ground truth '" + name + "' (linear, logistic)");
}

std::pair<Dataset, GroundTruth> generate_dataset(const DatasetSpec& spec) {
  if (spec.rows == 0 || spec.features_a == 0 || spec.features_b == 0) {
    throw Error(ErrorCode::kConfigInvalid, "dataset sizes must be positive");
  }
  if (!(spec.noise >= 0.0)) throw Error(ErrorCode::kConfigInvalid, "noise must be non-negative");
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> feature(-1.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  const auto rows = static_cast<Eigen::Index>(spec.rows);
  GroundTruth truth{spec.kind, Eigen::VectorXd(static_cast<Eigen::Index>(spec.features_a)),
                    Eigen::VectorXd(static_cast<Eigen::Index>(spec.features_b))};
  for (Eigen::Index i = 0; i < truth.w_a.size(); ++i) truth.w_a(i) = normal(rng);
  for (Eigen::Index i = 0; i < truth.w_b.size(); ++i) truth.w_b(i) = normal(rng);
  Dataset d{Eigen::MatrixXd(rows, truth.w_a.size()), Eigen::MatrixXd(rows, truth.w_b.size()), Eigen::VectorXd(rows)};
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index j = 0; j < d.xa.cols(); ++j) d.xa(r, j) = feature(rng);
    for (Eigen::Index j = 0; j < d.xb.cols(); ++j) d.xb(r, j) = feature(rng);
    const double z = d.xa.row(r).dot(truth.w_a) + d.xb.row(r).dot(truth.w_b) + spec.noise * normal(rng);
    if (spec.kind == GroundTruthKind::kLinear) {
      d.y(r) = z;
    } else {
      d.y(r) = coin(rng) < 1.0 / (1.0 + std::exp(-z)) ? 1.0 : 0.0;
    }
  }
  return {std::move(d), std::move(truth)};
}

std::string weights_path(const std::string& csv_path) { return csv_path + ".weights.json"; }

void write_dataset(const std::string& path, const Dataset& data, const GroundTruth& truth) {
  std::ofstream os(path);
  if (!os) throw Error(ErrorCode::kIoFailure, "cannot write " + path);
  os << "id";
  for (Eigen::Index j = 0; j < data.xa.cols(); ++j) os << ",a_" << j;
  for (Eigen::Index j = 0; j < data.xb.cols(); ++j) os << ",b_" << j;
  os << ",label\n";
  os.precision(17);
  for (Eigen::Index r = 0; r < data.y.size(); ++r) {
    os << r;
    for (Eigen::Index j = 0; j < data.xa.cols(); ++j) os << ',' << data.xa(r, j);
    for (Eigen::Index j = 0; j < data.xb.cols(); ++j) os << ',' << data.xb(r, j);
    os << ',' << data.y(r) << '\n';
  }
  if (!os) throw Error(ErrorCode::kIoFailure, "failed while writing " + path);

  nlohmann::ordered_json j;
  j["kind"] = to_string(truth.kind);
  j["w_a"] = to_std(truth.w_a);
  j["w_b"] = to_std(truth.w_b);
  std::ofstream ws(weights_path(path));
  if (!ws) throw Error(ErrorCode::kIoFailure, "cannot write " + weights_path(path));
  ws << j.dump(2) << '\n';
  if (!ws) throw Error(ErrorCode::kIoFailure, "failed while writing " + weights_path(path));
}

Dataset read_dataset(const std::string& path) {
  if (!std::filesystem::exists(path)) throw Error(ErrorCode::kDatasetMissing, "no dataset at " + path);
  std::ifstream is(path);
  if (!is) throw Error(ErrorCode::kIoFailure, "cannot open " + path);
  std::string line;
  if (!std::getline(is, line)) throw Error(ErrorCode::kIoFailure, path + " is empty");
  std::size_t na = 0, nb = 0, cols = 0;
  {
    std::stringstream ss(line);
    std::string name;
    std::vector<std::string> names;
    while (std::getline(ss, name, ',')) names.push_back(name);
    if (names.size() < 4 || names.front() != "id" || names.back() != "label") {
      throw Error(ErrorCode::kIoFailure, "header must be id,a_*,b_*,label");
    }
    for (std::size_t i = 1; i + 1 < names.size(); ++i) {
      const bool is_a = names[i].rfind("a_", 0) == 0, is_b = names[i].rfind("b_", 0) == 0;
      if (is_a && nb == 0) {
        ++na;
      } else if (is_b) {
        ++nb;
      } else {
        throw Error(ErrorCode::kIoFailure, "unexpected column '" + names[i] + "'");
      }
    }
    if (na == 0 || nb == 0) throw Error(ErrorCode::kIoFailure, "both parties need at least one feature");
    cols = names.size();
  }
  std::vector<std::vector<double>> rows;
  std::size_t line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<double> vals;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        vals.push_back(std::stod(cell, &used));
        if (used != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw Error(ErrorCode::kIoFailure, path + ":" + std::to_string(line_no) + ": bad number '" + cell + "'");
      }
    }
    if (vals.size() != cols) {
      throw Error(ErrorCode::kIoFailure, path + ":" + std::to_string(line_no) + ": expected " +
                                             std::to_string(cols) + " fields");
    }
    rows.push_back(std::move(vals));
  }
  const auto n = static_cast<Eigen::Index>(rows.size());
  Dataset d{Eigen::MatrixXd(n, static_cast<Eigen::Index>(na)), Eigen::MatrixXd(n, static_cast<Eigen::Index>(nb)),
            Eigen::VectorXd(n)};
  for (Eigen::Index r = 0; r < n; ++r) {
    const auto& v = rows[static_cast<std::size_t>(r)];
    for (std::size_t j = 0; j < na; ++j) d.xa(r, static_cast<Eigen::Index>(j)) = v[1 + j];
    for (std::size_t j = 0; j < nb; ++j) d.xb(r, static_cast<Eigen::Index>(j)) = v[1 + na + j];
    d.y(r) = v.back();
  }
  return d;
}

GroundTruth read_ground_truth(const std::string& csv_path) {
  const std::string p = weights_path(csv_path);
  if (!std::filesystem::exists(p)) throw Error(ErrorCode::kDatasetMissing, "no weights at " + p);
  std::ifstream is(p);
  try {
    const auto j = nlohmann::json::parse(is);
    return GroundTruth{ground_truth_from_string(j.at("kind").get<std::string>()),
                       from_std(j.at("w_a").get<std::vector<double>>()),
                       from_std(j.at("w_b").get<std::vector<double>>())};
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kIoFailure, p + ": " + e.what());
  }
}

}  // namespace hevfl
