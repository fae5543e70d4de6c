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
#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "hevfl/matmult/types.hpp"
#include "hevfl/netsim/netsim.hpp"
#include "hevfl/simd/backend.hpp"

namespace hevfl::protocols {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using Index = Eigen::Index;

// Runs each party on its own thread. The first failure closes the network so
// blocked peers wake up, and is rethrown once every thread has finished.
void run_parties(netsim::Network& net, std::vector<std::function<void()>> parties);

std::vector<u64> uniform_vector(std::size_t n, u64 t, std::mt19937_64& rng);

// Fixed-point residues of v at Δ^exp, and back.
std::vector<u64> to_residues(const Vec& v, const SchemeParams& p, int exp);
Vec to_real(std::span<const u64> r, const SchemeParams& p, int exp);

// Fixed-point matrix as signed integers at Δ^exp.
Eigen::Matrix<i64, Eigen::Dynamic, Eigen::Dynamic> to_fixed_matrix(const Mat& x, const SchemeParams& p, int exp);

Mat take_rows(const Mat& x, std::span<const Index> rows);
Vec take_rows(const Vec& v, std::span<const Index> rows);

// Vector layout a kPackVfl product with `cols` columns expects.
matmult::VectorLayout packvfl_layout(std::size_t cols, const SchemeParams& p);

// Message helpers; every payload goes through the network for accounting.
void send_cts(netsim::Network& net, const std::string& from, const std::string& to, const std::string& label,
              std::vector<CiphertextHandle> cts);
void send_values(netsim::Network& net, const std::string& from, const std::string& to, const std::string& label,
                 std::vector<u64> values);
netsim::Message expect(netsim::Network& net, const std::string& me, const std::string& from,
                       const std::string& label);

// Mask every slot of every ciphertext with fresh uniform values: returns the
// masked ciphertexts (ct - r) and the masks.
std::vector<CiphertextHandle> subtract_masks(const Backend& be, const std::vector<CiphertextHandle>& cts,
                                             std::vector<std::vector<u64>>& masks, std::mt19937_64& rng);

}  // namespace hevfl::protocols
