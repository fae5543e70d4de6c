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

#include "hevfl/protocols/common.hpp"

#include <cmath>
#include <exception>
#include <thread>

#include "hevfl/error.hpp"
#include "hevfl/matmult/encode.hpp"

namespace hevfl::protocols {

void run_parties(netsim::Network& net, std::vector<std::function<void()>> parties) {
  std::vector<std::exception_ptr> errors(parties.size());
  {
    std::vector<std::jthread> threads;
    threads.reserve(parties.size());
    for (std::size_t i = 0; i < parties.size(); ++i) {
      threads.emplace_back([&, i] {
        try {
          parties[i]();
        } catch (...) {
          errors[i] = std::current_exception();
          net.close();
        }
      });
    }
  }
  // Prefer the root cause over the ChannelClosed errors it triggers in peers.
  std::exception_ptr closed;
  for (auto& e : errors) {
    if (!e) continue;
    try {
      std::rethrow_exception(e);
    } catch (const Error& err) {
      if (err.code() != ErrorCode::kChannelClosed) throw;
      closed = e;
    }
  }
  if (closed) std::rethrow_exception(closed);
}

std::vector<u64> uniform_vector(std::size_t n, u64 t, std::mt19937_64& rng) {
  std::uniform_int_distribution<u64> d(0, t - 1);
  std::vector<u64> out(n);
  for (auto& v : out) v = d(rng);
  return out;
}

std::vector<u64> to_residues(const Vec& v, const SchemeParams& p, int exp) {
  std::vector<u64> out(static_cast<std::size_t>(v.size()));
  for (Index i = 0; i < v.size(); ++i) {
    out[static_cast<std::size_t>(i)] = reduce_signed(to_fixed(v[i], p, exp), p.plain_modulus);
  }
  return out;
}

Vec to_real(std::span<const u64> r, const SchemeParams& p, int exp) {
  Vec out(static_cast<Index>(r.size()));
  for (std::size_t i = 0; i < r.size(); ++i) {
    out[static_cast<Index>(i)] = from_fixed(centered(r[i], p.plain_modulus), p, exp);
  }
  return out;
}

Eigen::Matrix<i64, Eigen::Dynamic, Eigen::Dynamic> to_fixed_matrix(const Mat& x, const SchemeParams& p, int exp) {
  Eigen::Matrix<i64, Eigen::Dynamic, Eigen::Dynamic> out(x.rows(), x.cols());
  for (Index i = 0; i < x.rows(); ++i) {
    for (Index j = 0; j < x.cols(); ++j) out(i, j) = to_fixed(x(i, j), p, exp);
  }
  return out;
}

Mat take_rows(const Mat& x, std::span<const Index> rows) {
  Mat out(static_cast<Index>(rows.size()), x.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Index>(i)) = x.row(rows[i]);
  return out;
}

Vec take_rows(const Vec& v, std::span<const Index> rows) {
  Vec out(static_cast<Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) out[static_cast<Index>(i)] = v[rows[i]];
  return out;
}

matmult::VectorLayout packvfl_layout(std::size_t cols, const SchemeParams& p) {
  const Eigen::Matrix<i64, Eigen::Dynamic, Eigen::Dynamic> probe =
      Eigen::Matrix<i64, Eigen::Dynamic, Eigen::Dynamic>::Zero(1, static_cast<Index>(cols));
  return matmult::required_layout(matmult::encode_for(matmult::Method::kPackVfl, probe, p));
}

void send_cts(netsim::Network& net, const std::string& from, const std::string& to, const std::string& label,
              std::vector<CiphertextHandle> cts) {
  netsim::Message m;
  m.sender = from;
  m.receiver = to;
  m.kind = MessageKind::kRlweCt;
  m.label = label;
  m.cts = std::move(cts);
  net.send(std::move(m));
}

void send_values(netsim::Network& net, const std::string& from, const std::string& to, const std::string& label,
                 std::vector<u64> values) {
  netsim::Message m;
  m.sender = from;
  m.receiver = to;
  m.kind = MessageKind::kCleartext;
  m.label = label;
  m.values = std::move(values);
  net.send(std::move(m));
}

netsim::Message expect(netsim::Network& net, const std::string& me, const std::string& from,
                       const std::string& label) {
  netsim::Message m = net.recv(me, from);
  if (m.label != label) {
    throw Error(ErrorCode::kShapeMismatch, me + " expected '" + label + "' from " + from + ", got '" + m.label + "'");
  }
  return m;
}

std::vector<CiphertextHandle> subtract_masks(const Backend& be, const std::vector<CiphertextHandle>& cts,
                                             std::vector<std::vector<u64>>& masks, std::mt19937_64& rng) {
  const u64 t = be.params().plain_modulus;
  masks.clear();
  std::vector<CiphertextHandle> out;
  for (const auto& c : cts) {
    masks.push_back(uniform_vector(be.slot_count(), t, rng));
    out.push_back(be.sub_plain(c, from_residues(masks.back(), be.params(), c.scale_exponent)));
  }
  return out;
}

}  // namespace hevfl::protocols
