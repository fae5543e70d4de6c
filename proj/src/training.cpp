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

#include "hevfl/training.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "hevfl/error.hpp"
#include "hevfl/presets.hpp"
#include "hevfl/protocols/linr.hpp"
#include "hevfl/protocols/nn.hpp"
#include "hevfl/simd/semantic_backend.hpp"

namespace hevfl {

namespace {

using protocols::Index;
using protocols::Mat;
using protocols::Vec;

double mse_loss(const Vec& pred, const Vec& y) { return 0.5 * (pred - y).squaredNorm() / static_cast<double>(y.size()); }

double bce_loss(const Vec& logits, const Vec& y) {
  double s = 0.0;
  for (Index i = 0; i < y.size(); ++i) {
    const double p = std::clamp(protocols::sigmoid(logits(i)), 1e-12, 1.0 - 1e-12);
    s -= y(i) * std::log(p) + (1.0 - y(i)) * std::log(1.0 - p);
  }
  return s / static_cast<double>(y.size());
}

bool binary_labels(const Vec& y) {
  return std::all_of(y.data(), y.data() + y.size(), [](double v) { return v == 0.0 || v == 1.0; });
}

Mat joined(const Dataset& d) {
  Mat x(d.xa.rows(), d.xa.cols() + d.xb.cols());
  x << d.xa, d.xb;
  return x;
}

Mat random_matrix(Index rows, Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> dist(0.0, 1.0 / std::sqrt(static_cast<double>(rows)));
  Mat m(rows, cols);
  for (Index i = 0; i < m.size(); ++i) m.data()[i] = dist(rng);
  return m;
}

struct NnWeights {
  Mat u_a, u_b, w_a, w_b;
  Vec v;
  double c = 0.0;

  Vec logits(const Mat& xa, const Mat& xb) const {
    const Mat aa = (xa * u_a).array().tanh().matrix();
    const Mat ab = (xb * u_b).array().tanh().matrix();
    const Mat h = (aa * w_a + ab * w_b).array().tanh().matrix();
    return (h * v).array() + c;
  }

  // Plain SGD step on one batch with the mean cross-entropy loss.
  void step(const Mat& xa, const Mat& xb, const Vec& y, double lr) {
    const double m = static_cast<double>(y.size());
    const Mat aa = (xa * u_a).array().tanh().matrix();
    const Mat ab = (xb * u_b).array().tanh().matrix();
    const Mat h = (aa * w_a + ab * w_b).array().tanh().matrix();
    const Vec o = (h * v).array() + c;
    Vec d_o(o.size());
    for (Index i = 0; i < o.size(); ++i) d_o(i) = (protocols::sigmoid(o(i)) - y(i)) / m;
    const Mat d_z = ((d_o * v.transpose()).array() * (1.0 - h.array().square())).matrix();
    const Mat d_aa = ((d_z * w_a.transpose()).array() * (1.0 - aa.array().square())).matrix();
    const Mat d_ab = ((d_z * w_b.transpose()).array() * (1.0 - ab.array().square())).matrix();
    v -= lr * (h.transpose() * d_o);
    c -= lr * d_o.sum();
    w_a -= lr * (aa.transpose() * d_z);
    w_b -= lr * (ab.transpose() * d_z);
    u_a -= lr * (xa.transpose() * d_aa);
    u_b -= lr * (xb.transpose() * d_ab);
  }
};

void add_party(TrainingReport& r, const Measurement& m) { r.ops += m.ops; }

std::uint64_t derive(std::uint64_t seed, std::uint64_t tag) { return seed * 0x9E3779B97F4A7C15ULL + tag; }

TrainingReport train_linr(const Dataset& d, const TrainingConfig& cfg, const SchemeParams& p, netsim::Network& net) {
  SemanticBackend arbiter(p);
  protocols::LinrParty a{"A", d.xa, Vec::Zero(d.xa.cols()), std::nullopt, std::mt19937_64(derive(cfg.seed, 1))};
  protocols::LinrParty b{"B", d.xb, Vec::Zero(d.xb.cols()), d.y, std::mt19937_64(derive(cfg.seed, 2))};
  const Mat x = joined(d);
  Vec theta = Vec::Zero(x.cols());
  TrainingReport r;
  auto record = [&](std::size_t epoch) {
    r.epochs.push_back({epoch, mse_loss(d.xa * a.theta + d.xb * b.theta, d.y), mse_loss(x * theta, d.y), {}, {}});
  };
  record(0);
  for (std::size_t e = 1; e <= cfg.epochs; ++e) {
    for (const auto& batch : epoch_batches(d.rows(), cfg.batch_size, cfg.seed, e)) {
      const auto st = protocols::vfl_linr_iteration(arbiter, net, a, b, batch, cfg.lr);
      add_party(r, st.party_a);
      add_party(r, st.party_b);
      add_party(r, st.arbiter);
      ++r.iterations;
      const Mat xb = protocols::take_rows(x, batch);
      theta -= cfg.lr * xb.transpose() * (xb * theta - protocols::take_rows(d.y, batch)) / static_cast<double>(batch.size());
    }
    record(e);
  }
  return r;
}

TrainingReport train_caesar(const Dataset& d, const TrainingConfig& cfg, const SchemeParams& p, netsim::Network& net) {
  SemanticBackend keys_a(p), keys_b(p);
  protocols::CaesarParty a{"A", d.xa, std::nullopt, {}, {}, std::mt19937_64(derive(cfg.seed, 1))};
  protocols::CaesarParty b{"B", d.xb, d.y, {}, {}, std::mt19937_64(derive(cfg.seed, 2))};
  protocols::caesar_share_weights(p, net, a, Vec::Zero(d.xa.cols()), b, Vec::Zero(d.xb.cols()));
  std::mt19937_64 dealer(derive(cfg.seed, 3));
  const Mat x = joined(d);
  Vec w = Vec::Zero(x.cols());
  TrainingReport r;
  auto record = [&](std::size_t epoch) {
    const Vec fed = d.xa * protocols::caesar_weights(p, a, b) + d.xb * protocols::caesar_weights(p, b, a);
    const Vec cen = x * w;
    r.epochs.push_back({epoch, bce_loss(fed, d.y), bce_loss(cen, d.y), roc_auc(fed, d.y), roc_auc(cen, d.y)});
  };
  record(0);
  for (std::size_t e = 1; e <= cfg.epochs; ++e) {
    for (const auto& batch : epoch_batches(d.rows(), cfg.batch_size, cfg.seed, e)) {
      const auto st = protocols::caesar_iteration(keys_a, keys_b, net, a, b, batch, cfg.lr, cfg.poly, dealer,
                                                  cfg.fold_levels);
      add_party(r, st.party_a);
      add_party(r, st.party_b);
      add_party(r, st.forward.party_a);
      add_party(r, st.forward.party_b);
      ++r.iterations;
      const Mat xb = protocols::take_rows(x, batch);
      Vec err = (xb * w).unaryExpr([&](double z) { return cfg.poly(z); }) - protocols::take_rows(d.y, batch);
      w -= cfg.lr * xb.transpose() * err / static_cast<double>(batch.size());
    }
    record(e);
  }
  return r;
}

TrainingReport train_nn(const Dataset& d, const TrainingConfig& cfg, const SchemeParams& p, netsim::Network& net) {
  SemanticBackend keys_a(p);
  std::mt19937_64 init(derive(cfg.seed, 4));
  NnWeights ref;
  ref.u_a = random_matrix(d.xa.cols(), static_cast<Index>(cfg.hidden_a), init);
  ref.u_b = random_matrix(d.xb.cols(), static_cast<Index>(cfg.hidden_b), init);
  ref.w_a = random_matrix(static_cast<Index>(cfg.hidden_a), static_cast<Index>(cfg.interactive), init);
  ref.w_b = random_matrix(static_cast<Index>(cfg.hidden_b), static_cast<Index>(cfg.interactive), init);
  ref.v = random_matrix(static_cast<Index>(cfg.interactive), 1, init).col(0);
  protocols::NnPartyA a{"A", d.xa, ref.u_a, std::mt19937_64(derive(cfg.seed, 1)), {}};
  protocols::NnPartyB b{"B", d.xb, d.y, ref.u_b, ref.w_a, ref.w_b, ref.v, ref.c, std::mt19937_64(derive(cfg.seed, 2)),
                        {}, {}, {}, {}, {}, {}};
  TrainingReport r;
  auto record = [&](std::size_t epoch) {
    const NnWeights fed{a.u, b.u, b.w_a, b.w_b, b.v, b.c};
    const Vec lf = fed.logits(d.xa, d.xb), lc = ref.logits(d.xa, d.xb);
    r.epochs.push_back({epoch, bce_loss(lf, d.y), bce_loss(lc, d.y), roc_auc(lf, d.y), roc_auc(lc, d.y)});
  };
  record(0);
  for (std::size_t e = 1; e <= cfg.epochs; ++e) {
    for (const auto& batch : epoch_batches(d.rows(), cfg.batch_size, cfg.seed, e)) {
      const auto fw = protocols::vfl_nn_forward(keys_a, net, a, b, batch);
      const auto bw = protocols::vfl_nn_backward(keys_a, net, a, b, batch, cfg.lr);
      add_party(r, fw.party_a);
      add_party(r, fw.party_b);
      add_party(r, bw.party_a);
      add_party(r, bw.party_b);
      ++r.iterations;
      ref.step(protocols::take_rows(d.xa, batch), protocols::take_rows(d.xb, batch), protocols::take_rows(d.y, batch),
               cfg.lr);
    }
    record(e);
  }
  return r;
}

}  // namespace

std::string to_string(Protocol p) {
  switch (p) {
    case Protocol::kLinr: return "linr";
    case Protocol::kCaesar: return "caesar";
    case Protocol::kNn: return "nn";
  }
  return "?";
}

Protocol protocol_from_string(const std::string& name) {
  if (name == "linr") return Protocol::kLinr;
  if (name == "caesar") return Protocol::kCaesar;
  if (name == "nn") return Protocol::kNn;
  throw Error(ErrorCode::kConfigInvalid, "unknown protocol '" + name + "' (linr, caesar, nn)");
}

void TrainingConfig::validate() const {
  if (batch_size == 0) throw Error(ErrorCode::kConfigInvalid, "batch size must be positive");
  if (!(lr > 0.0) || !std::isfinite(lr)) throw Error(ErrorCode::kConfigInvalid, "learning rate must be positive");
  if (hidden_a == 0 || hidden_b == 0 || interactive == 0) {
    throw Error(ErrorCode::kConfigInvalid, "layer widths must be positive");
  }
  const Preset ps = hevfl::preset(this->preset);
  if (next_power_of_two(batch_size) > ps.ring_degree / 2) {
    throw Error(ErrorCode::kConfigInvalid, "batch size exceeds the slot count of preset " + ps.name);
  }
}

std::vector<std::vector<Index>> epoch_batches(std::size_t rows, std::size_t batch, std::uint64_t seed,
                                              std::size_t epoch) {
  std::vector<Index> order(rows);
  std::iota(order.begin(), order.end(), Index{0});
  std::mt19937_64 rng(seed + epoch);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::vector<Index>> out;
  for (std::size_t i = 0; i < rows; i += batch) {
    out.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(i),
                     order.begin() + static_cast<std::ptrdiff_t>(std::min(rows, i + batch)));
  }
  return out;
}

double roc_auc(const Vec& scores, const Vec& labels) {
  std::vector<Index> idx(static_cast<std::size_t>(scores.size()));
  std::iota(idx.begin(), idx.end(), Index{0});
  std::sort(idx.begin(), idx.end(), [&](Index a, Index b) { return scores(a) < scores(b); });
  // Mann-Whitney U with midranks for ties.
  double pos = 0.0, rank_sum = 0.0;
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j < idx.size() && scores(idx[j]) == scores(idx[i])) ++j;
    const double mid = 0.5 * static_cast<double>(i + j + 1);
    for (std::size_t k = i; k < j; ++k) {
      if (labels(idx[k]) == 1.0) {
        pos += 1.0;
        rank_sum += mid;
      }
    }
    i = j;
  }
  const double neg = static_cast<double>(idx.size()) - pos;
  if (pos == 0.0 || neg == 0.0) return 0.5;
  return (rank_sum - pos * (pos + 1.0) / 2.0) / (pos * neg);
}

TrainingReport train(const Dataset& data, const TrainingConfig& cfg) {
  cfg.validate();
  if (data.rows() == 0 || data.xa.rows() != data.xb.rows() || data.y.size() != data.xa.rows()) {
    throw Error(ErrorCode::kShapeMismatch, "dataset parts have different row counts");
  }
  if (cfg.protocol != Protocol::kLinr && !binary_labels(data.y)) {
    throw Error(ErrorCode::kShapeMismatch, to_string(cfg.protocol) + " needs 0/1 labels");
  }
  const Preset ps = preset(cfg.preset);
  const SchemeParams p = protocol_params(ps, ps.ring_degree / 2);
  netsim::Network net({}, cost_model_for(ps));
  TrainingReport r;
  switch (cfg.protocol) {
    case Protocol::kLinr: r = train_linr(data, cfg, p, net); break;
    case Protocol::kCaesar: r = train_caesar(data, cfg, p, net); break;
    case Protocol::kNn: r = train_nn(data, cfg, p, net); break;
  }
  r.protocol = cfg.protocol;
  r.comm = net.stats();
  return r;
}

}  // namespace hevfl
