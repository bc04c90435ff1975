// Copyright 2026 The qsfl Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "qsfl/error.hpp"
#include "qsfl/random.hpp"

namespace qsfl {

template <typename Scalar>
using RowMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Index = Eigen::Index;

// Parameters of a fully connected ReLU network, stored as one flat vector.
//
// Layout (also the flattening order used by weight-space clustering):
// layer 0 weight (out x in, row-major), layer 0 bias, layer 1 weight, ...
// Per-layer views are Eigen maps into the flat storage, so aggregation and
// distance computations operate on `values()` directly.
template <typename Scalar>
class ModelParams {
 public:
  using WeightMap = Eigen::Map<RowMatrix<Scalar>>;
  using ConstWeightMap = Eigen::Map<const RowMatrix<Scalar>>;
  using BiasMap = Eigen::Map<Vector<Scalar>>;
  using ConstBiasMap = Eigen::Map<const Vector<Scalar>>;

  ModelParams() = default;

  // Zero-initialized network; `sizes` = {input, hidden..., output}.
  explicit ModelParams(std::vector<Index> sizes) : sizes_(std::move(sizes)) {
    if (sizes_.size() < 2) throw ConfigError("model needs at least input and output sizes");
    Index total = 0;
    for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
      if (sizes_[l] < 1 || sizes_[l + 1] < 1) throw ConfigError("model layer sizes must be >= 1");
      offsets_.push_back(total);
      total += sizes_[l] * sizes_[l + 1] + sizes_[l + 1];
    }
    values_ = Vector<Scalar>::Zero(total);
  }

  // Glorot-uniform weights, zero biases.
  static ModelParams glorot(std::vector<Index> sizes, std::uint64_t seed) {
    ModelParams m(std::move(sizes));
    Rng rng(seed);
    for (Index l = 0; l < m.num_layers(); ++l) {
      const double bound = std::sqrt(6.0 / static_cast<double>(m.in_dim(l) + m.out_dim(l)));
      auto w = m.weight(l);
      for (Index i = 0; i < w.size(); ++i) {
        w.data()[i] = static_cast<Scalar>(bound * (2.0 * uniform01(rng) - 1.0));
      }
    }
    return m;
  }

  Index num_layers() const { return static_cast<Index>(offsets_.size()); }
  Index input_dim() const { return sizes_.front(); }
  Index output_dim() const { return sizes_.back(); }
  Index in_dim(Index l) const { return sizes_[l]; }
  Index out_dim(Index l) const { return sizes_[l + 1]; }
  const std::vector<Index>& sizes() const { return sizes_; }
  Index num_params() const { return values_.size(); }

  Vector<Scalar>& values() { return values_; }
  const Vector<Scalar>& values() const { return values_; }

  WeightMap weight(Index l) { return {values_.data() + offsets_[l], out_dim(l), in_dim(l)}; }
  ConstWeightMap weight(Index l) const {
    return {values_.data() + offsets_[l], out_dim(l), in_dim(l)};
  }
  BiasMap bias(Index l) {
    return {values_.data() + offsets_[l] + out_dim(l) * in_dim(l), out_dim(l)};
  }
  ConstBiasMap bias(Index l) const {
    return {values_.data() + offsets_[l] + out_dim(l) * in_dim(l), out_dim(l)};
  }

  bool same_shape(const ModelParams& other) const { return sizes_ == other.sizes_; }
  bool all_finite() const { return values_.allFinite(); }

  friend bool operator==(const ModelParams& a, const ModelParams& b) {
    return a.sizes_ == b.sizes_ && a.values_ == b.values_;
  }

 private:
  std::vector<Index> sizes_;
  std::vector<Index> offsets_;
  Vector<Scalar> values_;
};

// Features (one sample per row) with integer class labels.
template <typename Scalar>
struct LabeledData {
  RowMatrix<Scalar> features;
  std::vector<int> labels;

  Index size() const { return features.rows(); }
  bool empty() const { return features.rows() == 0; }
};

struct TrainConfig {
  int local_epochs = 10;
  double learning_rate = 0.05;
  int batch_size = 32;
  double prox_mu = 0.0;  // 0 disables the proximal term
  std::uint64_t rng_seed = 0;

  void validate() const {
    if (local_epochs < 1) throw ConfigError("local_epochs must be >= 1");
    if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
    if (!(learning_rate >= 0.0)) throw ConfigError("learning_rate must be >= 0");
    if (!(prox_mu >= 0.0)) throw ConfigError("prox_mu must be >= 0");
  }
};

template <typename Scalar>
struct LossAndGrad {
  Scalar loss;
  ModelParams<Scalar> grad;
};

namespace detail {

inline constexpr double kProbFloor = 1e-12;

template <typename Scalar>
void check_batch(const ModelParams<Scalar>& model, Index cols) {
  if (cols != model.input_dim()) {
    throw ConfigError("batch has " + std::to_string(cols) + " columns, model expects " +
                      std::to_string(model.input_dim()));
  }
}

template <typename Scalar>
void check_labels(const ModelParams<Scalar>& model, std::span<const int> labels, Index rows) {
  if (static_cast<Index>(labels.size()) != rows) {
    throw DataError("label count does not match batch rows");
  }
  for (int y : labels) {
    if (y < 0 || y >= model.output_dim()) {
      throw DataError("label " + std::to_string(y) + " outside [0, " +
                      std::to_string(model.output_dim()) + ")");
    }
  }
}

// Reusable activations for forward/backward passes.
template <typename Scalar>
struct Workspace {
  std::vector<RowMatrix<Scalar>> pre;   // Z_l
  std::vector<RowMatrix<Scalar>> post;  // A_l (ReLU outputs; last = logits)
  RowMatrix<Scalar> delta;
  RowMatrix<Scalar> delta_prev;
};

template <typename Scalar, typename Derived>
const RowMatrix<Scalar>& forward_into(const ModelParams<Scalar>& model,
                                      const Eigen::MatrixBase<Derived>& x,
                                      Workspace<Scalar>& ws) {
  const Index layers = model.num_layers();
  ws.pre.resize(layers);
  ws.post.resize(layers);
  for (Index l = 0; l < layers; ++l) {
    auto& z = ws.pre[l];
    if (l == 0) {
      z.noalias() = x * model.weight(l).transpose();
    } else {
      z.noalias() = ws.post[l - 1] * model.weight(l).transpose();
    }
    z.rowwise() += model.bias(l).transpose();
    if (l + 1 < layers) {
      ws.post[l] = z.cwiseMax(Scalar(0));
    } else {
      ws.post[l] = z;
    }
  }
  return ws.post.back();
}

// Row-wise softmax of `logits` written to `probs`; returns summed -log p_y.
template <typename Scalar>
Scalar softmax_xent(const RowMatrix<Scalar>& logits, std::span<const int> labels,
                    RowMatrix<Scalar>* probs) {
  Scalar total = 0;
  const Index n = logits.rows();
  const Index c = logits.cols();
  if (probs) probs->resize(n, c);
  for (Index i = 0; i < n; ++i) {
    const Scalar mx = logits.row(i).maxCoeff();
    Scalar sum = 0;
    for (Index j = 0; j < c; ++j) sum += std::exp(logits(i, j) - mx);
    const Scalar py = std::exp(logits(i, labels[i]) - mx) / sum;
    total -= std::log(std::max(py, static_cast<Scalar>(kProbFloor)));
    if (probs) {
      for (Index j = 0; j < c; ++j) (*probs)(i, j) = std::exp(logits(i, j) - mx) / sum;
    }
  }
  return total;
}

// Mean cross-entropy (+ proximal penalty) and its gradient, written to `grad`.
template <typename Scalar, typename Derived>
Scalar backprop_into(const ModelParams<Scalar>& model, const Eigen::MatrixBase<Derived>& x,
                     std::span<const int> labels, const ModelParams<Scalar>* anchor,
                     Scalar prox_mu, ModelParams<Scalar>& grad, Workspace<Scalar>& ws) {
  const Index n = x.rows();
  const Index layers = model.num_layers();
  forward_into(model, x, ws);
  Scalar loss = softmax_xent<Scalar>(ws.post.back(), labels, &ws.delta) / Scalar(n);
  for (Index i = 0; i < n; ++i) ws.delta(i, labels[i]) -= Scalar(1);
  ws.delta /= Scalar(n);

  for (Index l = layers - 1; l >= 0; --l) {
    if (l == 0) {
      grad.weight(l).noalias() = ws.delta.transpose() * x;
    } else {
      grad.weight(l).noalias() = ws.delta.transpose() * ws.post[l - 1];
    }
    grad.bias(l) = ws.delta.colwise().sum().transpose();
    if (l > 0) {
      ws.delta_prev.noalias() = ws.delta * model.weight(l);
      ws.delta = ws.delta_prev.cwiseProduct(
          (ws.pre[l - 1].array() > Scalar(0)).template cast<Scalar>().matrix());
    }
  }
  if (prox_mu > Scalar(0)) {
    const auto diff = (model.values() - anchor->values()).eval();
    loss += Scalar(0.5) * prox_mu * diff.squaredNorm();
    grad.values() += prox_mu * diff;
  }
  return loss;
}

}  // namespace detail

// Logits for a batch (one sample per row). Hidden layers use ReLU.
template <typename Scalar, typename Derived>
RowMatrix<Scalar> forward(const ModelParams<Scalar>& model, const Eigen::MatrixBase<Derived>& batch) {
  detail::check_batch(model, batch.cols());
  detail::Workspace<Scalar> ws;
  return detail::forward_into(model, batch, ws);
}

// Mean cross-entropy over the batch, plus (mu/2)*||model - anchor||^2 when
// prox_mu > 0. The anchor is required exactly when the penalty is active.
template <typename Scalar, typename Derived>
LossAndGrad<Scalar> loss_and_grad(const ModelParams<Scalar>& model,
                                  const Eigen::MatrixBase<Derived>& batch,
                                  std::span<const int> labels,
                                  const ModelParams<Scalar>* anchor = nullptr,
                                  Scalar prox_mu = Scalar(0)) {
  detail::check_batch(model, batch.cols());
  detail::check_labels(model, labels, batch.rows());
  if (batch.rows() == 0) throw DataError("empty batch");
  if (prox_mu > Scalar(0)) {
    if (anchor == nullptr) throw ConfigError("prox_mu > 0 requires an anchor model");
    if (!anchor->same_shape(model)) throw ConfigError("anchor shape differs from model");
  }
  LossAndGrad<Scalar> out{Scalar(0), ModelParams<Scalar>(model.sizes())};
  detail::Workspace<Scalar> ws;
  out.loss = detail::backprop_into(model, batch, labels, anchor, prox_mu, out.grad, ws);
  return out;
}

// Mean cross-entropy of `model` on a labeled set, evaluated in chunks.
template <typename Scalar>
Scalar mean_loss(const ModelParams<Scalar>& model, const LabeledData<Scalar>& data,
                 Index chunk = 512) {
  detail::check_batch(model, data.features.cols());
  detail::check_labels(model, data.labels, data.size());
  if (data.empty()) throw DataError("mean_loss on empty data");
  detail::Workspace<Scalar> ws;
  Scalar total = 0;
  for (Index start = 0; start < data.size(); start += chunk) {
    const Index rows = std::min(chunk, data.size() - start);
    const auto& logits = detail::forward_into(model, data.features.middleRows(start, rows), ws);
    total += detail::softmax_xent<Scalar>(
        logits, std::span<const int>(data.labels).subspan(start, rows), nullptr);
  }
  return total / Scalar(data.size());
}

// Fraction of samples whose argmax logit equals the label. Ties go to the
// lowest class index.
template <typename Scalar, typename Derived>
double evaluate(const ModelParams<Scalar>& model, const Eigen::MatrixBase<Derived>& features,
                std::span<const int> labels, Index chunk = 512) {
  detail::check_batch(model, features.cols());
  if (static_cast<Index>(labels.size()) != features.rows()) {
    throw DataError("label count does not match feature rows");
  }
  if (features.rows() == 0) throw DataError("evaluate on empty test set");
  detail::Workspace<Scalar> ws;
  Index correct = 0;
  for (Index start = 0; start < features.rows(); start += chunk) {
    const Index rows = std::min(chunk, features.rows() - start);
    const auto& logits = detail::forward_into(model, features.middleRows(start, rows), ws);
    for (Index i = 0; i < rows; ++i) {
      Index best = 0;
      for (Index j = 1; j < logits.cols(); ++j) {
        if (logits(i, j) > logits(i, best)) best = j;
      }
      if (best == labels[start + i]) ++correct;
    }
  }
  return static_cast<double>(correct) / static_cast<double>(features.rows());
}

template <typename Scalar>
double evaluate(const ModelParams<Scalar>& model, const LabeledData<Scalar>& data) {
  return evaluate(model, data.features, data.labels);
}

// Mini-batch SGD for cfg.local_epochs passes over `data`, starting from a copy
// of `model`. The sample order is reshuffled every epoch from one stream
// seeded with cfg.rng_seed. When prox_mu > 0 the proximal anchor is the input
// model (the broadcast model in FedProx).
template <typename Scalar>
ModelParams<Scalar> train_local(const ModelParams<Scalar>& model, const LabeledData<Scalar>& data,
                                const TrainConfig& cfg) {
  cfg.validate();
  if (data.empty()) throw DataError("train_local on an empty shard");
  detail::check_batch(model, data.features.cols());
  detail::check_labels(model, data.labels, data.size());

  ModelParams<Scalar> w = model;
  ModelParams<Scalar> grad(model.sizes());
  detail::Workspace<Scalar> ws;
  const Index n = data.size();
  const Index bs = std::min<Index>(cfg.batch_size, n);
  const Scalar lr = static_cast<Scalar>(cfg.learning_rate);
  const Scalar mu = static_cast<Scalar>(cfg.prox_mu);
  const ModelParams<Scalar>* anchor = mu > Scalar(0) ? &model : nullptr;

  std::vector<Index> order(n);
  for (Index i = 0; i < n; ++i) order[i] = i;
  Rng rng(cfg.rng_seed);
  RowMatrix<Scalar> xb;
  std::vector<int> yb;
  for (int epoch = 0; epoch < cfg.local_epochs; ++epoch) {
    shuffle(order, rng);
    for (Index start = 0; start < n; start += bs) {
      const Index rows = std::min(bs, n - start);
      xb.resize(rows, data.features.cols());
      yb.resize(rows);
      for (Index r = 0; r < rows; ++r) {
        xb.row(r) = data.features.row(order[start + r]);
        yb[r] = data.labels[order[start + r]];
      }
      detail::backprop_into(w, xb, std::span<const int>(yb), anchor, mu, grad, ws);
      w.values() -= lr * grad.values();
    }
  }
  return w;
}

using Model = ModelParams<double>;
using Data = LabeledData<double>;

}  // namespace qsfl
