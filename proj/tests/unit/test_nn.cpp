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

#include <cmath>
#include <sstream>

#include <doctest.h>

#include "qsfl/nn/mlp.hpp"
#include "qsfl/nn/serialize.hpp"

using namespace qsfl;

namespace {

Model random_model(std::vector<Index> sizes, std::uint64_t seed) {
  Model m = Model::glorot(sizes, seed);
  Rng rng(seed + 1);
  for (Index k = 0; k < m.num_params(); ++k) m.values()[k] += 0.2 * (uniform01(rng) - 0.5);
  return m;
}

RowMatrix<double> random_batch(Index rows, Index cols, std::uint64_t seed) {
  Rng rng(seed);
  RowMatrix<double> x(rows, cols);
  for (Index i = 0; i < x.size(); ++i) x.data()[i] = uniform01(rng) * 2.0 - 1.0;
  return x;
}

// Plain loops, no Eigen expressions: logits of a ReLU MLP.
std::vector<std::vector<double>> loop_forward(const Model& m, const RowMatrix<double>& x) {
  std::vector<std::vector<double>> out;
  for (Index r = 0; r < x.rows(); ++r) {
    std::vector<double> a(x.cols());
    for (Index c = 0; c < x.cols(); ++c) a[c] = x(r, c);
    for (Index l = 0; l < m.num_layers(); ++l) {
      const auto w = m.weight(l);
      const auto b = m.bias(l);
      std::vector<double> z(w.rows());
      for (Index o = 0; o < w.rows(); ++o) {
        double s = b[o];
        for (Index i = 0; i < w.cols(); ++i) s += w(o, i) * a[i];
        z[o] = (l + 1 < m.num_layers()) ? std::max(0.0, s) : s;
      }
      a = z;
    }
    out.push_back(a);
  }
  return out;
}

}  // namespace

TEST_CASE("forward: zero model gives zero logits") {
  const Model m(std::vector<Index>{5, 4, 3});
  const auto z = forward(m, random_batch(7, 5, 1));
  CHECK(z.rows() == 7);
  CHECK(z.cols() == 3);
  CHECK(z.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("forward: 1-1-1 identity chain") {
  Model m(std::vector<Index>{1, 1, 1});
  m.weight(0)(0, 0) = 1.0;
  m.weight(1)(0, 0) = 1.0;
  RowMatrix<double> x(1, 1);
  x(0, 0) = 2.0;
  CHECK(forward(m, x)(0, 0) == 2.0);
}

TEST_CASE("forward: 4-2-3 net matches loop oracle") {
  const Model m = random_model({4, 2, 3}, 7);
  const auto x = random_batch(1, 4, 8);
  const auto z = forward(m, x);
  const auto ref = loop_forward(m, x);
  for (Index c = 0; c < 3; ++c) CHECK(z(0, c) == doctest::Approx(ref[0][c]).epsilon(1e-12));
}

TEST_CASE("forward: wrong column count is a config error") {
  const Model m(std::vector<Index>{4, 2, 3});
  CHECK_THROWS_AS(forward(m, random_batch(2, 5, 1)), ConfigError);
}

TEST_CASE("loss: uniform logits over 10 classes give ln 10") {
  const Model m(std::vector<Index>{3, 10});
  const std::vector<int> y{0, 4, 9};
  const auto lg = loss_and_grad(m, random_batch(3, 3, 2), y);
  CHECK(lg.loss == doctest::Approx(std::log(10.0)).epsilon(1e-12));
}

TEST_CASE("loss: label out of range is a data error") {
  const Model m(std::vector<Index>{3, 2});
  const std::vector<int> y{2};
  CHECK_THROWS_AS(loss_and_grad(m, random_batch(1, 3, 2), y), DataError);
}

TEST_CASE("loss: prox with anchor = model changes nothing") {
  const Model m = random_model({4, 3, 2}, 3);
  const auto x = random_batch(5, 4, 4);
  const std::vector<int> y{0, 1, 1, 0, 1};
  const auto plain = loss_and_grad(m, x, y);
  const auto prox = loss_and_grad(m, x, y, &m, 0.7);
  CHECK(plain.loss == prox.loss);
  CHECK(plain.grad == prox.grad);
}

TEST_CASE("loss: prox without anchor is a config error") {
  const Model m(std::vector<Index>{3, 2});
  const std::vector<int> y{0};
  CHECK_THROWS_AS(loss_and_grad(m, random_batch(1, 3, 2), y, static_cast<const Model*>(nullptr), 0.5), ConfigError);
}

TEST_CASE("gradient: prox term adds mu * (w - anchor)") {
  const Model m = random_model({4, 3, 2}, 11);
  const Model anchor = random_model({4, 3, 2}, 12);
  const auto x = random_batch(5, 4, 13);
  const std::vector<int> y{0, 1, 1, 0, 1};
  const double mu = 0.37;
  const auto g0 = loss_and_grad(m, x, y);
  const auto g1 = loss_and_grad(m, x, y, &anchor, mu);
  const Eigen::VectorXd expect = mu * (m.values() - anchor.values());
  CHECK(((g1.grad.values() - g0.grad.values()) - expect).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("gradient: 4-2-3 net matches central differences per entry") {
  const Model m = random_model({4, 2, 3}, 21);
  const auto x = random_batch(5, 4, 22);
  const std::vector<int> y{0, 2, 1, 1, 2};
  const auto g = loss_and_grad(m, x, y);
  const double h = 1e-5;
  for (Index k = 0; k < m.num_params(); ++k) {
    Model up = m, down = m;
    up.values()[k] += h;
    down.values()[k] -= h;
    const double fd = (loss_and_grad(up, x, y).loss - loss_and_grad(down, x, y).loss) / (2 * h);
    const double a = g.grad.values()[k];
    CHECK(std::fabs(a - fd) <= 1e-4 * std::max(1.0, std::fabs(fd)));
  }
}

TEST_CASE("gradient: one small full-batch step never raises the loss") {
  for (int t = 0; t < 50; ++t) {
    const Model m = random_model({6, 5, 3}, 100 + t);
    const auto x = random_batch(8, 6, 200 + t);
    std::vector<int> y(8);
    for (int i = 0; i < 8; ++i) y[i] = (i + t) % 3;
    const auto g = loss_and_grad(m, x, y);
    Model next = m;
    next.values() -= 1e-3 * g.grad.values();
    CHECK(loss_and_grad(next, x, y).loss <= g.loss);
  }
}

TEST_CASE("train_local: zero learning rate returns the input") {
  const Model m = random_model({4, 3, 2}, 5);
  Data d{random_batch(10, 4, 6), std::vector<int>(10, 1)};
  TrainConfig cfg;
  cfg.learning_rate = 0.0;
  cfg.local_epochs = 3;
  CHECK(train_local(m, d, cfg) == m);
}

TEST_CASE("train_local: one full-batch epoch equals w - lr * grad") {
  const Model m = random_model({3, 4, 2}, 9);
  Data d{random_batch(2, 3, 10), {0, 1}};
  TrainConfig cfg;
  cfg.local_epochs = 1;
  cfg.batch_size = 2;
  cfg.learning_rate = 0.1;
  const Model out = train_local(m, d, cfg);
  const auto g = loss_and_grad(m, d.features, d.labels);
  const Eigen::VectorXd expect = m.values() - 0.1 * g.grad.values();
  CHECK((out.values() - expect).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("train_local: deterministic, input untouched, empty shard rejected") {
  const Model m = random_model({4, 3, 2}, 5);
  const Model copy = m;
  Data d{random_batch(40, 4, 6), std::vector<int>(40, 0)};
  for (int i = 0; i < 40; i += 2) d.labels[i] = 1;
  TrainConfig cfg;
  cfg.local_epochs = 2;
  cfg.batch_size = 7;
  cfg.rng_seed = 99;
  CHECK(train_local(m, d, cfg) == train_local(m, d, cfg));
  CHECK(m == copy);
  Data empty{RowMatrix<double>(0, 4), {}};
  CHECK_THROWS_AS(train_local(m, empty, cfg), DataError);
}

TEST_CASE("evaluate: constant predictor and tie-break") {
  Model m(std::vector<Index>{2, 3});
  m.bias(0)[2] = 1.0;
  Data all2{random_batch(5, 2, 1), std::vector<int>(5, 2)};
  CHECK(evaluate(m, all2) == 1.0);

  const Model zero(std::vector<Index>{4, 10});
  Data balanced{random_batch(20, 4, 3), {}};
  for (int i = 0; i < 20; ++i) balanced.labels.push_back(i % 10);
  CHECK(evaluate(zero, balanced) == doctest::Approx(0.1));
}

TEST_CASE("evaluate: matches hand count of argmax hits") {
  const Model m = random_model({5, 4, 3}, 31);
  const auto x = random_batch(20, 5, 32);
  std::vector<int> y(20);
  for (int i = 0; i < 20; ++i) y[i] = (i * 7) % 3;
  const auto ref = loop_forward(m, x);
  int hits = 0;
  for (int i = 0; i < 20; ++i) {
    int best = 0;
    for (int c = 1; c < 3; ++c) {
      if (ref[i][c] > ref[i][best]) best = c;
    }
    hits += best == y[i];
  }
  CHECK(evaluate(m, Data{x, y}) == doctest::Approx(hits / 20.0));
}

TEST_CASE("glorot: bounded, seeded, zero biases") {
  const Model a = Model::glorot({10, 6, 4}, 1);
  CHECK(a == Model::glorot({10, 6, 4}, 1));
  CHECK_FALSE(a == Model::glorot({10, 6, 4}, 2));
  CHECK(a.weight(0).cwiseAbs().maxCoeff() <= std::sqrt(6.0 / 16.0));
  CHECK(a.bias(0).cwiseAbs().maxCoeff() == 0.0);
  CHECK(a.all_finite());
}

TEST_CASE("serialize: round trip is bit exact") {
  const Model m = random_model({7, 5, 3}, 77);
  std::stringstream ss;
  write_model(ss, m);
  CHECK(read_model(ss) == m);
  std::stringstream bad("xx");
  CHECK_THROWS_AS(read_model(bad), DataError);
}
