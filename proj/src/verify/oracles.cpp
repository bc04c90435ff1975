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

#include "qsfl/verify/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "qsfl/clustering/ari.hpp"
#include "qsfl/clustering/ward.hpp"
#include "qsfl/random.hpp"
#include "qsfl/runtime/aggregate.hpp"

namespace qsfl::oracle {

double ari_pairs(std::span<const int> a, std::span<const int> b) {
  const std::size_t n = a.size();
  double n11 = 0, n10 = 0, n01 = 0, n00 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool sa = a[i] == a[j], sb = b[i] == b[j];
      if (sa && sb) ++n11;
      else if (sa) ++n10;
      else if (sb) ++n01;
      else ++n00;
    }
  }
  const double den = (n00 + n01) * (n01 + n11) + (n00 + n10) * (n10 + n11);
  if (den == 0.0) return 1.0;
  return 2.0 * (n00 * n11 - n01 * n10) / den;
}

namespace {

double sse(const RowMatrix<double>& pts, const std::vector<int>& members) {
  Eigen::RowVectorXd c = Eigen::RowVectorXd::Zero(pts.cols());
  for (int i : members) c += pts.row(i);
  c /= static_cast<double>(members.size());
  double s = 0.0;
  for (int i : members) s += (pts.row(i) - c).squaredNorm();
  return s;
}

std::vector<int> canonical(const std::vector<std::vector<int>>& clusters, int n) {
  std::vector<int> owner(n);
  for (std::size_t c = 0; c < clusters.size(); ++c) {
    for (int i : clusters[c]) owner[i] = static_cast<int>(c);
  }
  std::map<int, int> relabel;
  std::vector<int> out(n);
  for (int i = 0; i < n; ++i) {
    auto [it, fresh] = relabel.emplace(owner[i], static_cast<int>(relabel.size()));
    out[i] = it->second;
  }
  return out;
}

}  // namespace

std::vector<GreedyStep> ward_greedy(const RowMatrix<double>& points) {
  const int n = static_cast<int>(points.rows());
  std::vector<std::vector<int>> clusters;
  for (int i = 0; i < n; ++i) clusters.push_back({i});
  std::vector<GreedyStep> steps;
  while (clusters.size() > 1) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t ba = 0, bb = 1;
    for (std::size_t a = 0; a < clusters.size(); ++a) {
      for (std::size_t b = a + 1; b < clusters.size(); ++b) {
        std::vector<int> u = clusters[a];
        u.insert(u.end(), clusters[b].begin(), clusters[b].end());
        const double inc = sse(points, u) - sse(points, clusters[a]) - sse(points, clusters[b]);
        if (inc < best) {
          best = inc;
          ba = a;
          bb = b;
        }
      }
    }
    clusters[ba].insert(clusters[ba].end(), clusters[bb].begin(), clusters[bb].end());
    clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(bb));
    steps.push_back({std::sqrt(std::max(0.0, 2.0 * best)), canonical(clusters, n)});
  }
  return steps;
}

std::vector<double> trimmed_mean(const std::vector<std::vector<double>>& rows, double beta) {
  const std::size_t n = rows.size();
  const auto drop = static_cast<std::size_t>(std::ceil(beta * n - 1e-9));
  std::vector<double> out(rows.front().size());
  for (std::size_t k = 0; k < out.size(); ++k) {
    std::vector<double> col;
    for (const auto& r : rows) col.push_back(r[k]);
    std::sort(col.begin(), col.end());
    col.erase(col.end() - static_cast<std::ptrdiff_t>(drop), col.end());
    col.erase(col.begin(), col.begin() + static_cast<std::ptrdiff_t>(drop));
    double s = 0.0;
    for (double v : col) s += v;
    out[k] = s / static_cast<double>(col.size());
  }
  return out;
}

namespace {

double reference_loss(const Model& m, const RowMatrix<double>& batch, std::span<const int> labels,
                      const Model* anchor, double mu) {
  const RowMatrix<double> z = forward(m, batch);
  double loss = 0.0;
  for (Index i = 0; i < z.rows(); ++i) {
    const double mx = z.row(i).maxCoeff();
    double s = 0.0;
    for (Index c = 0; c < z.cols(); ++c) s += std::exp(z(i, c) - mx);
    loss += mx + std::log(s) - z(i, labels[i]);
  }
  loss /= static_cast<double>(z.rows());
  if (mu > 0.0) loss += 0.5 * mu * (m.values() - anchor->values()).squaredNorm();
  return loss;
}

}  // namespace

std::vector<double> numeric_gradient(const Model& model, const RowMatrix<double>& batch,
                                     std::span<const int> labels, const Model* anchor,
                                     double mu, double step) {
  Model m = model;
  std::vector<double> g(m.num_params());
  for (Index k = 0; k < m.num_params(); ++k) {
    const double w = m.values()[k];
    m.values()[k] = w + step;
    const double up = reference_loss(m, batch, labels, anchor, mu);
    m.values()[k] = w - step;
    const double down = reference_loss(m, batch, labels, anchor, mu);
    m.values()[k] = w;
    g[k] = (up - down) / (2.0 * step);
  }
  return g;
}

namespace {

int rand_int(Rng& rng, int lo, int hi) {  // inclusive
  return lo + static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(hi - lo + 1)));
}

double rand_real(Rng& rng, double lo, double hi) { return lo + (hi - lo) * uniform01(rng); }

CheckResult finish(CheckResult r, double tol) {
  r.passed = r.worst <= tol;
  std::ostringstream s;
  s << r.trials << " trials, worst error " << r.worst << " (tolerance " << tol << ")";
  r.detail = s.str();
  return r;
}

}  // namespace

CheckResult check_ari(std::uint64_t seed, int trials, double tol) {
  Rng rng(derive_seed(seed, "oracle-ari"));
  CheckResult r;
  r.name = "ari_vs_pair_counting";
  for (int t = 0; t < trials; ++t) {
    const int n = rand_int(rng, 2, 60);
    const int ka = rand_int(rng, 1, 7), kb = rand_int(rng, 1, 7);
    std::vector<int> a(n), b(n);
    for (int i = 0; i < n; ++i) {
      a[i] = rand_int(rng, 0, ka - 1);
      // Correlate b with a half of the time so high ARI values are covered.
      b[i] = (t % 2 == 0 && uniform01(rng) < 0.8) ? a[i] % kb : rand_int(rng, 0, kb - 1);
    }
    r.worst = std::max(r.worst, std::fabs(adjusted_rand_index(a, b) - ari_pairs(a, b)));
    ++r.trials;
  }
  return finish(r, tol);
}

CheckResult check_ward(std::uint64_t seed, int trials, int max_points) {
  Rng rng(derive_seed(seed, "oracle-ward"));
  CheckResult r;
  r.name = "ward_vs_exhaustive_greedy";
  int mismatched = 0;
  for (int t = 0; t < trials; ++t) {
    const int n = rand_int(rng, 2, max_points);
    const int d = rand_int(rng, 1, 4);
    RowMatrix<double> pts(n, d);
    for (Index i = 0; i < pts.size(); ++i) pts.data()[i] = rand_real(rng, -1.0, 1.0);
    const Dendrogram tree = ward_linkage(pts);
    const auto ref = ward_greedy(pts);
    for (int s = 0; s < n - 1; ++s) {
      const double h = tree.merges[s].distance;
      r.worst = std::max(r.worst, std::fabs(h - ref[s].height) / std::max(1.0, ref[s].height));
      if (cut(tree, n - s - 1).membership != ref[s].labels) ++mismatched;
    }
    ++r.trials;
  }
  r = finish(r, 1e-9);
  r.passed = r.passed && mismatched == 0;
  r.detail += ", " + std::to_string(mismatched) + " partition mismatches";
  return r;
}

CheckResult check_trimmed_mean(std::uint64_t seed, int trials, double tol) {
  Rng rng(derive_seed(seed, "oracle-trim"));
  CheckResult r;
  r.name = "trimmed_mean_vs_sort_drop";
  for (int t = 0; t < trials; ++t) {
    const int n = rand_int(rng, 3, 20);
    double beta = rand_real(rng, 0.0, 0.45);
    while (2 * static_cast<int>(std::ceil(beta * n - 1e-9)) >= n) beta /= 2.0;
    std::vector<Model> models;
    std::vector<std::vector<double>> rows;
    const std::vector<Index> sizes{3, 2};
    for (int i = 0; i < n; ++i) {
      Model m(sizes);
      for (Index k = 0; k < m.num_params(); ++k) m.values()[k] = rand_real(rng, -5.0, 5.0);
      rows.emplace_back(m.values().data(), m.values().data() + m.num_params());
      models.push_back(std::move(m));
    }
    const Model got = aggregate_trimmed(models, beta);
    const auto want = trimmed_mean(rows, beta);
    for (Index k = 0; k < got.num_params(); ++k) {
      r.worst = std::max(r.worst, std::fabs(got.values()[k] - want[k]));
    }
    ++r.trials;
  }
  return finish(r, tol);
}

CheckResult check_duplication(std::uint64_t seed, int trials, double tol) {
  Rng rng(derive_seed(seed, "oracle-dup"));
  CheckResult r;
  r.name = "weighted_aggregation_duplication";
  for (int t = 0; t < trials; ++t) {
    const int n = rand_int(rng, 1, 8);
    const std::vector<Index> sizes{4, 3, 2};
    std::vector<Model> models;
    std::vector<double> w;
    for (int i = 0; i < n; ++i) {
      models.push_back(Model::glorot(sizes, rng()));
      w.push_back(static_cast<double>(rand_int(rng, 1, 200)));
    }
    // Model j with size s equals two copies of it with size s / 2 each.
    const int j = rand_int(rng, 0, n - 1);
    std::vector<Model> dup = models;
    std::vector<double> wdup = w;
    wdup[j] /= 2.0;
    dup.push_back(models[j]);
    wdup.push_back(wdup[j]);
    const Model a = aggregate_weighted(dup, wdup);
    const Model b = aggregate_weighted(models, w);
    r.worst = std::max(r.worst, (a.values() - b.values()).cwiseAbs().maxCoeff());
    ++r.trials;
  }
  return finish(r, tol);
}

CheckResult check_gradients(std::uint64_t seed, int draws, double tol) {
  Rng rng(derive_seed(seed, "oracle-grad"));
  CheckResult r;
  r.name = "gradient_vs_central_differences";
  for (int t = 0; t < draws; ++t) {
    std::vector<Index> sizes{rand_int(rng, 2, 8)};
    const int hidden = rand_int(rng, 0, 2);
    for (int h = 0; h < hidden; ++h) sizes.push_back(rand_int(rng, 2, 8));
    sizes.push_back(rand_int(rng, 2, 5));
    Model m = Model::glorot(sizes, rng());
    for (Index k = 0; k < m.num_params(); ++k) m.values()[k] += rand_real(rng, -0.1, 0.1);
    const int rows = rand_int(rng, 1, 6);
    RowMatrix<double> x(rows, sizes.front());
    for (Index i = 0; i < x.size(); ++i) x.data()[i] = rand_real(rng, -1.0, 1.0);
    std::vector<int> y(rows);
    for (int& v : y) v = rand_int(rng, 0, static_cast<int>(sizes.back()) - 1);
    Model anchor = Model::glorot(sizes, rng());
    const double mu = t % 2 == 0 ? 0.0 : rand_real(rng, 0.01, 1.0);
    const auto analytic = loss_and_grad(m, x, y, mu > 0.0 ? &anchor : nullptr, mu);
    const auto numeric = numeric_gradient(m, x, y, &anchor, mu);
    // Per-entry relative error; entries below 1e-4 in magnitude compare
    // against that floor instead, where differencing noise dominates.
    for (std::size_t k = 0; k < numeric.size(); ++k) {
      const double a = analytic.grad.values()[static_cast<Index>(k)];
      const double scale = std::max({std::fabs(a), std::fabs(numeric[k]), 1e-4});
      r.worst = std::max(r.worst, std::fabs(a - numeric[k]) / scale);
    }
    ++r.trials;
  }
  return finish(r, tol);
}

std::vector<CheckResult> run_suite(std::uint64_t seed) {
  return {check_ari(seed), check_ward(seed), check_trimmed_mean(seed), check_duplication(seed),
          check_gradients(seed)};
}

}  // namespace qsfl::oracle
