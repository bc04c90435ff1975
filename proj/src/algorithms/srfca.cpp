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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "common.hpp"
#include "qsfl/runtime/aggregate.hpp"

namespace qsfl {

namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
  std::vector<int> labels() {
    std::vector<int> out(parent.size());
    for (std::size_t i = 0; i < parent.size(); ++i) out[i] = find(static_cast<int>(i));
    return canonical_labels(out);
  }
};

double quantile7(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double h = (static_cast<double>(v.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= v.size()) return v.back();
  return v[lo] + (h - static_cast<double>(lo)) * (v[lo + 1] - v[lo]);
}

int count_labels(const std::vector<int>& labels) {
  return labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
}

// Components of the graph linking clients at distance <= lambda; a client
// left alone joins its nearest neighbour's component.
std::vector<int> threshold_components(const Eigen::MatrixXd& dist, double lambda) {
  const int n = static_cast<int>(dist.rows());
  UnionFind uf(n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (dist(i, j) <= lambda) uf.unite(i, j);
    }
  }
  std::vector<int> size(n, 0);
  for (int i = 0; i < n; ++i) ++size[uf.find(i)];
  std::vector<int> nearest(n, -1);
  for (int i = 0; i < n; ++i) {
    if (size[uf.find(i)] != 1 || n == 1) continue;
    for (int j = 0; j < n; ++j) {
      if (j != i && (nearest[i] < 0 || dist(i, j) < dist(i, nearest[i]))) nearest[i] = j;
    }
  }
  for (int i = 0; i < n; ++i) {
    if (nearest[i] >= 0) uf.unite(i, nearest[i]);
  }
  return uf.labels();
}

Model trimmed_or_mean(const std::vector<const Model*>& models, double beta) {
  const auto cut = static_cast<std::size_t>(std::ceil(beta * models.size() - 1e-9));
  if (2 * cut >= models.size()) beta = 0.0;
  return aggregate_trimmed(std::span<const Model* const>(models), beta);
}

std::vector<Model> aggregate_trimmed_clusters(std::span<const Model> client_models,
                                              const ClusterAssignment& a, double beta) {
  std::vector<Model> out;
  for (const auto& members : a.members()) {
    std::vector<const Model*> ptrs;
    for (int i : members) ptrs.push_back(&client_models[i]);
    out.push_back(trimmed_or_mean(ptrs, beta));
  }
  return out;
}

void refine(RoundState& state, std::span<const ClientShard> shards, const RoundOptions& opts,
            double beta, int last_round, AlgoTrace& trace) {
  while (state.round < last_round) {
    const double loss =
        algo::mean_start_loss(state.cluster_models, state.assignment.membership, shards,
                              opts.workers);
    std::vector<const Model*> starts;
    for (int k : state.assignment.membership) starts.push_back(&state.cluster_models[k]);
    ++state.round;
    state.client_models = train_clients(starts, shards, opts, state.round);
    state.cluster_models = aggregate_trimmed_clusters(state.client_models, state.assignment, beta);
    trace.rounds.push_back(algo::make_trace(state.round, Phase::kRefine,
                                            state.assignment.membership, loss,
                                            state.cluster_models, {}));
  }
}

// Merges cluster pairs whose symmetrised mean cross-loss is <= lambda.
void merge_pass(RoundState& state, std::span<const ClientShard> shards, std::size_t workers,
                double lambda, AlgoTrace& trace) {
  const int K = state.assignment.num_clusters;
  if (K < 2) return;
  const Eigen::MatrixXd losses = algo::loss_matrix(state.cluster_models, shards, workers);
  const auto members = state.assignment.members();
  Eigen::MatrixXd cl = Eigen::MatrixXd::Zero(K, K);  // cl(a, b): mean loss of model b on a
  for (int a = 0; a < K; ++a) {
    for (int b = 0; b < K; ++b) {
      for (int i : members[a]) cl(a, b) += losses(i, b);
      cl(a, b) /= static_cast<double>(members[a].size());
    }
  }
  UnionFind uf(K);
  for (int a = 0; a < K; ++a) {
    for (int b = a + 1; b < K; ++b) {
      if ((cl(a, b) + cl(b, a)) / 2.0 <= lambda) uf.unite(a, b);
    }
  }
  const std::vector<int> group = uf.labels();
  const int merged = count_labels(group);
  if (merged == K) return;
  const auto sizes = shard_sizes(shards);
  std::vector<Model> models;
  for (int g = 0; g < merged; ++g) {
    std::vector<const Model*> ptrs;
    std::vector<double> weight;
    for (int a = 0; a < K; ++a) {
      if (group[a] != g) continue;
      ptrs.push_back(&state.cluster_models[a]);
      double total = 0.0;
      for (int i : members[a]) total += sizes[i];
      weight.push_back(total);
    }
    models.push_back(aggregate_weighted(std::span<const Model* const>(ptrs),
                                        std::span<const double>(weight)));
  }
  for (int& k : state.assignment.membership) k = group[k];
  state.assignment.num_clusters = merged;
  state.cluster_models = std::move(models);
  trace.notes.push_back("merge after round " + std::to_string(state.round) + ": " +
                        std::to_string(K) + " -> " + std::to_string(merged) + " clusters");
}

struct Candidate {
  AlgoResult result;
  double train_accuracy = 0.0;
};

}  // namespace

// One-shot clustering of locally trained models by symmetrised cross-loss,
// thresholded at a grid of quantiles; then trimmed-mean refinement, one merge
// pass, and refinement to round N. The threshold with the best mean train
// accuracy is kept. The number of clusters is not an input.
AlgoResult run_srfca(std::span<const ClientShard> shards, const AlgoConfig& cfg) {
  cfg.validate(shards.size());
  const RoundOptions opts = algo::round_options(cfg);
  const int n = static_cast<int>(shards.size());
  const Model init = algo::initial_model(cfg, cfg.stream, 0);

  const std::vector<const Model*> starts(n, &init);
  const std::vector<Model> local = train_clients(starts, shards, opts, 1);
  const double cold_loss = [&] {
    const std::vector<Model> one{init};
    return algo::mean_start_loss(one, std::vector<int>(n, 0), shards, opts.workers);
  }();
  const Eigen::MatrixXd cross = algo::loss_matrix(local, shards, opts.workers);  // L_i(w_j)
  const Eigen::MatrixXd dist = (cross + cross.transpose()) / 2.0;
  std::vector<double> pairs;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) pairs.push_back(dist(i, j));
  }

  std::vector<double> grid;
  for (int g = 0; g < cfg.srfca_grid_points; ++g) {
    const double t = cfg.srfca_grid_points == 1
                         ? 0.0
                         : static_cast<double>(g) / (cfg.srfca_grid_points - 1);
    const double q = cfg.srfca_quantile_low + t * (cfg.srfca_quantile_high -
                                                   cfg.srfca_quantile_low);
    grid.push_back(pairs.empty() ? 0.0 : quantile7(pairs, q));
  }

  const int refine_end = std::min(cfg.rounds, 1 + (cfg.rounds + 2) / 3);
  std::vector<Candidate> candidates;
  int best = -1;
  bool all_single = true;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const double lambda = grid[g];
    const std::vector<int> labels = threshold_components(dist, lambda);
    const int k0 = count_labels(labels);
    if (k0 > 1) all_single = false;
    Candidate cand;
    RoundState state;
    state.round = 1;
    state.assignment = ClusterAssignment(labels, k0);
    state.client_models = local;
    state.cluster_models = aggregate_trimmed_clusters(local, state.assignment, cfg.trim_fraction);
    AlgoTrace& trace = cand.result.trace;
    trace.srfca_threshold = lambda;
    trace.rounds.push_back(algo::make_trace(1, Phase::kColdStart, labels, cold_loss,
                                            state.cluster_models, {}));
    trace.notes.push_back("threshold " + std::to_string(lambda) + ": " + std::to_string(k0) +
                          " initial clusters");
    refine(state, shards, opts, cfg.trim_fraction, refine_end, trace);
    merge_pass(state, shards, opts.workers, lambda, trace);
    refine(state, shards, opts, cfg.trim_fraction, cfg.rounds, trace);
    cand.train_accuracy = algo::mean_train_accuracy(state.cluster_models,
                                                    state.assignment.membership, shards,
                                                    opts.workers);
    cand.result.cluster_models = std::move(state.cluster_models);
    cand.result.assignment = std::move(state.assignment);
    candidates.push_back(std::move(cand));
    if (best < 0 || candidates.back().train_accuracy > candidates[best].train_accuracy) {
      best = static_cast<int>(g);
    }
  }

  AlgoResult res = std::move(candidates[best].result);
  for (std::size_t g = 0; g < candidates.size(); ++g) {
    res.trace.notes.push_back("grid " + std::to_string(g) + ": lambda " +
                              std::to_string(grid[g]) + ", train accuracy " +
                              std::to_string(candidates[g].train_accuracy));
  }
  if (all_single) {
    res.trace.notes.push_back("every threshold produced a single cluster (K_effective = 1)");
  }
  return res;
}

}  // namespace qsfl
