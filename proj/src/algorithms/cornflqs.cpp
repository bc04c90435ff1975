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

#include <string>

#include "common.hpp"
#include "qsfl/clustering/kmeans.hpp"
#include "qsfl/clustering/ward.hpp"
#include "qsfl/runtime/aggregate.hpp"

namespace qsfl {

namespace {

struct CornState {
  const AlgoConfig& cfg;
  std::span<const ClientShard> shards;
  RoundOptions opts;
  std::vector<double> sizes;
  std::vector<Model> client_models;
  int r = 0;  // completed rounds after initialization
  AlgoTrace trace;

  int train_index() const { return r + 3; }

  void note_empty(const std::vector<int>& empty, Phase phase) {
    for (int k : empty) {
      trace.notes.push_back(std::string(to_string(phase)) + " round " + std::to_string(r) +
                            ": cluster " + std::to_string(k) + " empty, model carried over");
    }
  }

  // Every client evaluates all cluster models on its train shard and trains
  // the one with the lowest loss. Returns the choices.
  std::vector<int> choose_and_train(const std::vector<Model>& models, Phase phase,
                                    std::vector<int> empty) {
    const Eigen::MatrixXd losses = algo::loss_matrix(models, shards, opts.workers);
    std::vector<int> choice = algo::argmin_rows(losses);
    std::vector<const Model*> starts;
    double loss = 0.0;
    for (std::size_t i = 0; i < shards.size(); ++i) {
      starts.push_back(&models[choice[i]]);
      loss += losses(static_cast<Index>(i), choice[i]);
    }
    client_models = train_clients(starts, shards, opts, train_index());
    ++r;
    trace.rounds.push_back(algo::make_trace(r + 2, phase, choice,
                                            loss / static_cast<double>(shards.size()), models,
                                            std::move(empty)));
    return choice;
  }

  void train_fixed(const std::vector<Model>& models, const std::vector<int>& membership,
                   std::vector<int> empty) {
    std::vector<const Model*> starts;
    for (int k : membership) starts.push_back(&models[k]);
    const double loss = algo::mean_start_loss(models, membership, shards, opts.workers);
    client_models = train_clients(starts, shards, opts, train_index());
    ++r;
    trace.rounds.push_back(
        algo::make_trace(r + 2, Phase::kFedAvgCfl, membership, loss, models, std::move(empty)));
  }
};

ClusterAssignment weight_clustering(std::span<const Model> models, int K) {
  const int n = static_cast<int>(models.size());
  if (K == 1 || n == 1) return ClusterAssignment::single(n);
  return cut(ward_linkage(stack_models(models)), K);
}

}  // namespace

AlgoResult run_cornflqs(std::span<const ClientShard> shards, const AlgoConfig& cfg) {
  cfg.validate(shards.size());
  const std::size_t n = shards.size();
  const int K = cfg.num_clusters;
  CornState st{cfg, shards, algo::round_options(cfg), shard_sizes(shards), {}, 0, {}};
  const std::vector<int> zeros(n, 0);

  // Initialization: two local passes separated by a uniform average.
  const Model w0 = algo::initial_model(cfg, cfg.stream, 0);
  {
    const std::vector<Model> one{w0};
    const double loss0 = algo::mean_start_loss(one, zeros, shards, st.opts.workers);
    const std::vector<const Model*> starts0(n, &w0);
    const std::vector<Model> first = train_clients(starts0, shards, st.opts, 1);
    const std::vector<Model> avg{aggregate_uniform(first)};
    st.trace.rounds.push_back(algo::make_trace(1, Phase::kInit, zeros, loss0, avg, {}));
    const double loss1 = algo::mean_start_loss(avg, zeros, shards, st.opts.workers);
    const std::vector<const Model*> starts1(n, &avg.front());
    st.client_models = train_clients(starts1, shards, st.opts, 2);
    st.trace.rounds.push_back(algo::make_trace(2, Phase::kInit, zeros, loss1, avg, {}));
  }

  // CORN: weight clustering and loss-based choices alternate until they
  // group clients identically, for at most ceil(N / 2) rounds.
  const int corn_bound = (cfg.rounds + 1) / 2;
  std::vector<Model> models;
  std::vector<int> membership;
  bool agreed = false;
  do {
    const ClusterAssignment by_weight = weight_clustering(st.client_models, K);
    const std::vector<Model> unused(K, w0);
    models = aggregate_clusters(st.client_models, st.sizes, by_weight, unused);
    membership = st.choose_and_train(models, Phase::kCorn, {});
    agreed = same_partition(by_weight.membership, membership);
  } while (st.r < corn_bound && !agreed);
  st.trace.notes.push_back(agreed ? "corn agreed after round " + std::to_string(st.r)
                                  : "corn stopped at its round bound without agreement");

  // Loss-based CFL: clients keep choosing until their choices stop changing.
  while (st.r < cfg.rounds) {
    std::vector<int> empty;
    models = aggregate_clusters(st.client_models, st.sizes, ClusterAssignment(membership, K),
                                models, &empty);
    st.note_empty(empty, Phase::kLossCfl);
    std::vector<int> next = st.choose_and_train(models, Phase::kLossCfl, std::move(empty));
    const bool changed = next != membership;
    membership = std::move(next);
    if (!changed) break;
  }

  // FedAvg within the frozen clusters until round N.
  const ClusterAssignment final_assignment(membership, K);
  while (st.r < cfg.rounds) {
    std::vector<int> empty;
    models = aggregate_clusters(st.client_models, st.sizes, final_assignment, models, &empty);
    st.note_empty(empty, Phase::kFedAvgCfl);
    st.train_fixed(models, membership, std::move(empty));
  }

  std::vector<int> empty;
  AlgoResult res;
  res.cluster_models =
      aggregate_clusters(st.client_models, st.sizes, final_assignment, models, &empty);
  st.note_empty(empty, Phase::kFedAvgCfl);
  res.assignment = final_assignment;
  res.trace = std::move(st.trace);
  return res;
}

}  // namespace qsfl
