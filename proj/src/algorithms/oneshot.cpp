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
#include "qsfl/random.hpp"

namespace qsfl {

namespace {

enum class OneShot { kKMeans, kWard };

ClusterAssignment cluster_weights(std::span<const Model> client_models, const AlgoConfig& cfg,
                                  OneShot method) {
  const int n = static_cast<int>(client_models.size());
  if (cfg.num_clusters == 1 || n == 1) return ClusterAssignment::single(n);
  const auto points = stack_models(client_models);
  if (method == OneShot::kWard) return cut(ward_linkage(points), cfg.num_clusters);
  const auto km = kmeans(points, cfg.num_clusters, derive_seed(cfg.seed, "kmeans", {cfg.stream}),
                         cfg.kmeans_max_iter);
  return km.assignment;
}

// FedAvg up to the clustering round, one-shot clustering of the client
// weights trained in that round, then per-cluster FedAvg to round N.
AlgoResult run_oneshot(std::span<const ClientShard> shards, const AlgoConfig& cfg,
                       OneShot method) {
  cfg.validate(shards.size());
  const RoundOptions opts = algo::round_options(cfg);
  RoundState state = algo::single_cluster_state(algo::initial_model(cfg, cfg.stream, 0),
                                                shards.size());
  AlgoResult res;
  const int c = cfg.effective_clustering_round();
  algo::run_fixed_rounds(state, shards, opts, c, Phase::kTrain, res.trace);

  state.assignment = cluster_weights(state.client_models, cfg, method);
  const std::vector<Model> previous(state.assignment.num_clusters, state.cluster_models.front());
  const auto sizes = shard_sizes(shards);
  state.cluster_models =
      aggregate_clusters(state.client_models, sizes, state.assignment, previous);
  res.trace.notes.push_back("clustered after round " + std::to_string(c) + " into " +
                            std::to_string(state.assignment.num_nonempty()) + " clusters");

  algo::run_fixed_rounds(state, shards, opts, cfg.rounds, Phase::kTrain, res.trace);
  res.cluster_models = std::move(state.cluster_models);
  res.assignment = std::move(state.assignment);
  return res;
}

}  // namespace

AlgoResult run_cfl_oneshot(std::span<const ClientShard> shards, const AlgoConfig& cfg) {
  return run_oneshot(shards, cfg, OneShot::kKMeans);
}

AlgoResult run_flhc(std::span<const ClientShard> shards, const AlgoConfig& cfg) {
  return run_oneshot(shards, cfg, OneShot::kWard);
}

}  // namespace qsfl
