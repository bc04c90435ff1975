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

#include "common.hpp"
#include "qsfl/clustering/edc.hpp"
#include "qsfl/clustering/kmeans.hpp"
#include "qsfl/error.hpp"
#include "qsfl/random.hpp"

namespace qsfl {

// Cold start: every client trains the initial model once (training round 1).
// Updates w_i - W0 are clustered with EDC features and k-means, then each
// cluster runs FedAvg for N further rounds.
AlgoResult run_fedgroup(std::span<const ClientShard> shards, const AlgoConfig& cfg) {
  cfg.validate(shards.size());
  const RoundOptions opts = algo::round_options(cfg);
  const Model init = algo::initial_model(cfg, cfg.stream, 0);
  const std::size_t n = shards.size();
  AlgoResult res;

  const std::vector<const Model*> starts(n, &init);
  std::vector<Model> trained = train_clients(starts, shards, opts, 1);
  const double cold_loss = [&] {
    const std::vector<Model> one{init};
    return algo::mean_start_loss(one, std::vector<int>(n, 0), shards, opts.workers);
  }();

  ClusterAssignment assignment = ClusterAssignment::single(static_cast<int>(n));
  if (cfg.num_clusters > 1) {
    RowMatrix<double> updates(static_cast<Index>(n), init.num_params());
    for (std::size_t i = 0; i < n; ++i) {
      updates.row(static_cast<Index>(i)) = (trained[i].values() - init.values()).transpose();
    }
    const int m = cfg.edc_directions > 0 ? cfg.edc_directions : cfg.num_clusters;
    if (m > static_cast<int>(n)) throw ConfigError("EDC directions exceed the client count");
    const auto edc = edc_features(updates, m);
    for (int z : edc.zero_norm) {
      res.trace.notes.push_back("client " + std::to_string(z) + " produced a zero update");
    }
    assignment = kmeans(edc.features, cfg.num_clusters,
                        derive_seed(cfg.seed, "kmeans", {cfg.stream}), cfg.kmeans_max_iter)
                     .assignment;
  }

  RoundState state;
  state.round = 1;
  state.assignment = assignment;
  const std::vector<Model> previous(assignment.num_clusters, init);
  std::vector<int> empty;
  state.cluster_models = aggregate_clusters(trained, shard_sizes(shards), assignment, previous,
                                            &empty);
  state.client_models = std::move(trained);
  res.trace.rounds.push_back(algo::make_trace(1, Phase::kColdStart, assignment.membership,
                                              cold_loss, state.cluster_models, empty));

  algo::run_fixed_rounds(state, shards, opts, cfg.rounds + 1, Phase::kTrain, res.trace);
  res.cluster_models = std::move(state.cluster_models);
  res.assignment = std::move(state.assignment);
  return res;
}

}  // namespace qsfl
