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

#include "qsfl/runtime/round.hpp"

#include <string>

#include "qsfl/error.hpp"
#include "qsfl/parallel.hpp"
#include "qsfl/random.hpp"
#include "qsfl/runtime/aggregate.hpp"

namespace qsfl {

void RoundState::validate(std::size_t num_clients) const {
  assignment.validate();
  if (client_models.size() != num_clients || assignment.membership.size() != num_clients) {
    throw ConfigError("round state does not cover every client");
  }
  if (static_cast<int>(cluster_models.size()) != assignment.num_clusters) {
    throw ConfigError("round state needs one model per cluster");
  }
}

std::uint64_t client_train_seed(std::uint64_t seed, std::uint64_t stream, int train_round,
                                int client_id) {
  return derive_seed(seed, "train",
                     {stream, static_cast<std::uint64_t>(train_round),
                      static_cast<std::uint64_t>(client_id)});
}

std::vector<double> shard_sizes(std::span<const ClientShard> shards) {
  std::vector<double> out;
  out.reserve(shards.size());
  for (const auto& s : shards) out.push_back(static_cast<double>(s.num_samples()));
  return out;
}

std::vector<Model> train_clients(std::span<const Model* const> starts,
                                 std::span<const ClientShard> shards, const RoundOptions& opts,
                                 int train_round) {
  if (starts.size() != shards.size()) throw ConfigError("one start model per client is required");
  std::vector<Model> out(shards.size());
  parallel_for(shards.size(), opts.workers, [&](std::size_t i) {
    TrainConfig cfg = opts.train;
    cfg.rng_seed = client_train_seed(opts.seed, opts.stream, train_round, shards[i].client_id);
    out[i] = train_local(*starts[i], shards[i].train, cfg);
  });
  return out;
}

std::vector<Model> aggregate_clusters(std::span<const Model> client_models,
                                      std::span<const double> sizes,
                                      const ClusterAssignment& assignment,
                                      std::span<const Model> previous, std::vector<int>* empty) {
  if (static_cast<int>(previous.size()) != assignment.num_clusters) {
    throw ConfigError("need a previous model for every cluster");
  }
  const auto members = assignment.members();
  std::vector<Model> out(assignment.num_clusters);
  for (int k = 0; k < assignment.num_clusters; ++k) {
    std::vector<const Model*> models;
    std::vector<double> weights;
    for (int i : members[k]) {
      models.push_back(&client_models[i]);
      weights.push_back(sizes[i]);
    }
    try {
      out[k] = aggregate_weighted(std::span<const Model* const>(models),
                                  std::span<const double>(weights));
    } catch (const EmptyClusterError&) {
      out[k] = previous[k];
      if (empty) empty->push_back(k);
    }
  }
  return out;
}

RoundState run_round(const RoundState& state, std::span<const ClientShard> shards,
                     const RoundOptions& opts, std::vector<int>* empty) {
  state.validate(shards.size());
  RoundState next;
  next.round = state.round + 1;
  next.assignment = state.assignment;
  std::vector<const Model*> starts(shards.size());
  for (std::size_t i = 0; i < shards.size(); ++i) {
    starts[i] = &state.cluster_models[state.assignment.membership[i]];
  }
  next.client_models = train_clients(starts, shards, opts, next.round);
  const auto sizes = shard_sizes(shards);
  next.cluster_models = aggregate_clusters(next.client_models, sizes, next.assignment,
                                           state.cluster_models, empty);
  return next;
}

}  // namespace qsfl
