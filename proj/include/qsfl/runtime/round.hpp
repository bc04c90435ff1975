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

#include <cstdint>
#include <span>
#include <vector>

#include "qsfl/data/partition.hpp"
#include "qsfl/nn/mlp.hpp"
#include "qsfl/runtime/assignment.hpp"

namespace qsfl {

struct RoundState {
  int round = 0;
  std::vector<Model> cluster_models;
  std::vector<Model> client_models;
  ClusterAssignment assignment;

  void validate(std::size_t num_clients) const;
};

struct RoundOptions {
  TrainConfig train;        // rng_seed is replaced per client and round
  std::uint64_t seed = 0;   // run seed
  std::uint64_t stream = 0; // independent repetition (IFCA restarts)
  std::size_t workers = 1;
};

// Local-training seed of one client in one training round. Every driver uses
// it, so algorithms that degenerate to FedAvg reproduce it exactly.
std::uint64_t client_train_seed(std::uint64_t seed, std::uint64_t stream, int train_round,
                                int client_id);

std::vector<double> shard_sizes(std::span<const ClientShard> shards);

// Trains client i from *starts[i] on its shard for training round
// `train_round`. Clients run on up to opts.workers threads; results do not
// depend on the worker count.
std::vector<Model> train_clients(std::span<const Model* const> starts,
                                 std::span<const ClientShard> shards, const RoundOptions& opts,
                                 int train_round);

// Sample-weighted aggregate of each cluster's client models. A cluster with no
// members keeps its model from `previous`; its id is appended to *empty.
std::vector<Model> aggregate_clusters(std::span<const Model> client_models,
                                      std::span<const double> sizes,
                                      const ClusterAssignment& assignment,
                                      std::span<const Model> previous,
                                      std::vector<int>* empty = nullptr);

// One communication round with fixed memberships: every client trains its
// cluster's model, then each cluster is re-aggregated (ascending client id
// order, sample-weighted). The returned state has round + 1.
RoundState run_round(const RoundState& state, std::span<const ClientShard> shards,
                     const RoundOptions& opts, std::vector<int>* empty = nullptr);

}  // namespace qsfl
