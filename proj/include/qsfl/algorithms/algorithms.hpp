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
#include <string>
#include <string_view>
#include <vector>

#include "qsfl/data/partition.hpp"
#include "qsfl/nn/mlp.hpp"
#include "qsfl/runtime/assignment.hpp"

namespace qsfl {

enum class Algorithm { kFedAvg, kFedProx, kCfl, kFlhc, kFedGroup, kIfca, kSrfca, kCornflqs };

std::string_view to_string(Algorithm a);  // "fedavg", "fedprox", "cfl", "flhc", ...
Algorithm parse_algorithm(std::string_view s);
std::vector<Algorithm> all_algorithms();

enum class IfcaSelection { kTrainAccuracy, kTrainLoss };

struct AlgoConfig {
  Algorithm algorithm = Algorithm::kFedAvg;
  int num_clusters = 4;          // K
  int rounds = 20;               // N
  int clustering_round = 0;      // CFL / FL+HC; 0 means N / 2
  int ifca_restarts = 5;
  IfcaSelection ifca_selection = IfcaSelection::kTrainAccuracy;
  double prox_mu = 0.01;         // FedProx only
  double trim_fraction = 0.1;    // SRFCA trimmed mean
  double srfca_quantile_low = 0.10;
  double srfca_quantile_high = 0.25;
  int srfca_grid_points = 4;
  int edc_directions = 0;        // FedGroup; 0 means K
  int kmeans_max_iter = 100;

  std::vector<Index> layer_sizes{784, 200, 10};
  TrainConfig train;             // rng_seed unused; seeds derive from `seed`
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;      // offsets every random stream (IFCA restarts use stream + r)
  std::size_t workers = 1;

  int effective_clustering_round() const { return clustering_round > 0 ? clustering_round : rounds / 2; }
  void validate(std::size_t num_clients) const;
};

enum class Phase { kTrain, kColdStart, kInit, kCorn, kLossCfl, kFedAvgCfl, kRefine };
std::string_view to_string(Phase p);

struct RoundTrace {
  int round = 0;                  // 1-based training round, init passes included
  Phase phase = Phase::kTrain;
  std::vector<int> assignment;    // membership used for this round's training
  double mean_train_loss = 0.0;   // mean loss of each client's start model on its train shard
  std::vector<double> cluster_norms;  // L2 norm of each cluster model after aggregation
  std::vector<int> empty_clusters;
};

struct AlgoTrace {
  std::vector<RoundTrace> rounds;
  std::vector<std::string> notes;
  int selected_restart = 0;       // IFCA
  double srfca_threshold = 0.0;   // SRFCA
};

struct AlgoResult {
  std::vector<Model> cluster_models;
  ClusterAssignment assignment;
  AlgoTrace trace;

  const Model& model_for(int client) const { return cluster_models[assignment.membership[client]]; }
};

AlgoResult run_fedavg(std::span<const ClientShard> shards, const AlgoConfig& cfg);
AlgoResult run_fedprox(std::span<const ClientShard> shards, const AlgoConfig& cfg);
AlgoResult run_cfl_oneshot(std::span<const ClientShard> shards, const AlgoConfig& cfg);
AlgoResult run_flhc(std::span<const ClientShard> shards, const AlgoConfig& cfg);
AlgoResult run_fedgroup(std::span<const ClientShard> shards, const AlgoConfig& cfg);
AlgoResult run_ifca(std::span<const ClientShard> shards, const AlgoConfig& cfg);
AlgoResult run_srfca(std::span<const ClientShard> shards, const AlgoConfig& cfg);
AlgoResult run_cornflqs(std::span<const ClientShard> shards, const AlgoConfig& cfg);

// Dispatches on cfg.algorithm.
AlgoResult run_algorithm(std::span<const ClientShard> shards, const AlgoConfig& cfg);

// Test accuracy of every client under its cluster's model.
std::vector<double> client_test_accuracy(const AlgoResult& result,
                                         std::span<const ClientShard> shards);

}  // namespace qsfl
