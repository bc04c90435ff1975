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

// Helpers shared by the algorithm drivers. Not part of the public API.

#include <span>
#include <vector>

#include "qsfl/algorithms/algorithms.hpp"
#include "qsfl/runtime/round.hpp"

namespace qsfl::algo {

RoundOptions round_options(const AlgoConfig& cfg, std::uint64_t stream_offset = 0);

// Glorot model for (stream, cluster slot), derived from the run seed.
Model initial_model(const AlgoConfig& cfg, std::uint64_t stream, int slot);

// losses(i, k): mean train cross-entropy of models[k] on client i.
Eigen::MatrixXd loss_matrix(std::span<const Model> models, std::span<const ClientShard> shards,
                            std::size_t workers);

// Per-client argmin over a loss row; ties go to the lowest index.
std::vector<int> argmin_rows(const Eigen::MatrixXd& losses);

double mean_start_loss(std::span<const Model> cluster_models, const std::vector<int>& membership,
                       std::span<const ClientShard> shards, std::size_t workers);

double mean_train_accuracy(std::span<const Model> cluster_models,
                           const std::vector<int>& membership,
                           std::span<const ClientShard> shards, std::size_t workers);

std::vector<double> norms(std::span<const Model> models);

RoundTrace make_trace(int round, Phase phase, const std::vector<int>& membership, double loss,
                      std::span<const Model> cluster_models, std::vector<int> empty);

// Runs FedAvg-style rounds with fixed memberships until state.round == last_round.
void run_fixed_rounds(RoundState& state, std::span<const ClientShard> shards,
                      const RoundOptions& opts, int last_round, Phase phase, AlgoTrace& trace);

// Initial single-cluster state: every client holds the initial model.
RoundState single_cluster_state(const Model& init, std::size_t num_clients);

}  // namespace qsfl::algo
