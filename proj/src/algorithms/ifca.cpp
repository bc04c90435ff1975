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

namespace qsfl {

namespace {

struct Restart {
  AlgoResult result;
  double train_accuracy = 0.0;
  double train_loss = 0.0;
};

Restart run_restart(std::span<const ClientShard> shards, const AlgoConfig& cfg, int restart) {
  const RoundOptions opts = algo::round_options(cfg, static_cast<std::uint64_t>(restart));
  const int K = cfg.num_clusters;
  std::vector<Model> models;
  for (int k = 0; k < K; ++k) models.push_back(algo::initial_model(cfg, opts.stream, k));

  const auto sizes = shard_sizes(shards);
  Restart out;
  ClusterAssignment assignment;
  for (int r = 1; r <= cfg.rounds; ++r) {
    const Eigen::MatrixXd losses = algo::loss_matrix(models, shards, opts.workers);
    assignment = ClusterAssignment(algo::argmin_rows(losses), K);
    double loss = 0.0;
    std::vector<const Model*> starts;
    for (std::size_t i = 0; i < shards.size(); ++i) {
      starts.push_back(&models[assignment.membership[i]]);
      loss += losses(static_cast<Index>(i), assignment.membership[i]);
    }
    loss /= static_cast<double>(shards.size());
    const auto trained = train_clients(starts, shards, opts, r);
    std::vector<int> empty;
    models = aggregate_clusters(trained, sizes, assignment, models, &empty);
    out.result.trace.rounds.push_back(
        algo::make_trace(r, Phase::kTrain, assignment.membership, loss, models, empty));
  }
  out.train_accuracy =
      algo::mean_train_accuracy(models, assignment.membership, shards, opts.workers);
  out.train_loss = algo::mean_start_loss(models, assignment.membership, shards, opts.workers);
  out.result.cluster_models = std::move(models);
  out.result.assignment = std::move(assignment);
  out.result.trace.selected_restart = restart;
  return out;
}

}  // namespace

// Each restart draws K fresh models; every round a client trains the model
// with the lowest loss on its train shard. The best restart is kept.
AlgoResult run_ifca(std::span<const ClientShard> shards, const AlgoConfig& cfg) {
  cfg.validate(shards.size());
  Restart best;
  std::vector<std::string> notes;
  for (int r = 0; r < cfg.ifca_restarts; ++r) {
    Restart cur = run_restart(shards, cfg, r);
    notes.push_back("restart " + std::to_string(r) + ": train accuracy " +
                    std::to_string(cur.train_accuracy) + ", train loss " +
                    std::to_string(cur.train_loss));
    const bool better = r == 0 || (cfg.ifca_selection == IfcaSelection::kTrainAccuracy
                                       ? cur.train_accuracy > best.train_accuracy
                                       : cur.train_loss < best.train_loss);
    if (better) best = std::move(cur);
  }
  AlgoResult res = std::move(best.result);
  res.trace.notes = std::move(notes);
  return res;
}

}  // namespace qsfl
