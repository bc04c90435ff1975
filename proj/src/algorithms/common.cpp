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

#include <string>

#include "qsfl/error.hpp"
#include "qsfl/parallel.hpp"
#include "qsfl/random.hpp"

namespace qsfl {

std::string_view to_string(Algorithm a) {
  switch (a) {
    case Algorithm::kFedAvg: return "fedavg";
    case Algorithm::kFedProx: return "fedprox";
    case Algorithm::kCfl: return "cfl";
    case Algorithm::kFlhc: return "flhc";
    case Algorithm::kFedGroup: return "fedgroup";
    case Algorithm::kIfca: return "ifca";
    case Algorithm::kSrfca: return "srfca";
    case Algorithm::kCornflqs: return "cornflqs";
  }
  return "?";
}

Algorithm parse_algorithm(std::string_view s) {
  for (Algorithm a : all_algorithms()) {
    if (s == to_string(a)) return a;
  }
  if (s == "fl+hc") return Algorithm::kFlhc;
  throw ConfigError("unknown algorithm '" + std::string(s) + "'");
}

std::vector<Algorithm> all_algorithms() {
  return {Algorithm::kFedAvg, Algorithm::kFedProx,  Algorithm::kCfl,   Algorithm::kFlhc,
          Algorithm::kFedGroup, Algorithm::kIfca, Algorithm::kSrfca, Algorithm::kCornflqs};
}

std::string_view to_string(Phase p) {
  switch (p) {
    case Phase::kTrain: return "train";
    case Phase::kColdStart: return "cold_start";
    case Phase::kInit: return "init";
    case Phase::kCorn: return "corn";
    case Phase::kLossCfl: return "loss_cfl";
    case Phase::kFedAvgCfl: return "fedavg_cfl";
    case Phase::kRefine: return "refine";
  }
  return "?";
}

void AlgoConfig::validate(std::size_t num_clients) const {
  if (num_clients == 0) throw ConfigError("no clients");
  if (num_clusters < 1) throw ConfigError("K must be >= 1");
  if (algorithm != Algorithm::kSrfca && algorithm != Algorithm::kFedAvg &&
      algorithm != Algorithm::kFedProx && static_cast<std::size_t>(num_clusters) > num_clients) {
    throw ConfigError("K = " + std::to_string(num_clusters) + " exceeds the client count " +
                      std::to_string(num_clients));
  }
  if (rounds < 1) throw ConfigError("rounds must be >= 1");
  if (clustering_round < 0 || effective_clustering_round() >= rounds) {
    if (algorithm == Algorithm::kCfl || algorithm == Algorithm::kFlhc) {
      throw ConfigError("clustering round must be in [1, N)");
    }
  }
  if (ifca_restarts < 1) throw ConfigError("ifca_restarts must be >= 1");
  if (prox_mu < 0.0) throw ConfigError("prox_mu must be >= 0");
  if (!(trim_fraction >= 0.0 && trim_fraction < 0.5)) {
    throw ConfigError("trim fraction must be in [0, 0.5)");
  }
  if (algorithm == Algorithm::kCornflqs && rounds < 4) throw ConfigError("CORNFLQS needs N >= 4");
  if (!(srfca_quantile_low >= 0.0 && srfca_quantile_low <= srfca_quantile_high &&
        srfca_quantile_high <= 1.0)) {
    throw ConfigError("SRFCA quantile grid must satisfy 0 <= low <= high <= 1");
  }
  if (srfca_grid_points < 1) throw ConfigError("SRFCA grid needs at least one point");
  if (layer_sizes.size() < 2) throw ConfigError("layer_sizes needs input and output sizes");
  train.validate();
}

std::vector<double> client_test_accuracy(const AlgoResult& result,
                                         std::span<const ClientShard> shards) {
  std::vector<double> acc(shards.size());
  for (std::size_t i = 0; i < shards.size(); ++i) {
    if (!shards[i].test) throw DataError("client " + std::to_string(i) + " has no test set");
    acc[i] = evaluate(result.model_for(static_cast<int>(i)), *shards[i].test);
  }
  return acc;
}

namespace algo {

RoundOptions round_options(const AlgoConfig& cfg, std::uint64_t stream_offset) {
  RoundOptions o;
  o.train = cfg.train;
  o.seed = cfg.seed;
  o.stream = cfg.stream + stream_offset;
  o.workers = cfg.workers;
  return o;
}

Model initial_model(const AlgoConfig& cfg, std::uint64_t stream, int slot) {
  return Model::glorot(cfg.layer_sizes,
                       derive_seed(cfg.seed, "init", {stream, static_cast<std::uint64_t>(slot)}));
}

Eigen::MatrixXd loss_matrix(std::span<const Model> models, std::span<const ClientShard> shards,
                            std::size_t workers) {
  Eigen::MatrixXd out(static_cast<Index>(shards.size()), static_cast<Index>(models.size()));
  parallel_for(shards.size(), workers, [&](std::size_t i) {
    for (std::size_t k = 0; k < models.size(); ++k) {
      out(static_cast<Index>(i), static_cast<Index>(k)) = mean_loss(models[k], shards[i].train);
    }
  });
  return out;
}

std::vector<int> argmin_rows(const Eigen::MatrixXd& losses) {
  std::vector<int> out(losses.rows(), 0);
  for (Index i = 0; i < losses.rows(); ++i) {
    for (Index k = 1; k < losses.cols(); ++k) {
      if (losses(i, k) < losses(i, out[i])) out[i] = static_cast<int>(k);
    }
  }
  return out;
}

double mean_start_loss(std::span<const Model> cluster_models, const std::vector<int>& membership,
                       std::span<const ClientShard> shards, std::size_t workers) {
  std::vector<double> loss(shards.size());
  parallel_for(shards.size(), workers, [&](std::size_t i) {
    loss[i] = mean_loss(cluster_models[membership[i]], shards[i].train);
  });
  double sum = 0.0;
  for (double l : loss) sum += l;
  return sum / static_cast<double>(loss.size());
}

double mean_train_accuracy(std::span<const Model> cluster_models,
                           const std::vector<int>& membership,
                           std::span<const ClientShard> shards, std::size_t workers) {
  std::vector<double> acc(shards.size());
  parallel_for(shards.size(), workers, [&](std::size_t i) {
    acc[i] = evaluate(cluster_models[membership[i]], shards[i].train);
  });
  double sum = 0.0;
  for (double a : acc) sum += a;
  return sum / static_cast<double>(acc.size());
}

std::vector<double> norms(std::span<const Model> models) {
  std::vector<double> out;
  for (const auto& m : models) out.push_back(m.values().norm());
  return out;
}

RoundTrace make_trace(int round, Phase phase, const std::vector<int>& membership, double loss,
                      std::span<const Model> cluster_models, std::vector<int> empty) {
  RoundTrace t;
  t.round = round;
  t.phase = phase;
  t.assignment = membership;
  t.mean_train_loss = loss;
  t.cluster_norms = norms(cluster_models);
  t.empty_clusters = std::move(empty);
  return t;
}

void run_fixed_rounds(RoundState& state, std::span<const ClientShard> shards,
                      const RoundOptions& opts, int last_round, Phase phase, AlgoTrace& trace) {
  while (state.round < last_round) {
    const double loss =
        mean_start_loss(state.cluster_models, state.assignment.membership, shards, opts.workers);
    std::vector<int> empty;
    state = run_round(state, shards, opts, &empty);
    for (int k : empty) {
      trace.notes.push_back("round " + std::to_string(state.round) + ": cluster " +
                            std::to_string(k) + " empty, model carried over");
    }
    trace.rounds.push_back(make_trace(state.round, phase, state.assignment.membership, loss,
                                      state.cluster_models, std::move(empty)));
  }
}

RoundState single_cluster_state(const Model& init, std::size_t num_clients) {
  RoundState s;
  s.round = 0;
  s.cluster_models = {init};
  s.client_models.assign(num_clients, init);
  s.assignment = ClusterAssignment::single(static_cast<int>(num_clients));
  return s;
}

}  // namespace algo
}  // namespace qsfl
