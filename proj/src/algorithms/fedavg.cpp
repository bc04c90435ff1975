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

namespace qsfl {

namespace {

AlgoResult run_single_model(std::span<const ClientShard> shards, const AlgoConfig& cfg,
                            const RoundOptions& opts) {
  cfg.validate(shards.size());
  RoundState state = algo::single_cluster_state(algo::initial_model(cfg, opts.stream, 0),
                                                shards.size());
  AlgoResult res;
  algo::run_fixed_rounds(state, shards, opts, cfg.rounds, Phase::kTrain, res.trace);
  res.cluster_models = std::move(state.cluster_models);
  res.assignment = std::move(state.assignment);
  return res;
}

}  // namespace

AlgoResult run_fedavg(std::span<const ClientShard> shards, const AlgoConfig& cfg) {
  RoundOptions opts = algo::round_options(cfg);
  opts.train.prox_mu = 0.0;
  return run_single_model(shards, cfg, opts);
}

// Local objectives get mu/2 |w - W|^2 with W the model broadcast that round.
AlgoResult run_fedprox(std::span<const ClientShard> shards, const AlgoConfig& cfg) {
  RoundOptions opts = algo::round_options(cfg);
  opts.train.prox_mu = cfg.prox_mu;
  return run_single_model(shards, cfg, opts);
}

}  // namespace qsfl
