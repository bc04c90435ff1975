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

#include "qsfl/algorithms/algorithms.hpp"

namespace qsfl {

AlgoResult run_algorithm(std::span<const ClientShard> shards, const AlgoConfig& cfg) {
  switch (cfg.algorithm) {
    case Algorithm::kFedAvg: return run_fedavg(shards, cfg);
    case Algorithm::kFedProx: return run_fedprox(shards, cfg);
    case Algorithm::kCfl: return run_cfl_oneshot(shards, cfg);
    case Algorithm::kFlhc: return run_flhc(shards, cfg);
    case Algorithm::kFedGroup: return run_fedgroup(shards, cfg);
    case Algorithm::kIfca: return run_ifca(shards, cfg);
    case Algorithm::kSrfca: return run_srfca(shards, cfg);
    case Algorithm::kCornflqs: return run_cornflqs(shards, cfg);
  }
  return run_fedavg(shards, cfg);
}

}  // namespace qsfl
