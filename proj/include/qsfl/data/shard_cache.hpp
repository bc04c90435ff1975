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

#include <filesystem>
#include <vector>

#include "qsfl/data/partition.hpp"

namespace qsfl {

// Binary shard cache, little-endian:
//   "QSFLSHD1", u64 shard count, u64 feature dim, u64 test-set count,
//   per test set: u64 het class, u64 rows, rows*dim f64, rows i64 labels
//   per shard: u64 id, u64 het class, u64 samples/label, u64 rows,
//              rows*dim f64, rows i64 labels
// Shards of the same class share one test set on read.
void write_shard_cache(const std::filesystem::path& path, const std::vector<ClientShard>& shards);
std::vector<ClientShard> read_shard_cache(const std::filesystem::path& path);

}  // namespace qsfl
