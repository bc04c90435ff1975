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

#include "qsfl/data/shard_cache.hpp"

#include <fstream>
#include <map>

#include "qsfl/binary_io.hpp"
#include "qsfl/error.hpp"

namespace qsfl {
namespace {

constexpr char kMagic[8] = {'Q', 'S', 'F', 'L', 'S', 'H', 'D', '1'};

void write_data(std::ostream& out, const Data& d) {
  io::put_le<std::uint64_t>(out, static_cast<std::uint64_t>(d.size()));
  for (Index i = 0; i < d.features.size(); ++i) io::put_le<double>(out, d.features.data()[i]);
  for (int y : d.labels) io::put_le<std::int64_t>(out, y);
}

Data read_data(std::istream& in, Index dim) {
  Data d;
  const auto rows = static_cast<Index>(io::get_le<std::uint64_t>(in));
  d.features.resize(rows, dim);
  for (Index i = 0; i < d.features.size(); ++i) d.features.data()[i] = io::get_le<double>(in);
  d.labels.resize(rows);
  for (auto& y : d.labels) y = static_cast<int>(io::get_le<std::int64_t>(in));
  return d;
}

}  // namespace

void write_shard_cache(const std::filesystem::path& path, const std::vector<ClientShard>& shards) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open " + path.string() + " for writing");
  const Index dim = shards.empty() ? 0 : shards.front().train.features.cols();
  std::map<int, const Data*> tests;
  for (const auto& s : shards) {
    if (s.test) tests.emplace(s.het_class, s.test.get());
  }
  out.write(kMagic, sizeof kMagic);
  io::put_le<std::uint64_t>(out, shards.size());
  io::put_le<std::uint64_t>(out, static_cast<std::uint64_t>(dim));
  io::put_le<std::uint64_t>(out, tests.size());
  for (const auto& [cls, data] : tests) {
    io::put_le<std::uint64_t>(out, static_cast<std::uint64_t>(cls));
    write_data(out, *data);
  }
  for (const auto& s : shards) {
    io::put_le<std::uint64_t>(out, static_cast<std::uint64_t>(s.client_id));
    io::put_le<std::uint64_t>(out, static_cast<std::uint64_t>(s.het_class));
    io::put_le<std::uint64_t>(out, static_cast<std::uint64_t>(s.samples_per_label));
    write_data(out, s.train);
  }
  if (!out) throw DataError("failed writing " + path.string());
}

std::vector<ClientShard> read_shard_cache(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  char magic[8];
  if (!in.read(magic, sizeof magic) || !std::equal(magic, magic + 8, kMagic)) {
    throw DataError(path.string() + ": not a shard cache");
  }
  const auto count = io::get_le<std::uint64_t>(in);
  const auto dim = static_cast<Index>(io::get_le<std::uint64_t>(in));
  const auto num_tests = io::get_le<std::uint64_t>(in);
  std::map<int, std::shared_ptr<const Data>> tests;
  for (std::uint64_t t = 0; t < num_tests; ++t) {
    const int cls = static_cast<int>(io::get_le<std::uint64_t>(in));
    tests[cls] = std::make_shared<const Data>(read_data(in, dim));
  }
  std::vector<ClientShard> shards(count);
  for (auto& s : shards) {
    s.client_id = static_cast<int>(io::get_le<std::uint64_t>(in));
    s.het_class = static_cast<int>(io::get_le<std::uint64_t>(in));
    s.samples_per_label = static_cast<int>(io::get_le<std::uint64_t>(in));
    s.train = read_data(in, dim);
    if (auto it = tests.find(s.het_class); it != tests.end()) s.test = it->second;
  }
  return shards;
}

}  // namespace qsfl
