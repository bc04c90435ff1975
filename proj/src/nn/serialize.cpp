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

#include "qsfl/nn/serialize.hpp"

#include <fstream>

#include "qsfl/binary_io.hpp"

namespace qsfl {

void write_model(std::ostream& out, const Model& model) {
  io::put_le<std::uint64_t>(out, model.sizes().size());
  for (Index s : model.sizes()) io::put_le<std::uint64_t>(out, static_cast<std::uint64_t>(s));
  for (Index i = 0; i < model.num_params(); ++i) io::put_le<double>(out, model.values()[i]);
}

Model read_model(std::istream& in) {
  const auto count = io::get_le<std::uint64_t>(in);
  if (count < 2 || count > 64) throw DataError("model header has an invalid layer count");
  std::vector<Index> sizes(count);
  for (auto& s : sizes) s = static_cast<Index>(io::get_le<std::uint64_t>(in));
  Model model(std::move(sizes));
  for (Index i = 0; i < model.num_params(); ++i) model.values()[i] = io::get_le<double>(in);
  return model;
}

void save_model(const std::filesystem::path& path, const Model& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open " + path.string() + " for writing");
  write_model(out, model);
}

Model load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  return read_model(in);
}

}  // namespace qsfl
