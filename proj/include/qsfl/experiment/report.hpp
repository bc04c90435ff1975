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
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qsfl/eval/record.hpp"

namespace qsfl {

enum class ReportKind { kTables, kDeltaHeatmap, kWinrate, kRank, kSensitivity };

std::string_view to_string(ReportKind k);  // "tables", "delta_heatmap", ...
ReportKind parse_report_kind(std::string_view s);
std::vector<ReportKind> all_report_kinds();

// Every record under out_dir/runs, in path order. An empty store is a
// DataError.
std::vector<RunRecord> load_store(const std::filesystem::path& out_dir);

// CSV text with one header row. Numeric columns carry full precision and
// each table has 2-decimal display columns.
std::string report_csv(std::span<const RunRecord> records, ReportKind kind);

// Writes out_dir/reports/<kind>.csv and returns its path.
std::filesystem::path write_report(const std::filesystem::path& out_dir,
                                   std::span<const RunRecord> records, ReportKind kind);

}  // namespace qsfl
