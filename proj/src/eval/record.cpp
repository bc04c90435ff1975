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

#include "qsfl/eval/record.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "qsfl/error.hpp"
#include "qsfl/random.hpp"

namespace qsfl {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

json algo_to_json(const AlgoConfig& a) {
  return {
      {"algorithm", to_string(a.algorithm)},
      {"num_clusters", a.num_clusters},
      {"rounds", a.rounds},
      {"clustering_round", a.clustering_round},
      {"ifca_restarts", a.ifca_restarts},
      {"ifca_selection", a.ifca_selection == IfcaSelection::kTrainAccuracy ? "train_accuracy"
                                                                            : "train_loss"},
      {"prox_mu", a.prox_mu},
      {"trim_fraction", a.trim_fraction},
      {"srfca_quantile_low", a.srfca_quantile_low},
      {"srfca_quantile_high", a.srfca_quantile_high},
      {"srfca_grid_points", a.srfca_grid_points},
      {"edc_directions", a.edc_directions},
      {"kmeans_max_iter", a.kmeans_max_iter},
      {"layer_sizes", a.layer_sizes},
      {"local_epochs", a.train.local_epochs},
      {"learning_rate", a.train.learning_rate},
      {"batch_size", a.train.batch_size},
      {"seed", a.seed},
      {"stream", a.stream},
  };
}

AlgoConfig algo_from_json(const json& j) {
  AlgoConfig a;
  a.algorithm = parse_algorithm(j.at("algorithm").get<std::string>());
  a.num_clusters = j.at("num_clusters").get<int>();
  a.rounds = j.at("rounds").get<int>();
  a.clustering_round = j.at("clustering_round").get<int>();
  a.ifca_restarts = j.at("ifca_restarts").get<int>();
  a.ifca_selection = j.at("ifca_selection").get<std::string>() == "train_loss"
                         ? IfcaSelection::kTrainLoss
                         : IfcaSelection::kTrainAccuracy;
  a.prox_mu = j.at("prox_mu").get<double>();
  a.trim_fraction = j.at("trim_fraction").get<double>();
  a.srfca_quantile_low = j.at("srfca_quantile_low").get<double>();
  a.srfca_quantile_high = j.at("srfca_quantile_high").get<double>();
  a.srfca_grid_points = j.at("srfca_grid_points").get<int>();
  a.edc_directions = j.at("edc_directions").get<int>();
  a.kmeans_max_iter = j.at("kmeans_max_iter").get<int>();
  a.layer_sizes = j.at("layer_sizes").get<std::vector<Index>>();
  a.train.local_epochs = j.at("local_epochs").get<int>();
  a.train.learning_rate = j.at("learning_rate").get<double>();
  a.train.batch_size = j.at("batch_size").get<int>();
  a.seed = j.at("seed").get<std::uint64_t>();
  a.stream = j.at("stream").get<std::uint64_t>();
  return a;
}

json scenario_to_json(const ScenarioSpec& s) {
  return {
      {"dataset", s.dataset},
      {"heterogeneity", to_string(s.heterogeneity)},
      {"het_variant", s.het_variant},
      {"qs", to_string(s.qs)},
      {"num_clients", s.num_clients},
      {"het_classes", s.het_classes},
      {"samples_per_label", s.samples_per_label},
      {"qs_group_sizes", s.qs_group_sizes},
      {"permute_qs2", s.permute_qs2},
      {"algo", algo_to_json(s.algo)},
  };
}

ScenarioSpec scenario_from_json(const json& j) {
  ScenarioSpec s;
  s.dataset = j.at("dataset").get<std::string>();
  s.heterogeneity = parse_heterogeneity(j.at("heterogeneity").get<std::string>());
  s.het_variant = j.at("het_variant").get<std::string>();
  s.qs = parse_qs(j.at("qs").get<std::string>());
  s.num_clients = j.at("num_clients").get<int>();
  s.het_classes = j.at("het_classes").get<int>();
  s.samples_per_label = j.at("samples_per_label").get<int>();
  s.qs_group_sizes = j.at("qs_group_sizes").get<std::vector<int>>();
  s.permute_qs2 = j.at("permute_qs2").get<bool>();
  s.algo = algo_from_json(j.at("algo"));
  return s;
}

ordered_json trace_to_json(const AlgoTrace& t) {
  ordered_json rounds = ordered_json::array();
  for (const auto& r : t.rounds) {
    rounds.push_back({{"round", r.round},
                      {"phase", to_string(r.phase)},
                      {"assignment", r.assignment},
                      {"mean_train_loss", r.mean_train_loss},
                      {"cluster_norms", r.cluster_norms},
                      {"empty_clusters", r.empty_clusters}});
  }
  return {{"rounds", rounds},
          {"notes", t.notes},
          {"selected_restart", t.selected_restart},
          {"srfca_threshold", t.srfca_threshold}};
}

Phase parse_phase(const std::string& s) {
  for (Phase p : {Phase::kTrain, Phase::kColdStart, Phase::kInit, Phase::kCorn, Phase::kLossCfl,
                  Phase::kFedAvgCfl, Phase::kRefine}) {
    if (s == to_string(p)) return p;
  }
  throw DataError("unknown trace phase '" + s + "'");
}

AlgoTrace trace_from_json(const json& j) {
  AlgoTrace t;
  for (const auto& r : j.at("rounds")) {
    RoundTrace rt;
    rt.round = r.at("round").get<int>();
    rt.phase = parse_phase(r.at("phase").get<std::string>());
    rt.assignment = r.at("assignment").get<std::vector<int>>();
    rt.mean_train_loss = r.at("mean_train_loss").get<double>();
    rt.cluster_norms = r.at("cluster_norms").get<std::vector<double>>();
    rt.empty_clusters = r.at("empty_clusters").get<std::vector<int>>();
    t.rounds.push_back(std::move(rt));
  }
  t.notes = j.at("notes").get<std::vector<std::string>>();
  t.selected_restart = j.at("selected_restart").get<int>();
  t.srfca_threshold = j.at("srfca_threshold").get<double>();
  return t;
}

}  // namespace

HeterogeneitySpec ScenarioSpec::heterogeneity_spec(int num_labels) const {
  return HeterogeneitySpec::preset(heterogeneity, het_classes, num_labels, het_variant);
}

QsSpec ScenarioSpec::qs_spec() const {
  QsSpec q;
  q.kind = qs;
  q.samples_per_label_nonqs = samples_per_label;
  q.group_sizes = qs_group_sizes;
  q.permute_qs2 = permute_qs2;
  return q;
}

// Every algorithm and cluster count of a (dataset, scenario, seed) sees the
// same client data.
std::uint64_t ScenarioSpec::partition_seed() const { return derive_seed(algo.seed, "partition"); }

std::string scenario_json(const ScenarioSpec& s) { return scenario_to_json(s).dump(); }

ScenarioSpec parse_scenario_json(const std::string& text) {
  try {
    return scenario_from_json(json::parse(text));
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed scenario: ") + e.what());
  }
}

std::uint64_t cell_hash(const ScenarioSpec& s) { return fnv1a64(scenario_json(s)); }

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string scenario_key(const ScenarioSpec& s, bool drop_algorithm, bool drop_qs) {
  json j = scenario_to_json(s);
  if (drop_algorithm) j["algo"].erase("algorithm");
  if (drop_qs) j.erase("qs");
  return j.dump();
}

std::string record_json(const RunRecord& r) {
  ordered_json j;
  j["status"] = r.status;
  j["error"] = r.error;
  j["config_hash"] = r.config_hash;
  j["scenario"] = scenario_to_json(r.scenario);
  j["het_class"] = r.het_class;
  j["samples_per_label"] = r.samples_per_label;
  j["per_client_accuracy"] = r.per_client_accuracy;
  j["final_assignment"] = r.final_assignment;
  j["num_clusters_effective"] = r.num_clusters_effective;
  j["ari"] = r.ari;
  j["model_digest"] = r.model_digest;
  j["trace_digest"] = r.trace_digest;
  j["trace"] = trace_to_json(r.trace);
  return j.dump(1) + "\n";
}

RunRecord parse_record(const std::string& text) {
  try {
    const json j = json::parse(text);
    RunRecord r;
    r.status = j.at("status").get<std::string>();
    r.error = j.at("error").get<std::string>();
    r.config_hash = j.at("config_hash").get<std::string>();
    r.scenario = scenario_from_json(j.at("scenario"));
    r.het_class = j.at("het_class").get<std::vector<int>>();
    r.samples_per_label = j.at("samples_per_label").get<std::vector<int>>();
    r.per_client_accuracy = j.at("per_client_accuracy").get<std::vector<double>>();
    r.final_assignment = j.at("final_assignment").get<std::vector<int>>();
    r.num_clusters_effective = j.at("num_clusters_effective").get<int>();
    r.ari = j.at("ari").get<double>();
    r.model_digest = j.at("model_digest").get<std::string>();
    r.trace_digest = j.at("trace_digest").get<std::string>();
    r.trace = trace_from_json(j.at("trace"));
    return r;
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed run record: ") + e.what());
  }
}

void write_record(const std::filesystem::path& path, const RunRecord& r) {
  std::filesystem::create_directories(path.parent_path());
  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << record_json(r);
    if (!out) throw DataError("cannot write " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

RunRecord read_record(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_record(ss.str());
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

std::filesystem::path record_relpath(const ScenarioSpec& s) {
  return std::filesystem::path("runs") / s.dataset / std::string(to_string(s.heterogeneity)) /
         std::string(to_string(s.qs)) / ("K" + std::to_string(s.algo.num_clusters)) /
         std::string(to_string(s.algo.algorithm)) /
         ("seed" + std::to_string(s.algo.seed) + ".json");
}

std::string trace_digest(const AlgoTrace& t) { return hex64(fnv1a64(trace_to_json(t).dump())); }

std::string model_digest(std::span<const Model> models) {
  std::string bytes;
  for (const auto& m : models) {
    for (Index k = 0; k < m.num_params(); ++k) {
      const auto bits = std::bit_cast<std::uint64_t>(m.values()[k]);
      for (int b = 0; b < 8; ++b) bytes.push_back(static_cast<char>((bits >> (8 * b)) & 0xff));
    }
  }
  return hex64(fnv1a64(bytes));
}

}  // namespace qsfl
