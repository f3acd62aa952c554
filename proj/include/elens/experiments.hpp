// Copyright 2026 The entropy-lens Authors. All Rights Reserved.
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

// Experiment configuration, k-fold cross-validation, grid sweeps and reports.

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "elens/dataset.hpp"
#include "elens/logic.hpp"
#include "elens/metrics.hpp"
#include "elens/network.hpp"

namespace elens {

enum class DatasetKind { kCsv, kToy, kParity };

struct DatasetSpec {
  DatasetKind kind = DatasetKind::kToy;
  std::string path;                  // kCsv
  std::vector<std::string> targets;  // kCsv
  bool discretize = false;           // kCsv
  std::size_t pad = 100;             // kToy
  std::size_t samples = 2000;        // kParity
  double noise = 0.0;                // kParity
  std::uint64_t seed = 0;            // kParity
};

struct ExperimentConfig {
  std::string preset;  // empty when none
  std::uint64_t seed = 0;
  DatasetSpec dataset;
  TrainConfig train;
  std::size_t folds = 5;
  bool stratified = true;
  double validation_fraction = 0.2;
  std::size_t qm_var_limit = kDefaultQmVarLimit;
  std::string output_dir = "out";
  /// Wall-clock times go into the report only when set; otherwise they are
  /// written to a separate timing file so report JSON stays reproducible.
  bool record_timing = false;
  /// Upper bound on folds (or grid points) trained concurrently.
  std::size_t threads = 1;

  void validate() const;
};

/// Dataset + training defaults of a named preset ("toy", "parity"/"mnist").
ExperimentConfig experiment_preset(std::string_view name);

/// Parses the flat TOML-style config: optional top-level `preset` and `seed`,
/// then sections [dataset], [train], [extract], [output]. Unknown keys or
/// sections are a ConfigError. A preset, when given, is applied before the
/// remaining keys.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);

nlohmann::json config_to_json(const ExperimentConfig& config);
nlohmann::json train_config_to_json(const TrainConfig& config);
TrainConfig train_config_from_json(const nlohmann::json& j);

/// Builds (or loads) the dataset described by `spec`.
ConceptDataset materialize_dataset(const DatasetSpec& spec);

/// Assigns every row to one of k folds. Stratified: rows are grouped by their
/// target pattern, each group shuffled with `seed`, then dealt round-robin
/// so each fold receives floor or ceil of every group's share.
std::vector<std::vector<std::size_t>> make_folds(const BoolMatrix& targets, std::size_t k,
                                                 std::uint64_t seed, bool stratified = true);

/// Per-class explanation of one trained network: truth table from
/// `extraction_set`, greedy aggregation against `validation_set`, then
/// Quine-McCluskey. Classes without positive rows in the extraction set get False.
std::vector<DnfFormula> explain_classes(const EntropyNetwork& network,
                                        const ConceptDataset& extraction_set,
                                        const ConceptDataset& validation_set, double epsilon,
                                        std::size_t qm_var_limit,
                                        std::vector<std::string>* warnings = nullptr);

struct SingleRun {
  ConceptDataset train_set;
  ConceptDataset validation_set;
  TrainResult result;
  std::vector<DnfFormula> formulas;
  std::vector<std::string> warnings;
};

/// One network on the whole dataset: a stratified validation slice is split
/// off with derive_seed(seed, 1), the network is initialized from
/// derive_seed(seed, 2), trained and explained.
SingleRun train_single(const ExperimentConfig& config, const ConceptDataset& dataset);

struct ClassReport {
  std::string name;
  std::string formula;  // ascii grammar
  double f1 = 0.0;
  std::size_t complexity_literals = 0;
  std::size_t complexity_minterms = 0;
  double fidelity = 0.0;

  bool operator==(const ClassReport&) const = default;
};

struct FoldReport {
  std::uint64_t seed = 0;
  std::size_t train_size = 0;
  std::size_t validation_size = 0;
  std::size_t test_size = 0;
  double model_accuracy = 0.0;
  double explanation_accuracy = 0.0;
  double fidelity = 0.0;
  std::vector<ClassReport> per_class;
  std::optional<double> time_train_s;
  std::optional<double> time_extract_s;

  bool operator==(const FoldReport&) const = default;
};

struct ExplanationReport {
  nlohmann::json config_echo;
  std::vector<FoldReport> folds;
  std::map<std::string, MeanSem> aggregate;  // metric name -> mean and standard error
  double consistency = 0.0;                  // percentage
  std::vector<std::string> diagnostics;

  bool operator==(const ExplanationReport&) const = default;
};

nlohmann::json report_to_json(const ExplanationReport& report);
ExplanationReport report_from_json(const nlohmann::json& j);

/// Aggregate table in Markdown (rates as percentages).
std::string report_markdown(const ExplanationReport& report);

struct FoldArtifacts {
  EntropyNetwork network;
  std::vector<DnfFormula> formulas;
  ExtractionTime time;
};

struct CrossvalOutcome {
  ExplanationReport report;
  std::vector<FoldArtifacts> artifacts;
};

/// Stratified k-fold cross-validation: per fold, a seeded validation slice is
/// split off the training portion, a network is trained and explained, and
/// the metrics are computed on the held-out fold. Consistency is measured
/// across folds. Folds run on up to config.threads threads; results do not
/// depend on the thread count.
CrossvalOutcome crossval(const ExperimentConfig& config, const ConceptDataset& dataset);
CrossvalOutcome crossval(const ExperimentConfig& config);

struct GridRow {
  double lambda = 0.0;
  double tau = 0.0;
  MeanSem model_accuracy;
  MeanSem explanation_accuracy;
  MeanSem complexity;

  bool operator==(const GridRow&) const = default;
};

struct GridReport {
  nlohmann::json config_echo;
  std::vector<GridRow> rows;  // lambda-major order
};

/// One crossval per (lambda, tau) pair. Throws ConfigError on empty grids.
GridReport grid_sweep(const ExperimentConfig& config, std::span<const double> lambdas,
                      std::span<const double> taus);

nlohmann::json grid_to_json(const GridReport& report);
std::string grid_markdown(const GridReport& report);

}  // namespace elens
