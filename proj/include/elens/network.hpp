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

// Multi-head entropy network: one independent sub-network per class whose
// first layer is an entropy head, followed by dense hidden layers and a
// single scalar output unit.

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "elens/core_math.hpp"
#include "elens/dataset.hpp"
#include "elens/entropy_layer.hpp"

namespace elens {

enum class RegularizerKind { kEntropy, kL1, kNone };

/// kAuto resolves to softmax cross-entropy on single-label data and to
/// per-class binary cross-entropy on multi-label data.
enum class TaskLoss { kAuto, kSoftmaxCrossEntropy, kBinaryCrossEntropy };

struct TrainConfig {
  double lambda = 1e-4;
  double tau = 1.0;
  double learning_rate = 1e-2;
  std::size_t max_epochs = 200;
  double epsilon = 0.5;
  RegularizerKind regularizer = RegularizerKind::kEntropy;
  std::uint64_t seed = 0;
  bool early_stopping = true;
  double weight_decay = 0.0;
  std::vector<std::size_t> hidden_units{10};
  Activation activation = Activation::kLeakyRelu;
  double leaky_slope = 0.01;
  TaskLoss task_loss = TaskLoss::kAuto;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_epsilon = 1e-8;

  /// Throws ConfigError on illegal values.
  void validate() const;
};

/// Named hyperparameter sets: "toy", "parity" (alias "mnist"), "mimic", "vdem", "cub".
TrainConfig train_preset(std::string_view name);

std::string to_string(RegularizerKind kind);
RegularizerKind regularizer_from_string(std::string_view s);
std::string to_string(TaskLoss kind);
TaskLoss task_loss_from_string(std::string_view s);
std::string to_string(Activation kind);
Activation activation_from_string(std::string_view s);

struct DenseLayer {
  RealMatrix weights;  // out x in
  RealVector bias;     // out
};

/// Sub-network of one class. trunk.back() is the scalar output unit.
struct ClassNetwork {
  EntropyHead head;
  std::vector<DenseLayer> trunk;
};

class EntropyNetwork {
 public:
  EntropyNetwork() = default;
  EntropyNetwork(std::vector<ClassNetwork> classes, TrainConfig config);

  /// Fan-in scaled uniform initialization U(-1/sqrt(fan_in), 1/sqrt(fan_in))
  /// for every weight and bias, drawn from config.seed.
  static EntropyNetwork initialize(std::size_t num_concepts, std::size_t num_classes,
                                   const TrainConfig& config);

  std::size_t num_classes() const noexcept { return classes_.size(); }
  std::size_t num_concepts() const noexcept;
  const TrainConfig& config() const noexcept { return config_; }
  const std::vector<ClassNetwork>& classes() const noexcept { return classes_; }
  std::vector<ClassNetwork>& classes() noexcept { return classes_; }

  /// Raw scalar outputs, n x r.
  RealMatrix logits(const RealMatrix& concepts) const;
  /// sigmoid(logits), n x r.
  RealMatrix scores(const RealMatrix& concepts) const;

  ConceptScores concept_scores(std::size_t class_index) const;

  std::size_t parameter_count() const noexcept;
  /// Parameters in a fixed order: per class, head W, head b, then each trunk W, b.
  std::vector<double> flatten() const;
  void assign(std::span<const double> params);

  bool operator==(const EntropyNetwork& other) const;

 private:
  std::vector<ClassNetwork> classes_;
  TrainConfig config_;
};

struct Prediction {
  RealVector scores;   // sigmoid of each class output
  std::size_t label = 0;  // argmax of scores
  BoolVector outputs;  // scores >= epsilon
};

Prediction predict(const EntropyNetwork& network, std::span<const double> concepts);

/// Truth table of `class_index` over `dataset`, masked by the trained head.
TruthTable build_truth_table(const ConceptDataset& dataset, const EntropyNetwork& network,
                             std::size_t class_index, double epsilon);

/// Label accuracy: argmax match on single-label targets, per-entry match of
/// (score >= epsilon) on multi-label targets.
double label_accuracy(const RealMatrix& scores, const BoolMatrix& targets, double epsilon);

// ---- loss ----------------------------------------------------------------

/// -sum alpha_j ln alpha_j with 0 ln 0 = 0.
double entropy_of_distribution(std::span<const double> alpha);

struct LossBreakdown {
  double total = 0.0;
  double task = 0.0;
  double regularizer = 0.0;
};

TaskLoss resolve_task_loss(TaskLoss requested, const BoolMatrix& targets);

/// Task loss (mean over samples) plus lambda times the regularizer summed
/// over class heads. `loss_kind` must already be resolved (not kAuto).
LossBreakdown total_loss(const RealMatrix& logits, const BoolMatrix& targets,
                         std::span<const ConceptScores> scores, const TrainConfig& config,
                         TaskLoss loss_kind);

struct LossAndGradient {
  LossBreakdown loss;
  RealMatrix logits;
  std::vector<double> gradient;  // same layout as EntropyNetwork::flatten()
};

/// Forward pass plus exact reverse-mode gradient of total_loss, including the
/// path through the gate (gamma -> alpha -> alpha_tilde) and the regularizer.
/// Regularization settings (lambda, regularizer) come from `config`; the
/// architecture (activation, temperature) from the network itself.
LossAndGradient backward(const EntropyNetwork& network, const RealMatrix& concepts,
                         const BoolMatrix& targets, const TrainConfig& config,
                         TaskLoss loss_kind);

// ---- optimization --------------------------------------------------------

/// Adam with decoupled weight decay over a flat parameter vector.
class AdamW {
 public:
  AdamW(std::size_t size, double learning_rate, double beta1 = 0.9, double beta2 = 0.999,
        double epsilon = 1e-8, double weight_decay = 0.0);

  void step(std::span<double> params, std::span<const double> grads);
  std::size_t steps() const noexcept { return step_; }

 private:
  double lr_, beta1_, beta2_, eps_, weight_decay_;
  std::size_t step_ = 0;
  std::vector<double> m_, v_;
};

struct EpochRecord {
  double total_loss = 0.0;
  double task_loss = 0.0;
  double regularizer = 0.0;
  double train_accuracy = 0.0;
  double validation_accuracy = 0.0;
};

struct TrainHistory {
  std::vector<EpochRecord> epochs;
  /// Latest epoch with the highest validation accuracy.
  std::optional<std::size_t> best_epoch;
  /// Parameters returned are those recorded at best_epoch (early stopping).
  bool restored_best = false;
};

struct TrainResult {
  EntropyNetwork network;
  TrainHistory history;
};

/// Full-batch AdamW for config.max_epochs epochs. Validation accuracy is
/// measured after every update; with early stopping the best parameters are
/// restored. An empty validation set falls back to the training set. The
/// returned network carries `config`.
/// Throws TrainingError when the loss becomes non-finite.
TrainResult train(EntropyNetwork network, const ConceptDataset& train_set,
                  const ConceptDataset& validation_set, const TrainConfig& config);

}  // namespace elens
