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

// Evaluation measures for extracted explanations and fold-level aggregation.

#pragma once

#include <chrono>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "elens/dataset.hpp"
#include "elens/logic.hpp"
#include "elens/network.hpp"

namespace elens {

struct ClassExplanationResult {
  std::size_t class_index = 0;
  DnfFormula formula;
  double f1_on_test = 0.0;
  std::size_t complexity = 0;  // literal occurrences
  std::size_t minterms = 0;
  double fidelity = 0.0;
};

/// Fraction of samples whose argmax prediction is a true target (per-entry
/// match for multi-label data). Throws DataError on an empty set.
double model_accuracy(const EntropyNetwork& network, const ConceptDataset& test);

/// One-vs-rest F1 of `formula` against class membership; 0 when undefined.
double class_f1(const DnfFormula& formula, const ConceptDataset& test, std::size_t class_index,
                double epsilon);

/// Unweighted mean of the per-class F1. formulas[i] explains class i;
/// throws DataError when a class has no formula.
double explanation_accuracy(std::span<const DnfFormula> formulas, const ConceptDataset& test,
                            double epsilon);

/// Literal occurrences of the standardized DNF; 0 for True/False.
std::size_t complexity(const DnfFormula& formula);

/// Agreement between formula(c) and the thresholded model output for one class.
double class_fidelity(const DnfFormula& formula, const EntropyNetwork& network,
                      const ConceptDataset& data, std::size_t class_index, double epsilon);

/// Mean class_fidelity over all classes.
double fidelity(std::span<const DnfFormula> formulas, const EntropyNetwork& network,
                const ConceptDataset& data, double epsilon);

struct ExtractionTime {
  double train_seconds = 0.0;
  double extract_seconds = 0.0;
  double total() const noexcept { return train_seconds + extract_seconds; }
};

/// Wall-clock of `train_fn` and `extract_fn` run in that order.
template <typename TrainFn, typename ExtractFn>
ExtractionTime extraction_time(TrainFn&& train_fn, ExtractFn&& extract_fn) {
  using Clock = std::chrono::steady_clock;
  ExtractionTime t;
  const auto t0 = Clock::now();
  train_fn();
  const auto t1 = Clock::now();
  extract_fn();
  const auto t2 = Clock::now();
  t.train_seconds = std::chrono::duration<double>(t1 - t0).count();
  t.extract_seconds = std::chrono::duration<double>(t2 - t1).count();
  return t;
}

struct ConsistencyResult {
  double percentage = 0.0;
  /// Classes whose formula is False in every fold; they contribute 0.
  std::vector<std::size_t> empty_classes;
};

/// per_fold[f][i] is the formula of class i in fold f. For each class, every
/// concept seen in any fold scores (#folds containing it) / #folds; the class
/// score is the mean over those concepts and the result the mean over
/// classes, as a percentage. Needs at least two folds.
ConsistencyResult consistency(const std::vector<std::vector<DnfFormula>>& per_fold);

struct MeanSem {
  double mean = 0.0;
  double sem = 0.0;  // sample standard deviation / sqrt(n)

  bool operator==(const MeanSem&) const = default;
};

MeanSem mean_and_sem(std::span<const double> values);

}  // namespace elens
