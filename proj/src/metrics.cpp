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

#include "elens/metrics.hpp"

#include <cmath>
#include <set>

#include "elens/errors.hpp"

namespace elens {

double model_accuracy(const EntropyNetwork& network, const ConceptDataset& test) {
  if (test.num_samples() == 0) throw DataError("model_accuracy: empty test set");
  return label_accuracy(network.scores(test.concepts), test.targets, network.config().epsilon);
}

double class_f1(const DnfFormula& formula, const ConceptDataset& test, std::size_t class_index,
                double epsilon) {
  std::size_t tp = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < test.num_samples(); ++i) {
    const BoolVector bits = binarize_concepts(test.concepts.row(i), epsilon);
    const bool pred = evaluate_concepts(formula, bits);
    const bool truth = test.targets(i, class_index) != 0;
    if (pred && truth) ++tp;
    else if (pred) ++fp;
    else if (truth) ++fn;
  }
  const std::size_t denom = 2 * tp + fp + fn;
  return denom == 0 ? 0.0 : 2.0 * static_cast<double>(tp) / static_cast<double>(denom);
}

double explanation_accuracy(std::span<const DnfFormula> formulas, const ConceptDataset& test,
                            double epsilon) {
  if (formulas.size() != test.num_classes()) {
    throw DataError("explanation_accuracy: " + std::to_string(formulas.size()) +
                    " formulas for " + std::to_string(test.num_classes()) + " classes");
  }
  if (formulas.empty()) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < formulas.size(); ++i) acc += class_f1(formulas[i], test, i, epsilon);
  return acc / static_cast<double>(formulas.size());
}

std::size_t complexity(const DnfFormula& formula) { return literal_count(formula); }

double class_fidelity(const DnfFormula& formula, const EntropyNetwork& network,
                      const ConceptDataset& data, std::size_t class_index, double epsilon) {
  if (data.num_samples() == 0) return 0.0;
  const RealMatrix scores = network.scores(data.concepts);
  std::size_t agree = 0;
  for (std::size_t i = 0; i < data.num_samples(); ++i) {
    const BoolVector bits = binarize_concepts(data.concepts.row(i), epsilon);
    const bool model_out = scores(i, class_index) >= epsilon;
    agree += evaluate_concepts(formula, bits) == model_out ? 1 : 0;
  }
  return static_cast<double>(agree) / static_cast<double>(data.num_samples());
}

double fidelity(std::span<const DnfFormula> formulas, const EntropyNetwork& network,
                const ConceptDataset& data, double epsilon) {
  if (formulas.empty()) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < formulas.size(); ++i) {
    acc += class_fidelity(formulas[i], network, data, i, epsilon);
  }
  return acc / static_cast<double>(formulas.size());
}

ConsistencyResult consistency(const std::vector<std::vector<DnfFormula>>& per_fold) {
  if (per_fold.size() < 2) throw DataError("consistency needs at least two folds");
  const std::size_t classes = per_fold.front().size();
  for (const auto& fold : per_fold) {
    if (fold.size() != classes) throw DataError("consistency: folds disagree on class count");
  }
  ConsistencyResult out;
  if (classes == 0) return out;
  const double folds = static_cast<double>(per_fold.size());
  double total = 0.0;
  for (std::size_t c = 0; c < classes; ++c) {
    std::vector<std::set<std::string>> sets;
    std::set<std::string> all;
    for (const auto& fold : per_fold) {
      const auto names = fold[c].concept_names();
      sets.emplace_back(names.begin(), names.end());
      all.insert(names.begin(), names.end());
    }
    if (all.empty()) {
      out.empty_classes.push_back(c);
      continue;
    }
    double freq = 0.0;
    for (const auto& name : all) {
      std::size_t hits = 0;
      for (const auto& s : sets) hits += s.count(name);
      freq += static_cast<double>(hits) / folds;
    }
    total += freq / static_cast<double>(all.size());
  }
  out.percentage = 100.0 * total / static_cast<double>(classes);
  return out;
}

MeanSem mean_and_sem(std::span<const double> values) {
  MeanSem out;
  if (values.empty()) return out;
  const double n = static_cast<double>(values.size());
  for (double v : values) out.mean += v;
  out.mean /= n;
  if (values.size() < 2) return out;
  double ss = 0.0;
  for (double v : values) ss += (v - out.mean) * (v - out.mean);
  out.sem = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  return out;
}

}  // namespace elens
