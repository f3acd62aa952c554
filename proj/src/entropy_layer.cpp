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

#include "elens/entropy_layer.hpp"

#include <algorithm>
#include <string>

#include "elens/errors.hpp"

namespace elens {

void EntropyHead::validate() const {
  if (bias.size() != weights.rows()) {
    throw DimensionError("entropy head " + std::to_string(class_index) + ": bias length " +
                         std::to_string(bias.size()) + " != hidden units " +
                         std::to_string(weights.rows()));
  }
  if (!(tau > 0.0)) {
    throw ConfigError("entropy head " + std::to_string(class_index) +
                      ": temperature must be positive");
  }
}

std::size_t BooleanMask::popcount() const noexcept {
  return static_cast<std::size_t>(std::count(mu.begin(), mu.end(), std::uint8_t{1}));
}

ConceptScores compute_scores(const EntropyHead& head) {
  ConceptScores s;
  s.gamma.resize(head.num_concepts());
  for (std::size_t j = 0; j < head.num_concepts(); ++j) s.gamma[j] = l1_column_norm(head.weights, j);
  s.alpha = softmax_with_temperature(s.gamma, head.tau);
  s.alpha_tilde.resize(s.alpha.size());
  if (!s.alpha.empty()) {
    // softmax keeps every entry strictly positive, so the max is never zero.
    const double amax = *std::max_element(s.alpha.begin(), s.alpha.end());
    for (std::size_t j = 0; j < s.alpha.size(); ++j) s.alpha_tilde[j] = s.alpha[j] / amax;
  }
  return s;
}

BooleanMask compute_mask(const ConceptScores& scores, double epsilon) {
  BooleanMask m;
  m.epsilon = epsilon;
  m.mu = binarize_concepts(scores.alpha_tilde, epsilon);
  return m;
}

RealVector gate_input(std::span<const double> c, const ConceptScores& scores) {
  if (c.size() != scores.alpha_tilde.size()) {
    throw DimensionError("gate_input: input has " + std::to_string(c.size()) +
                         " concepts, head expects " + std::to_string(scores.alpha_tilde.size()));
  }
  RealVector out(c.size());
  for (std::size_t j = 0; j < c.size(); ++j) {
    if (!(c[j] >= 0.0 && c[j] <= 1.0)) {
      throw DataError("gate_input: concept " + std::to_string(j) + " = " + std::to_string(c[j]) +
                      " is outside [0,1]");
    }
    out[j] = c[j] * scores.alpha_tilde[j];
  }
  return out;
}

HeadOutput head_forward(std::span<const double> c, const EntropyHead& head) {
  HeadOutput out;
  out.scores = compute_scores(head);
  out.hidden = affine(head.weights, gate_input(c, out.scores), head.bias);
  return out;
}

BoolVector binarize_concepts(std::span<const double> c, double epsilon) {
  BoolVector out(c.size());
  for (std::size_t j = 0; j < c.size(); ++j) out[j] = c[j] >= epsilon ? 1 : 0;
  return out;
}

BoolVector subselect(std::span<const std::uint8_t> c_bar, const BooleanMask& mask) {
  if (c_bar.size() != mask.mu.size()) {
    throw DimensionError("subselect: vector length " + std::to_string(c_bar.size()) +
                         " != mask length " + std::to_string(mask.mu.size()));
  }
  BoolVector out;
  out.reserve(mask.popcount());
  for (std::size_t j = 0; j < c_bar.size(); ++j) {
    if (mask.mu[j]) out.push_back(c_bar[j]);
  }
  return out;
}

TruthTable build_truth_table(const ConceptDataset& dataset, std::span<const double> class_scores,
                             const BooleanMask& mask, std::size_t class_index) {
  if (mask.mu.size() != dataset.num_concepts()) {
    throw DimensionError("build_truth_table: mask covers " + std::to_string(mask.mu.size()) +
                         " concepts, dataset has " + std::to_string(dataset.num_concepts()));
  }
  if (class_scores.size() != dataset.num_samples()) {
    throw DimensionError("build_truth_table: " + std::to_string(class_scores.size()) +
                         " scores for " + std::to_string(dataset.num_samples()) + " samples");
  }
  TruthTable t;
  t.class_index = class_index;
  for (std::size_t j = 0; j < mask.mu.size(); ++j) {
    if (mask.mu[j]) {
      t.kept_concepts.push_back(j);
      t.concept_names.push_back(dataset.concept_names[j]);
    }
  }
  t.all_concepts_kept = t.kept_concepts.size() == dataset.num_concepts();
  t.rows = BoolMatrix(dataset.num_samples(), t.kept_concepts.size());
  t.outputs.resize(dataset.num_samples());
  for (std::size_t i = 0; i < dataset.num_samples(); ++i) {
    const auto c = dataset.concepts.row(i);
    auto row = t.rows.row(i);
    for (std::size_t z = 0; z < t.kept_concepts.size(); ++z) {
      row[z] = c[t.kept_concepts[z]] >= mask.epsilon ? 1 : 0;
    }
    t.outputs[i] = class_scores[i] >= mask.epsilon ? 1 : 0;
  }
  return t;
}

}  // namespace elens
