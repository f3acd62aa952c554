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

// Per-class entropy-gated input layer.
//
// For one head with weight matrix W (hidden x k) and temperature tau:
//
//   gamma_j       = sum_h |W(h, j)|                    concept relevance
//   alpha         = softmax(gamma / tau)               competition among concepts
//   alpha_tilde_j = alpha_j / max_u alpha_u            gate, max entry exactly 1
//   h             = W (c * alpha_tilde) + b
//
// The explanation path thresholds both alpha_tilde (mask mu) and the
// concepts themselves at epsilon and keeps only the masked positions.

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "elens/core_math.hpp"
#include "elens/dataset.hpp"

namespace elens {

struct EntropyHead {
  std::size_t class_index = 0;
  RealMatrix weights;  // hidden x k
  RealVector bias;     // hidden
  double tau = 1.0;

  std::size_t num_concepts() const noexcept { return weights.cols(); }
  std::size_t hidden_units() const noexcept { return weights.rows(); }

  /// Throws DimensionError / ConfigError when the head is malformed.
  void validate() const;
};

struct ConceptScores {
  RealVector gamma;
  RealVector alpha;
  RealVector alpha_tilde;
};

struct BooleanMask {
  BoolVector mu;
  double epsilon = 0.5;

  std::size_t popcount() const noexcept;
};

/// Empirical truth table of one class: masked boolean concepts next to the
/// thresholded model output. Rows may repeat or contradict each other.
struct TruthTable {
  std::size_t class_index = 0;
  std::vector<std::size_t> kept_concepts;  // original indices, ascending
  std::vector<std::string> concept_names;  // names of kept concepts
  BoolMatrix rows;                         // n x kept_concepts.size()
  BoolVector outputs;                      // n

  /// No concept survived the mask; extraction cannot produce minterms.
  bool empty_mask() const noexcept { return kept_concepts.empty(); }
  /// Every input concept was kept (no concept dropped by the mask).
  bool all_concepts_kept = false;
};

ConceptScores compute_scores(const EntropyHead& head);

/// mu_j = alpha_tilde_j >= epsilon.
BooleanMask compute_mask(const ConceptScores& scores, double epsilon);

/// c * alpha_tilde. Throws DimensionError on length mismatch and DataError
/// when an entry of c lies outside [0,1].
RealVector gate_input(std::span<const double> c, const ConceptScores& scores);

struct HeadOutput {
  RealVector hidden;
  ConceptScores scores;
};

HeadOutput head_forward(std::span<const double> c, const EntropyHead& head);

/// Indicator c_j >= epsilon (inclusive).
BoolVector binarize_concepts(std::span<const double> c, double epsilon);

/// Entries of c_bar at positions where the mask is set, original order kept.
BoolVector subselect(std::span<const std::uint8_t> c_bar, const BooleanMask& mask);

/// Stacks subselect(binarize(c)) for every dataset row next to
/// class_scores[row] >= epsilon. class_scores holds the model's per-class
/// score in [0,1] for `class_index`, one entry per row.
TruthTable build_truth_table(const ConceptDataset& dataset, std::span<const double> class_scores,
                             const BooleanMask& mask, std::size_t class_index);

}  // namespace elens
