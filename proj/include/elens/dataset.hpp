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

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "elens/core_math.hpp"

namespace elens {

/// Concept activations in [0,1]^k with named concepts and binary targets over r classes.
struct ConceptDataset {
  RealMatrix concepts;  // n x k
  std::vector<std::string> concept_names;
  BoolMatrix targets;  // n x r
  std::vector<std::string> class_names;
  std::string provenance;

  std::size_t num_samples() const noexcept { return concepts.rows(); }
  std::size_t num_concepts() const noexcept { return concepts.cols(); }
  std::size_t num_classes() const noexcept { return targets.cols(); }

  /// True when every row has exactly one positive target.
  bool single_label() const noexcept;

  /// Index of the first positive target of row i (0 when none).
  std::size_t label(std::size_t i) const noexcept;

  /// Throws DataError on shape mismatches or concepts outside [0,1].
  void validate() const;

  /// Rows selected by `indices`, in that order.
  ConceptDataset subset(std::span<const std::size_t> indices) const;
};

}  // namespace elens
