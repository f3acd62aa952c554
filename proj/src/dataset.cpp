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

#include "elens/dataset.hpp"

#include <algorithm>
#include <cmath>

#include "elens/errors.hpp"

namespace elens {

bool ConceptDataset::single_label() const noexcept {
  for (std::size_t i = 0; i < targets.rows(); ++i) {
    std::size_t hot = 0;
    for (auto t : targets.row(i)) hot += t ? 1 : 0;
    if (hot != 1) return false;
  }
  return true;
}

std::size_t ConceptDataset::label(std::size_t i) const noexcept {
  const auto row = targets.row(i);
  for (std::size_t c = 0; c < row.size(); ++c) {
    if (row[c]) return c;
  }
  return 0;
}

void ConceptDataset::validate() const {
  if (concept_names.size() != concepts.cols()) {
    throw DataError("dataset has " + std::to_string(concepts.cols()) + " concept columns but " +
                    std::to_string(concept_names.size()) + " names");
  }
  if (class_names.size() != targets.cols()) {
    throw DataError("dataset has " + std::to_string(targets.cols()) + " target columns but " +
                    std::to_string(class_names.size()) + " class names");
  }
  if (targets.rows() != concepts.rows()) {
    throw DataError("dataset has " + std::to_string(concepts.rows()) + " concept rows but " +
                    std::to_string(targets.rows()) + " target rows");
  }
  for (std::size_t i = 0; i < concepts.rows(); ++i) {
    for (std::size_t j = 0; j < concepts.cols(); ++j) {
      const double v = concepts(i, j);
      if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
        throw DataError("concept '" + concept_names[j] + "' at row " + std::to_string(i) +
                        " is outside [0,1]: " + std::to_string(v));
      }
    }
  }
}

ConceptDataset ConceptDataset::subset(std::span<const std::size_t> indices) const {
  ConceptDataset out;
  out.concept_names = concept_names;
  out.class_names = class_names;
  out.provenance = provenance;
  out.concepts = RealMatrix(indices.size(), concepts.cols());
  out.targets = BoolMatrix(indices.size(), targets.cols());
  for (std::size_t r = 0; r < indices.size(); ++r) {
    const auto src_c = concepts.row(indices[r]);
    std::copy(src_c.begin(), src_c.end(), out.concepts.row(r).begin());
    const auto src_t = targets.row(indices[r]);
    std::copy(src_t.begin(), src_t.end(), out.targets.row(r).begin());
  }
  return out;
}

}  // namespace elens
