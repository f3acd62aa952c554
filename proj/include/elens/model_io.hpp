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

// Trained-model artifact: one versioned JSON document holding the network
// shapes, its weights in decimal, the training config and the names needed
// to interpret inputs and outputs. Doubles are written in shortest
// round-trip form, so save/load is exact.

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "elens/network.hpp"

namespace elens {

inline constexpr int kModelFormatVersion = 1;

struct ModelArtifact {
  EntropyNetwork network;
  std::vector<std::string> concept_names;
  std::vector<std::string> class_names;
  std::vector<std::string> formulas;  // ascii grammar, one per class; may be empty

  bool operator==(const ModelArtifact&) const = default;
};

nlohmann::json model_to_json(const ModelArtifact& model);
/// Throws DataError on a malformed or incompatible document.
ModelArtifact model_from_json(const nlohmann::json& j);

void save_model(const ModelArtifact& model, const std::filesystem::path& path);
ModelArtifact load_model(const std::filesystem::path& path);

}  // namespace elens
