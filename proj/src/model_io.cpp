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

#include "elens/model_io.hpp"

#include <fstream>

#include "elens/errors.hpp"
#include "elens/experiments.hpp"

namespace elens {

using nlohmann::json;

namespace {

constexpr const char* kFormatTag = "entropy-lens-model";

json matrix_json(const RealMatrix& m) {
  return json{{"rows", m.rows()},
              {"cols", m.cols()},
              {"data", std::vector<double>(m.data().begin(), m.data().end())}};
}

RealMatrix matrix_from(const json& j) {
  const auto rows = j.at("rows").get<std::size_t>();
  const auto cols = j.at("cols").get<std::size_t>();
  auto data = j.at("data").get<std::vector<double>>();
  if (data.size() != rows * cols) {
    throw DataError("model: matrix data has " + std::to_string(data.size()) + " entries, expected " +
                    std::to_string(rows * cols));
  }
  return RealMatrix(rows, cols, std::move(data));
}

}  // namespace

json model_to_json(const ModelArtifact& model) {
  json classes = json::array();
  for (const auto& cls : model.network.classes()) {
    json trunk = json::array();
    for (const auto& layer : cls.trunk) {
      trunk.push_back({{"weights", matrix_json(layer.weights)}, {"bias", layer.bias}});
    }
    classes.push_back({{"head",
                        {{"weights", matrix_json(cls.head.weights)},
                         {"bias", cls.head.bias},
                         {"tau", cls.head.tau}}},
                       {"trunk", trunk}});
  }
  return json{{"format", kFormatTag},
              {"version", kModelFormatVersion},
              {"config", train_config_to_json(model.network.config())},
              {"concept_names", model.concept_names},
              {"class_names", model.class_names},
              {"classes", classes},
              {"formulas", model.formulas}};
}

ModelArtifact model_from_json(const json& j) {
  ModelArtifact m;
  try {
    if (j.at("format").get<std::string>() != kFormatTag) throw DataError("model: not a model artifact");
    const int version = j.at("version").get<int>();
    if (version != kModelFormatVersion) {
      throw DataError("model: unsupported format version " + std::to_string(version));
    }
    const TrainConfig config = train_config_from_json(j.at("config"));
    m.concept_names = j.at("concept_names").get<std::vector<std::string>>();
    m.class_names = j.at("class_names").get<std::vector<std::string>>();
    m.formulas = j.at("formulas").get<std::vector<std::string>>();
    std::vector<ClassNetwork> classes;
    for (const auto& c : j.at("classes")) {
      ClassNetwork cn;
      const auto& head = c.at("head");
      cn.head.class_index = classes.size();
      cn.head.weights = matrix_from(head.at("weights"));
      cn.head.bias = head.at("bias").get<RealVector>();
      cn.head.tau = head.at("tau").get<double>();
      for (const auto& layer : c.at("trunk")) {
        cn.trunk.push_back({matrix_from(layer.at("weights")), layer.at("bias").get<RealVector>()});
      }
      classes.push_back(std::move(cn));
    }
    m.network = EntropyNetwork(std::move(classes), config);
  } catch (const json::exception& e) {
    throw DataError(std::string("model: malformed document: ") + e.what());
  }
  if (m.class_names.size() != m.network.num_classes()) {
    throw DataError("model: class_names does not match the number of class networks");
  }
  if (m.network.num_classes() > 0 && m.concept_names.size() != m.network.num_concepts()) {
    throw DataError("model: concept_names does not match the head width");
  }
  if (!m.formulas.empty() && m.formulas.size() != m.class_names.size()) {
    throw DataError("model: formulas must list one entry per class");
  }
  return m;
}

void save_model(const ModelArtifact& model, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << model_to_json(model).dump(1) << '\n';
  if (!out) throw DataError("write failed: " + path.string());
}

ModelArtifact load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read model " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw DataError("model " + path.string() + ": " + e.what());
  }
  return model_from_json(j);
}

}  // namespace elens
