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

// Python bindings: datasets cross as numpy arrays, reports and models as
// JSON strings decoded on the Python side.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "elens/data_io.hpp"
#include "elens/errors.hpp"
#include "elens/experiments.hpp"
#include "elens/logic.hpp"
#include "elens/model_io.hpp"
#include "elens/network.hpp"

namespace py = pybind11;
using namespace elens;

namespace {

py::array_t<double> to_numpy(const RealMatrix& m) {
  py::array_t<double> out({m.rows(), m.cols()});
  std::copy(m.data().begin(), m.data().end(), out.mutable_data());
  return out;
}

py::array_t<std::uint8_t> to_numpy(const BoolMatrix& m) {
  py::array_t<std::uint8_t> out({m.rows(), m.cols()});
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const auto row = m.row(i);
    std::copy(row.begin(), row.end(), out.mutable_data() + i * m.cols());
  }
  return out;
}

ConceptDataset from_numpy(py::array_t<double, py::array::c_style | py::array::forcecast> concepts,
                          py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast> targets,
                          std::vector<std::string> concept_names, std::vector<std::string> class_names) {
  if (concepts.ndim() != 2 || targets.ndim() != 2) throw DimensionError("concepts and targets must be 2-D");
  const auto n = static_cast<std::size_t>(concepts.shape(0));
  const auto k = static_cast<std::size_t>(concepts.shape(1));
  const auto r = static_cast<std::size_t>(targets.shape(1));
  if (static_cast<std::size_t>(targets.shape(0)) != n) throw DimensionError("row counts differ");
  ConceptDataset ds;
  ds.concepts = RealMatrix(n, k, std::vector<double>(concepts.data(), concepts.data() + n * k));
  ds.targets = BoolMatrix(n, r);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < r; ++c) ds.targets(i, c) = targets.data()[i * r + c] ? 1 : 0;
  }
  if (concept_names.empty()) {
    for (std::size_t j = 0; j < k; ++j) concept_names.push_back("c" + std::to_string(j));
  }
  if (class_names.empty()) {
    for (std::size_t c = 0; c < r; ++c) class_names.push_back("y" + std::to_string(c));
  }
  ds.concept_names = std::move(concept_names);
  ds.class_names = std::move(class_names);
  ds.provenance = "python";
  ds.validate();
  return ds;
}

py::dict dataset_dict(const ConceptDataset& ds) {
  py::dict d;
  d["concepts"] = to_numpy(ds.concepts);
  d["targets"] = to_numpy(ds.targets);
  d["concept_names"] = ds.concept_names;
  d["class_names"] = ds.class_names;
  return d;
}

ExperimentConfig make_config(const std::string& preset, const std::string& config_text) {
  if (!preset.empty() && !config_text.empty()) throw ConfigError("give either a preset or a config, not both");
  return config_text.empty() ? experiment_preset(preset.empty() ? "parity" : preset) : parse_config(config_text);
}

std::vector<Variable> named_variables(const std::vector<std::string>& names) {
  std::vector<Variable> vars;
  for (std::size_t j = 0; j < names.size(); ++j) vars.push_back({j, names[j]});
  return vars;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Entropy-based concept networks with logic explanations";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<DataError>(m, "DataError", PyExc_ValueError);
  py::register_exception<DimensionError>(m, "DimensionError", PyExc_ValueError);
  py::register_exception<TrainingError>(m, "TrainingError", PyExc_RuntimeError);

  m.def("synth_toy", [](std::size_t pad) { return dataset_dict(synth_toy(pad)); }, py::arg("pad") = 100);
  m.def("synth_parity",
        [](std::size_t n, double noise, std::uint64_t seed) { return dataset_dict(synth_parity(n, noise, seed)); },
        py::arg("n"), py::arg("noise") = 0.0, py::arg("seed") = 0);
  m.def("load_csv",
        [](const std::string& path, const std::vector<std::string>& targets, bool discretize) {
          return dataset_dict(load_csv(path, targets, discretize));
        },
        py::arg("path"), py::arg("targets"), py::arg("discretize") = false);

  m.def("entropy", [](const std::vector<double>& alpha) { return entropy_of_distribution(alpha); },
        py::arg("alpha"));

  m.def("simplify",
        [](const std::string& formula, const std::vector<std::string>& names) {
          return render(simplify(parse_formula(formula, named_variables(names))), RenderStyle::kAscii);
        },
        py::arg("formula"), py::arg("concept_names"), "Quine-McCluskey minimization of an ascii DNF.");
  m.def("evaluate",
        [](const std::string& formula, const std::vector<std::string>& names, const std::vector<int>& values) {
          std::vector<std::uint8_t> x(values.begin(), values.end());
          return evaluate_concepts(parse_formula(formula, named_variables(names)), x);
        },
        py::arg("formula"), py::arg("concept_names"), py::arg("values"));

  m.def("crossval_json",
        [](const std::string& preset, const std::string& config_text, std::optional<std::uint64_t> seed) {
          ExperimentConfig c = make_config(preset, config_text);
          if (seed) c.seed = *seed;
          CrossvalOutcome out;
          {
            py::gil_scoped_release release;
            out = crossval(c);
          }
          return report_to_json(out.report).dump();
        },
        py::arg("preset") = "", py::arg("config") = "", py::arg("seed") = py::none());

  m.def("train_json",
        [](py::array_t<double, py::array::c_style | py::array::forcecast> concepts,
           py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast> targets,
           std::vector<std::string> concept_names, std::vector<std::string> class_names,
           const std::string& preset, const std::string& config_text, std::uint64_t seed) {
          const ConceptDataset ds = from_numpy(concepts, targets, std::move(concept_names), std::move(class_names));
          ExperimentConfig c = make_config(preset, config_text);
          c.seed = seed;
          SingleRun run;
          {
            py::gil_scoped_release release;
            run = train_single(c, ds);
          }
          ModelArtifact model{run.result.network, ds.concept_names, ds.class_names, {}};
          for (const auto& f : run.formulas) model.formulas.push_back(render(f, RenderStyle::kAscii));
          return model_to_json(model).dump();
        },
        py::arg("concepts"), py::arg("targets"), py::arg("concept_names") = std::vector<std::string>{},
        py::arg("class_names") = std::vector<std::string>{}, py::arg("preset") = "", py::arg("config") = "",
        py::arg("seed") = 0);

  m.def("predict_json",
        [](const std::string& model_json, py::array_t<double, py::array::c_style | py::array::forcecast> concepts) {
          const ModelArtifact model = model_from_json(nlohmann::json::parse(model_json));
          if (concepts.ndim() != 2) throw DimensionError("concepts must be 2-D");
          const auto n = static_cast<std::size_t>(concepts.shape(0));
          const auto k = static_cast<std::size_t>(concepts.shape(1));
          const RealMatrix x(n, k, std::vector<double>(concepts.data(), concepts.data() + n * k));
          return to_numpy(model.network.scores(x));
        },
        py::arg("model"), py::arg("concepts"), "Sigmoid class scores of a model artifact.");
}
