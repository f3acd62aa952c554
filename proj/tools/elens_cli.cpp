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

// elens: command-line driver for dataset synthesis, training, explanation
// extraction, cross-validation and hyperparameter grids.

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "elens/data_io.hpp"
#include "elens/errors.hpp"
#include "elens/experiments.hpp"
#include "elens/logic.hpp"
#include "elens/metrics.hpp"
#include "elens/model_io.hpp"
#include "elens/random.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

struct Overrides {
  std::string config_path;
  std::string preset;
  std::optional<std::uint64_t> seed;
  std::optional<double> lambda;
  std::optional<double> tau;
  std::optional<std::size_t> epochs;
  std::optional<std::size_t> folds;
  std::string out;
};

void add_experiment_flags(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config_path, "Experiment config file (TOML-style)");
  cmd->add_option("--preset", o.preset, "Named preset: toy, parity, mnist, mimic, vdem, cub");
  cmd->add_option("--seed", o.seed, "Base seed (overrides config)");
  cmd->add_option("--lambda", o.lambda, "Regularization strength (overrides config)");
  cmd->add_option("--tau", o.tau, "Softmax temperature (overrides config)");
  cmd->add_option("--epochs", o.epochs, "Training epochs (overrides config)");
  cmd->add_option("--folds", o.folds, "Cross-validation folds (overrides config)");
  cmd->add_option("--out", o.out, "Output directory (overrides config)");
}

std::size_t thread_budget(std::size_t wanted) {
  std::size_t n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("ENTROPY_LENS_THREADS")) {
    try {
      const long cap = std::stol(env);
      if (cap >= 1) n = std::min<std::size_t>(n, static_cast<std::size_t>(cap));
    } catch (const std::exception&) {
      std::cerr << "warning: ignoring ENTROPY_LENS_THREADS=" << env << "\n";
    }
  }
  return std::min(n, std::max<std::size_t>(1, wanted));
}

elens::ExperimentConfig effective_config(const Overrides& o) {
  if (!o.config_path.empty() && !o.preset.empty()) {
    throw elens::ConfigError("use either --config or --preset, not both");
  }
  elens::ExperimentConfig c;
  if (!o.config_path.empty()) {
    if (!fs::exists(o.config_path)) throw elens::ConfigError("config not found: " + o.config_path);
    c = elens::load_config(o.config_path);
  } else if (!o.preset.empty()) {
    c = elens::experiment_preset(o.preset);
  } else {
    throw elens::ConfigError("one of --config or --preset is required");
  }
  if (o.seed) c.seed = *o.seed;
  if (o.lambda) c.train.lambda = *o.lambda;
  if (o.tau) c.train.tau = *o.tau;
  if (o.epochs) c.train.max_epochs = *o.epochs;
  if (o.folds) c.folds = *o.folds;
  if (!o.out.empty()) c.output_dir = o.out;
  c.threads = thread_budget(c.folds);
  c.validate();
  std::cerr << "seed: " << c.seed << "\nconfig: " << elens::config_to_json(c).dump() << "\n";
  return c;
}

/// Files written by one command; removed again if the command fails midway.
class ArtifactSet {
 public:
  explicit ArtifactSet(fs::path dir) : dir_(std::move(dir)) {
    created_dir_ = !fs::exists(dir_);
    fs::create_directories(dir_);
  }
  ~ArtifactSet() {
    if (committed_) return;
    std::error_code ec;
    for (auto it = written_.rbegin(); it != written_.rend(); ++it) fs::remove(*it, ec);
    if (created_dir_) fs::remove_all(dir_, ec);
  }

  fs::path write(const fs::path& relative, const std::string& content) {
    const fs::path p = dir_ / relative;
    if (p.has_parent_path() && !fs::exists(p.parent_path())) {
      fs::create_directories(p.parent_path());
      written_.push_back(p.parent_path());
    }
    std::ofstream out(p, std::ios::binary);
    if (!out) throw elens::DataError("cannot write " + p.string());
    written_.push_back(p);
    out << content;
    if (!out) throw elens::DataError("write failed: " + p.string());
    return p;
  }

  void commit() { committed_ = true; }

 private:
  fs::path dir_;
  bool created_dir_ = false;
  bool committed_ = false;
  std::vector<fs::path> written_;
};

std::string safe_name(std::string s) {
  for (char& ch : s) {
    if (!std::isalnum(static_cast<unsigned char>(ch)) && ch != '-' && ch != '_') ch = '_';
  }
  return s;
}

// ---- commands -----------------------------------------------------------------

struct SynthArgs {
  std::string kind;
  long pad = 100;
  long samples = 2000;
  double noise = 0.0;
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_synth(const SynthArgs& a) {
  elens::ConceptDataset ds = a.kind == "toy"
                                 ? elens::synth_toy(static_cast<std::size_t>(a.pad))
                                 : elens::synth_parity(static_cast<std::size_t>(a.samples), a.noise, a.seed);
  elens::save_csv(ds, a.out);
  std::cout << "wrote " << a.out << ": " << ds.num_samples() << " rows, " << ds.num_concepts()
            << " concepts, " << ds.num_classes() << " targets\n";
  return 0;
}

int cmd_train(const Overrides& o) {
  const auto config = effective_config(o);
  const auto data = elens::materialize_dataset(config.dataset);
  const auto run = elens::train_single(config, data);
  for (const auto& w : run.warnings) std::cerr << "warning: " << w << "\n";
  const auto& result = run.result;
  const auto& formulas = run.formulas;
  elens::ModelArtifact model{result.network, data.concept_names, data.class_names, {}};
  for (const auto& f : formulas) model.formulas.push_back(elens::render(f, elens::RenderStyle::kAscii));

  ArtifactSet out(config.output_dir);
  const auto path = out.write("model.json", elens::model_to_json(model).dump(1) + "\n");
  out.commit();
  std::cout << "epochs: " << result.history.epochs.size() << "\n"
            << "model accuracy (train): " << elens::model_accuracy(result.network, run.train_set) << "\n";
  for (std::size_t c = 0; c < formulas.size(); ++c) {
    std::cout << data.class_names[c] << ": " << elens::render(formulas[c]) << "\n";
  }
  std::cout << "wrote " << path.string() << "\n";
  return 0;
}

struct ModelArgs {
  std::string model;
  std::string data;
  std::string class_name;
  std::string style = "unicode";
};

struct LoadedModel {
  elens::ModelArtifact model;
  elens::ConceptDataset data;
  std::vector<elens::DnfFormula> formulas;
};

LoadedModel load_for_evaluation(const ModelArgs& a) {
  LoadedModel lm{elens::load_model(a.model), {}, {}};
  lm.data = elens::load_csv(a.data, lm.model.class_names, false);
  if (lm.data.concept_names != lm.model.concept_names) {
    throw elens::DataError("dataset concepts do not match the model's concepts");
  }
  const double eps = lm.model.network.config().epsilon;
  if (lm.model.formulas.empty()) {
    lm.formulas = elens::explain_classes(lm.model.network, lm.data, lm.data, eps, elens::kDefaultQmVarLimit);
    return lm;
  }
  for (std::size_t c = 0; c < lm.model.class_names.size(); ++c) {
    // Rebuild the variable list from the head mask, then read the stored formula.
    const auto table = elens::build_truth_table(lm.data, lm.model.network, c, eps);
    lm.formulas.push_back(elens::parse_formula(lm.model.formulas[c], elens::variables_of(table), c));
  }
  return lm;
}

std::vector<std::size_t> selected_classes(const std::vector<std::string>& names, const std::string& wanted) {
  std::vector<std::size_t> out;
  for (std::size_t c = 0; c < names.size(); ++c) {
    if (wanted.empty() || names[c] == wanted) out.push_back(c);
  }
  if (out.empty()) {
    std::string list;
    for (const auto& n : names) list += (list.empty() ? "" : ", ") + n;
    throw elens::ConfigError("unknown class '" + wanted + "'; valid classes: " + list);
  }
  return out;
}

int cmd_explain(const ModelArgs& a) {
  const auto style = elens::render_style_from_string(a.style);
  const auto lm = load_for_evaluation(a);
  const double eps = lm.model.network.config().epsilon;
  for (auto c : selected_classes(lm.model.class_names, a.class_name)) {
    const auto& f = lm.formulas[c];
    std::printf("%s: %s\n  complexity: %zu literals, %zu minterms; fidelity: %.4f\n",
                lm.model.class_names[c].c_str(), elens::render(f, style).c_str(), elens::complexity(f),
                elens::term_count(f), elens::class_fidelity(f, lm.model.network, lm.data, c, eps));
  }
  return 0;
}

int cmd_eval(const ModelArgs& a) {
  const auto lm = load_for_evaluation(a);
  const double eps = lm.model.network.config().epsilon;
  std::size_t literals = 0;
  for (const auto& f : lm.formulas) literals += elens::complexity(f);
  std::printf("model accuracy: %.4f\nexplanation accuracy: %.4f\nfidelity: %.4f\ncomplexity (mean literals): %.2f\n",
              elens::model_accuracy(lm.model.network, lm.data),
              elens::explanation_accuracy(lm.formulas, lm.data, eps),
              elens::fidelity(lm.formulas, lm.model.network, lm.data, eps),
              static_cast<double>(literals) / static_cast<double>(std::max<std::size_t>(1, lm.formulas.size())));
  return 0;
}

int cmd_crossval(const Overrides& o) {
  const auto config = effective_config(o);
  const auto data = elens::materialize_dataset(config.dataset);
  const auto outcome = elens::crossval(config, data);
  const auto& report = outcome.report;

  ArtifactSet out(config.output_dir);
  out.write("report.json", elens::report_to_json(report).dump(2) + "\n");
  const std::string summary = elens::report_markdown(report);
  out.write("summary.md", summary);
  json timing = json::array();
  for (std::size_t f = 0; f < outcome.artifacts.size(); ++f) {
    const auto& art = outcome.artifacts[f];
    const auto& names = report.folds[f].per_class;
    std::ostringstream text;
    for (std::size_t c = 0; c < art.formulas.size(); ++c) {
      text << names[c].name << ": " << elens::render(art.formulas[c], elens::RenderStyle::kAscii) << "\n";
    }
    out.write("formulas/fold" + std::to_string(f) + ".txt", text.str());
    elens::ModelArtifact model{art.network, data.concept_names, data.class_names, {}};
    for (const auto& c : names) model.formulas.push_back(c.formula);
    out.write("models/fold" + std::to_string(f) + ".json", elens::model_to_json(model).dump(1) + "\n");
    timing.push_back({{"fold", f}, {"train_s", art.time.train_seconds}, {"extract_s", art.time.extract_seconds}});
  }
  out.write("timing.json", timing.dump(2) + "\n");
  out.commit();
  std::cout << summary;
  return 0;
}

std::vector<double> parse_list(const std::string& text, const char* what) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw elens::ConfigError(std::string("bad ") + what + " value '" + item + "'");
    }
  }
  return v;
}

int cmd_grid(const Overrides& o, const std::string& lambdas, const std::string& taus) {
  const auto config = effective_config(o);
  const auto ls = parse_list(lambdas, "--lambdas");
  const auto ts = parse_list(taus, "--taus");
  const auto grid = elens::grid_sweep(config, ls, ts);
  ArtifactSet out(config.output_dir);
  out.write("grid.json", elens::grid_to_json(grid).dump(2) + "\n");
  const std::string md = elens::grid_markdown(grid);
  out.write("grid.md", md);
  out.commit();
  std::cout << md;
  return 0;
}

int cmd_report(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw elens::DataError("cannot read report " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw elens::DataError("report " + path + ": " + e.what());
  }
  std::cout << elens::report_markdown(elens::report_from_json(j));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Entropy-based concept networks: train, extract and evaluate logic explanations"};
  app.footer("Environment:\n  ENTROPY_LENS_THREADS  maximum number of folds trained concurrently");
  app.require_subcommand(1);

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "Write a synthetic dataset as CSV");
  synth_cmd->add_option("kind", synth.kind, "toy or parity")->required()->check(CLI::IsMember({"toy", "parity"}));
  synth_cmd->add_option("--pad", synth.pad, "toy: number of all-zero padding concepts")->check(CLI::NonNegativeNumber);
  synth_cmd->add_option("-n,--samples", synth.samples, "parity: number of rows")->check(CLI::PositiveNumber);
  synth_cmd->add_option("--noise", synth.noise, "parity: concept flip probability");
  synth_cmd->add_option("--seed", synth.seed, "parity: sampling seed");
  synth_cmd->add_option("-o,--out", synth.out, "Output CSV path")->required();

  Overrides train_o;
  auto* train_cmd = app.add_subcommand("train", "Train one network and save the model artifact");
  add_experiment_flags(train_cmd, train_o);

  ModelArgs explain;
  auto* explain_cmd = app.add_subcommand("explain", "Print per-class formulas of a saved model");
  explain_cmd->add_option("--model", explain.model, "Model artifact (JSON)")->required();
  explain_cmd->add_option("--data", explain.data, "Dataset CSV with the model's concept and class columns")->required();
  explain_cmd->add_option("--class", explain.class_name, "Only this class");
  explain_cmd->add_option("--style", explain.style, "unicode, ascii or dnf-canonical")
      ->check(CLI::IsMember({"unicode", "ascii", "dnf-canonical"}));

  ModelArgs eval;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a saved model and its formulas on a dataset");
  eval_cmd->add_option("--model", eval.model, "Model artifact (JSON)")->required();
  eval_cmd->add_option("--data", eval.data, "Dataset CSV")->required();

  Overrides cv_o;
  auto* cv_cmd = app.add_subcommand("crossval", "k-fold cross-validation with explanation metrics");
  add_experiment_flags(cv_cmd, cv_o);

  Overrides grid_o;
  std::string lambdas = "1e-5,1e-4,1e-3";
  std::string taus = "0.3,1,5";
  auto* grid_cmd = app.add_subcommand("grid", "Cross-validate every (lambda, tau) pair");
  add_experiment_flags(grid_cmd, grid_o);
  grid_cmd->add_option("--lambdas", lambdas, "Comma-separated lambda values")->capture_default_str();
  grid_cmd->add_option("--taus", taus, "Comma-separated tau values")->capture_default_str();

  std::string report_path;
  auto* report_cmd = app.add_subcommand("report", "Render a report JSON as Markdown");
  report_cmd->add_option("report", report_path, "report.json")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*synth_cmd) return cmd_synth(synth);
    if (*train_cmd) return cmd_train(train_o);
    if (*explain_cmd) return cmd_explain(explain);
    if (*eval_cmd) return cmd_eval(eval);
    if (*cv_cmd) return cmd_crossval(cv_o);
    if (*grid_cmd) return cmd_grid(grid_o, lambdas, taus);
    if (*report_cmd) return cmd_report(report_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}
