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

#include "elens/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <sstream>
#include <thread>

#include "elens/data_io.hpp"
#include "elens/errors.hpp"
#include "elens/random.hpp"

namespace elens {

using nlohmann::json;

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

// Drops a trailing '#' comment that is not inside a double-quoted string.
std::string strip_comment(const std::string& line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"' && (i == 0 || line[i - 1] != '\\')) quoted = !quoted;
    if (line[i] == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

std::string format_fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

struct Entry {
  std::string section;
  std::string key;
  json value;
  std::size_t line;
};

[[noreturn]] void bad_value(const Entry& e, const std::string& what) {
  throw ConfigError("config line " + std::to_string(e.line) + ": " +
                    (e.section.empty() ? "" : "[" + e.section + "] ") + e.key + " " + what);
}

double as_number(const Entry& e) {
  if (!e.value.is_number()) bad_value(e, "must be a number");
  return e.value.get<double>();
}

std::uint64_t as_count(const Entry& e) {
  if (!e.value.is_number_integer() || e.value.get<std::int64_t>() < 0) {
    bad_value(e, "must be a non-negative integer");
  }
  return e.value.get<std::uint64_t>();
}

bool as_bool(const Entry& e) {
  if (!e.value.is_boolean()) bad_value(e, "must be true or false");
  return e.value.get<bool>();
}

std::string as_string(const Entry& e) {
  if (!e.value.is_string()) bad_value(e, "must be a quoted string");
  return e.value.get<std::string>();
}

void apply_entry(ExperimentConfig& c, const Entry& e) {
  const std::string& s = e.section;
  const std::string& k = e.key;
  try {
    if (s.empty()) {
      if (k == "seed") return void(c.seed = as_count(e));
      if (k == "preset") return;  // applied up front
    } else if (s == "dataset") {
      if (k == "kind") {
        const auto v = as_string(e);
        if (v == "csv") c.dataset.kind = DatasetKind::kCsv;
        else if (v == "toy") c.dataset.kind = DatasetKind::kToy;
        else if (v == "parity") c.dataset.kind = DatasetKind::kParity;
        else bad_value(e, "must be one of csv, toy, parity");
        return;
      }
      if (k == "path") return void(c.dataset.path = as_string(e));
      if (k == "targets") {
        if (!e.value.is_array()) bad_value(e, "must be an array of strings");
        c.dataset.targets.clear();
        for (const auto& t : e.value) {
          if (!t.is_string()) bad_value(e, "must be an array of strings");
          c.dataset.targets.push_back(t.get<std::string>());
        }
        return;
      }
      if (k == "discretize") return void(c.dataset.discretize = as_bool(e));
      if (k == "pad") return void(c.dataset.pad = as_count(e));
      if (k == "samples") return void(c.dataset.samples = as_count(e));
      if (k == "noise") return void(c.dataset.noise = as_number(e));
      if (k == "seed") return void(c.dataset.seed = as_count(e));
    } else if (s == "train") {
      auto& t = c.train;
      if (k == "lambda") return void(t.lambda = as_number(e));
      if (k == "tau") return void(t.tau = as_number(e));
      if (k == "learning_rate") return void(t.learning_rate = as_number(e));
      if (k == "epochs") return void(t.max_epochs = as_count(e));
      if (k == "epsilon") return void(t.epsilon = as_number(e));
      if (k == "regularizer") return void(t.regularizer = regularizer_from_string(as_string(e)));
      if (k == "early_stopping") return void(t.early_stopping = as_bool(e));
      if (k == "weight_decay") return void(t.weight_decay = as_number(e));
      if (k == "activation") return void(t.activation = activation_from_string(as_string(e)));
      if (k == "leaky_slope") return void(t.leaky_slope = as_number(e));
      if (k == "task_loss") return void(t.task_loss = task_loss_from_string(as_string(e)));
      if (k == "beta1") return void(t.beta1 = as_number(e));
      if (k == "beta2") return void(t.beta2 = as_number(e));
      if (k == "adam_epsilon") return void(t.adam_epsilon = as_number(e));
      if (k == "hidden") {
        if (!e.value.is_array()) bad_value(e, "must be an array of positive integers");
        t.hidden_units.clear();
        for (const auto& h : e.value) {
          if (!h.is_number_integer() || h.get<std::int64_t>() <= 0) {
            bad_value(e, "must be an array of positive integers");
          }
          t.hidden_units.push_back(h.get<std::size_t>());
        }
        return;
      }
    } else if (s == "extract") {
      if (k == "folds") return void(c.folds = as_count(e));
      if (k == "stratified") return void(c.stratified = as_bool(e));
      if (k == "validation_fraction") return void(c.validation_fraction = as_number(e));
      if (k == "qm_var_limit") return void(c.qm_var_limit = as_count(e));
    } else if (s == "output") {
      if (k == "dir") return void(c.output_dir = as_string(e));
      if (k == "record_timing") return void(c.record_timing = as_bool(e));
    } else {
      throw ConfigError("config line " + std::to_string(e.line) + ": unknown section [" + s + "]");
    }
  } catch (const json::exception& ex) {
    bad_value(e, std::string("has the wrong type: ") + ex.what());
  }
  throw ConfigError("config line " + std::to_string(e.line) + ": unknown key '" + k + "'" +
                    (s.empty() ? "" : " in [" + s + "]"));
}

std::string dataset_kind_name(DatasetKind k) {
  switch (k) {
    case DatasetKind::kCsv: return "csv";
    case DatasetKind::kToy: return "toy";
    case DatasetKind::kParity: return "parity";
  }
  return "toy";
}

std::vector<std::size_t> complement(std::size_t n, const std::vector<std::size_t>& excluded) {
  std::vector<std::uint8_t> skip(n, 0);
  for (auto i : excluded) skip[i] = 1;
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < n; ++i) {
    if (!skip[i]) out.push_back(i);
  }
  return out;
}

// Runs job(i) for i in [0, count) on up to `threads` workers.
template <typename Job>
void parallel_for(std::size_t count, std::size_t threads, Job&& job) {
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        job(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t n = std::max<std::size_t>(1, std::min(threads, count));
  if (n == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < n; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

json mean_sem_json(const MeanSem& m) { return json{{"mean", m.mean}, {"sem", m.sem}}; }

}  // namespace

// ---- configuration ----------------------------------------------------------

void ExperimentConfig::validate() const {
  train.validate();
  if (folds < 2) throw ConfigError("folds must be at least 2");
  if (!(validation_fraction >= 0.0 && validation_fraction < 1.0)) {
    throw ConfigError("validation_fraction must lie in [0, 1)");
  }
  if (dataset.kind == DatasetKind::kCsv) {
    if (dataset.path.empty()) throw ConfigError("[dataset] path is required for csv datasets");
    if (dataset.targets.empty()) throw ConfigError("[dataset] targets is required for csv datasets");
  }
  if (dataset.kind == DatasetKind::kParity &&
      (dataset.samples < 10 || !(dataset.noise >= 0.0 && dataset.noise < 0.5))) {
    throw ConfigError("[dataset] parity needs samples >= 10 and noise in [0, 0.5)");
  }
}

ExperimentConfig experiment_preset(std::string_view name) {
  ExperimentConfig c;
  c.preset = std::string(name);
  c.train = train_preset(name);
  if (name == "toy") {
    c.dataset.kind = DatasetKind::kToy;
    c.dataset.pad = 100;
    // Eight rows: any hold-out would remove part of the XOR truth table.
    c.validation_fraction = 0.0;
  } else if (name == "parity" || name == "mnist") {
    c.dataset.kind = DatasetKind::kParity;
    c.dataset.samples = 2000;
    c.dataset.noise = 0.0;
  } else {
    c.dataset.kind = DatasetKind::kCsv;
  }
  return c;
}

ExperimentConfig parse_config(std::string_view text) {
  std::vector<Entry> entries;
  std::string section;
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t line_no = 0;
  std::optional<std::string> preset;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(strip_comment(raw));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("config line " + std::to_string(line_no) + ": bad section header");
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      if (section != "dataset" && section != "train" && section != "extract" && section != "output") {
        throw ConfigError("config line " + std::to_string(line_no) + ": unknown section [" + section + "]");
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    Entry e{section, trim(std::string_view(line).substr(0, eq)), json(), line_no};
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    try {
      e.value = json::parse(value);
    } catch (const json::exception&) {
      throw ConfigError("config line " + std::to_string(line_no) + ": cannot parse value '" + value + "'");
    }
    if (e.section.empty() && e.key == "preset") preset = as_string(e);
    entries.push_back(std::move(e));
  }
  ExperimentConfig c = preset ? experiment_preset(*preset) : ExperimentConfig{};
  for (const auto& e : entries) apply_entry(c, e);
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config not found: " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  ExperimentConfig c = parse_config(buf.str());
  if (c.dataset.kind == DatasetKind::kCsv && !c.dataset.path.empty()) {
    std::filesystem::path p(c.dataset.path);
    if (p.is_relative()) c.dataset.path = (path.parent_path() / p).lexically_normal().string();
  }
  return c;
}

json train_config_to_json(const TrainConfig& t) {
  return json{{"lambda", t.lambda},
              {"tau", t.tau},
              {"learning_rate", t.learning_rate},
              {"epochs", t.max_epochs},
              {"epsilon", t.epsilon},
              {"regularizer", to_string(t.regularizer)},
              {"seed", t.seed},
              {"early_stopping", t.early_stopping},
              {"weight_decay", t.weight_decay},
              {"hidden", t.hidden_units},
              {"activation", to_string(t.activation)},
              {"leaky_slope", t.leaky_slope},
              {"task_loss", to_string(t.task_loss)},
              {"beta1", t.beta1},
              {"beta2", t.beta2},
              {"adam_epsilon", t.adam_epsilon}};
}

TrainConfig train_config_from_json(const json& j) {
  TrainConfig t;
  t.lambda = j.at("lambda").get<double>();
  t.tau = j.at("tau").get<double>();
  t.learning_rate = j.at("learning_rate").get<double>();
  t.max_epochs = j.at("epochs").get<std::size_t>();
  t.epsilon = j.at("epsilon").get<double>();
  t.regularizer = regularizer_from_string(j.at("regularizer").get<std::string>());
  t.seed = j.at("seed").get<std::uint64_t>();
  t.early_stopping = j.at("early_stopping").get<bool>();
  t.weight_decay = j.at("weight_decay").get<double>();
  t.hidden_units = j.at("hidden").get<std::vector<std::size_t>>();
  t.activation = activation_from_string(j.at("activation").get<std::string>());
  t.leaky_slope = j.at("leaky_slope").get<double>();
  t.task_loss = task_loss_from_string(j.at("task_loss").get<std::string>());
  t.beta1 = j.at("beta1").get<double>();
  t.beta2 = j.at("beta2").get<double>();
  t.adam_epsilon = j.at("adam_epsilon").get<double>();
  return t;
}

json config_to_json(const ExperimentConfig& c) {
  json ds{{"kind", dataset_kind_name(c.dataset.kind)}};
  switch (c.dataset.kind) {
    case DatasetKind::kCsv:
      ds["path"] = c.dataset.path;
      ds["targets"] = c.dataset.targets;
      ds["discretize"] = c.dataset.discretize;
      break;
    case DatasetKind::kToy:
      ds["pad"] = c.dataset.pad;
      break;
    case DatasetKind::kParity:
      ds["samples"] = c.dataset.samples;
      ds["noise"] = c.dataset.noise;
      ds["seed"] = c.dataset.seed;
      break;
  }
  json train = train_config_to_json(c.train);
  train.erase("seed");  // per-fold seeds derive from the experiment seed
  return json{{"preset", c.preset},
              {"seed", c.seed},
              {"dataset", ds},
              {"train", train},
              {"extract",
               {{"folds", c.folds},
                {"stratified", c.stratified},
                {"validation_fraction", c.validation_fraction},
                {"qm_var_limit", c.qm_var_limit}}},
              {"output", {{"record_timing", c.record_timing}}}};
}

ConceptDataset materialize_dataset(const DatasetSpec& spec) {
  switch (spec.kind) {
    case DatasetKind::kCsv: return load_csv(spec.path, spec.targets, spec.discretize);
    case DatasetKind::kToy: return synth_toy(spec.pad);
    case DatasetKind::kParity: return synth_parity(spec.samples, spec.noise, spec.seed);
  }
  throw ConfigError("unknown dataset kind");
}

// ---- folds -------------------------------------------------------------------

std::vector<std::vector<std::size_t>> make_folds(const BoolMatrix& targets, std::size_t k,
                                                 std::uint64_t seed, bool stratified) {
  if (k == 0) throw ConfigError("make_folds: k must be positive");
  std::map<BoolVector, std::vector<std::size_t>> strata;
  for (std::size_t i = 0; i < targets.rows(); ++i) {
    const auto r = targets.row(i);
    strata[stratified ? BoolVector(r.begin(), r.end()) : BoolVector{}].push_back(i);
  }
  Rng rng(seed);
  std::vector<std::vector<std::size_t>> folds(k);
  std::size_t dealer = 0;
  for (auto& [key, members] : strata) {
    rng.shuffle(std::span<std::size_t>(members));
    for (std::size_t idx : members) folds[dealer++ % k].push_back(idx);
  }
  for (auto& f : folds) std::sort(f.begin(), f.end());
  return folds;
}

// ---- extraction --------------------------------------------------------------

std::vector<DnfFormula> explain_classes(const EntropyNetwork& network,
                                        const ConceptDataset& extraction_set,
                                        const ConceptDataset& validation_set, double epsilon,
                                        std::size_t qm_var_limit,
                                        std::vector<std::string>* warnings) {
  const ConceptDataset& val = validation_set.num_samples() > 0 ? validation_set : extraction_set;
  std::vector<DnfFormula> formulas;
  const RealMatrix scores = network.scores(extraction_set.concepts);
  for (std::size_t c = 0; c < network.num_classes(); ++c) {
    bool present = false;
    for (std::size_t i = 0; i < extraction_set.num_samples() && !present; ++i) {
      present = extraction_set.targets(i, c) != 0;
    }
    const BooleanMask mask = compute_mask(network.concept_scores(c), epsilon);
    RealVector column(scores.rows());
    for (std::size_t i = 0; i < scores.rows(); ++i) column[i] = scores(i, c);
    const TruthTable table = build_truth_table(extraction_set, column, mask, c);
    if (!present) {
      if (warnings) {
        warnings->push_back("class '" + extraction_set.class_names[c] +
                            "' absent from the training split; formula set to False");
      }
      DnfFormula f;
      f.class_index = c;
      f.variables = variables_of(table);
      formulas.push_back(std::move(f));
      continue;
    }
    const BoolMatrix val_rows = masked_rows(val, table.kept_concepts, epsilon);
    BoolVector labels(val.num_samples());
    for (std::size_t i = 0; i < val.num_samples(); ++i) labels[i] = val.targets(i, c);
    formulas.push_back(simplify(aggregate_class_formula(table, val_rows, labels), qm_var_limit));
  }
  return formulas;
}

SingleRun train_single(const ExperimentConfig& config, const ConceptDataset& dataset) {
  config.validate();
  dataset.validate();
  std::vector<std::size_t> val_idx;
  if (config.validation_fraction > 0.0 && dataset.num_samples() >= 2) {
    const auto k = std::max<std::size_t>(
        2, static_cast<std::size_t>(std::lround(1.0 / config.validation_fraction)));
    val_idx = make_folds(dataset.targets, k, derive_seed(config.seed, 1), config.stratified).front();
  }
  SingleRun run;
  run.train_set = dataset.subset(complement(dataset.num_samples(), val_idx));
  run.validation_set = dataset.subset(val_idx);
  TrainConfig tc = config.train;
  tc.seed = derive_seed(config.seed, 2);
  auto net = EntropyNetwork::initialize(dataset.num_concepts(), dataset.num_classes(), tc);
  run.result = train(std::move(net), run.train_set, run.validation_set, tc);
  run.formulas = explain_classes(run.result.network, run.train_set, run.validation_set, tc.epsilon,
                                 config.qm_var_limit, &run.warnings);
  return run;
}

// ---- cross-validation ----------------------------------------------------------

CrossvalOutcome crossval(const ExperimentConfig& config, const ConceptDataset& dataset) {
  config.validate();
  dataset.validate();
  const std::size_t n = dataset.num_samples();
  if (config.folds > n) {
    throw ConfigError("folds (" + std::to_string(config.folds) + ") exceed the number of samples (" +
                      std::to_string(n) + ")");
  }
  const auto folds = make_folds(dataset.targets, config.folds, derive_seed(config.seed, 0),
                                config.stratified);
  const double eps = config.train.epsilon;

  CrossvalOutcome out;
  out.report.config_echo = config_to_json(config);
  out.report.folds.resize(config.folds);
  out.artifacts.resize(config.folds);
  std::vector<std::vector<std::string>> fold_warnings(config.folds);

  parallel_for(config.folds, config.threads, [&](std::size_t f) {
    const std::uint64_t fold_seed = derive_seed(config.seed, f + 1);
    const auto& test_idx = folds[f];
    const auto portion = complement(n, test_idx);

    std::vector<std::size_t> train_idx = portion;
    std::vector<std::size_t> val_idx;
    if (config.validation_fraction > 0.0 && portion.size() >= 2) {
      const ConceptDataset portion_ds = dataset.subset(portion);
      const auto inner_k = std::max<std::size_t>(
          2, static_cast<std::size_t>(std::lround(1.0 / config.validation_fraction)));
      const auto inner = make_folds(portion_ds.targets, inner_k, derive_seed(fold_seed, 1),
                                    config.stratified);
      for (auto i : inner.front()) val_idx.push_back(portion[i]);
      train_idx = complement(n, val_idx);
      std::erase_if(train_idx, [&](std::size_t i) {
        return std::binary_search(test_idx.begin(), test_idx.end(), i);
      });
    }
    const ConceptDataset train_ds = dataset.subset(train_idx);
    const ConceptDataset val_ds = dataset.subset(val_idx);
    const ConceptDataset test_ds = dataset.subset(test_idx);

    TrainConfig tc = config.train;
    tc.seed = derive_seed(fold_seed, 2);
    FoldArtifacts& art = out.artifacts[f];
    art.time = extraction_time(
        [&] {
          auto net = EntropyNetwork::initialize(dataset.num_concepts(), dataset.num_classes(), tc);
          art.network = train(std::move(net), train_ds, val_ds, tc).network;
        },
        [&] {
          art.formulas = explain_classes(art.network, train_ds, val_ds, eps, config.qm_var_limit,
                                         &fold_warnings[f]);
        });

    FoldReport& rep = out.report.folds[f];
    rep.seed = fold_seed;
    rep.train_size = train_ds.num_samples();
    rep.validation_size = val_ds.num_samples();
    rep.test_size = test_ds.num_samples();
    rep.model_accuracy = model_accuracy(art.network, test_ds);
    double f1_sum = 0.0;
    double fid_sum = 0.0;
    for (std::size_t c = 0; c < dataset.num_classes(); ++c) {
      ClassReport cr;
      cr.name = dataset.class_names[c];
      cr.formula = render(art.formulas[c], RenderStyle::kAscii);
      cr.f1 = class_f1(art.formulas[c], test_ds, c, eps);
      cr.complexity_literals = complexity(art.formulas[c]);
      cr.complexity_minterms = term_count(art.formulas[c]);
      cr.fidelity = class_fidelity(art.formulas[c], art.network, test_ds, c, eps);
      f1_sum += cr.f1;
      fid_sum += cr.fidelity;
      rep.per_class.push_back(std::move(cr));
    }
    const double r = static_cast<double>(std::max<std::size_t>(1, dataset.num_classes()));
    rep.explanation_accuracy = f1_sum / r;
    rep.fidelity = fid_sum / r;
    if (config.record_timing) {
      rep.time_train_s = art.time.train_seconds;
      rep.time_extract_s = art.time.extract_seconds;
    }
  });

  for (std::size_t f = 0; f < config.folds; ++f) {
    for (const auto& w : fold_warnings[f]) {
      out.report.diagnostics.push_back("fold " + std::to_string(f) + ": " + w);
    }
  }

  auto collect = [&](auto getter) {
    std::vector<double> v;
    for (const auto& fr : out.report.folds) v.push_back(getter(fr));
    return mean_and_sem(v);
  };
  auto per_class_mean = [](const FoldReport& fr, auto field) {
    double s = 0.0;
    for (const auto& c : fr.per_class) s += static_cast<double>(c.*field);
    return fr.per_class.empty() ? 0.0 : s / static_cast<double>(fr.per_class.size());
  };
  auto& agg = out.report.aggregate;
  agg["model_accuracy"] = collect([](const FoldReport& fr) { return fr.model_accuracy; });
  agg["explanation_accuracy"] =
      collect([](const FoldReport& fr) { return fr.explanation_accuracy; });
  agg["fidelity"] = collect([](const FoldReport& fr) { return fr.fidelity; });
  agg["complexity_literals"] = collect([&](const FoldReport& fr) {
    return per_class_mean(fr, &ClassReport::complexity_literals);
  });
  agg["complexity_minterms"] = collect([&](const FoldReport& fr) {
    return per_class_mean(fr, &ClassReport::complexity_minterms);
  });
  if (config.record_timing) {
    agg["time_train_s"] = collect([](const FoldReport& fr) { return *fr.time_train_s; });
    agg["time_extract_s"] = collect([](const FoldReport& fr) { return *fr.time_extract_s; });
    agg["time_total_s"] =
        collect([](const FoldReport& fr) { return *fr.time_train_s + *fr.time_extract_s; });
  }

  std::vector<std::vector<DnfFormula>> per_fold;
  for (const auto& a : out.artifacts) per_fold.push_back(a.formulas);
  const ConsistencyResult cons = consistency(per_fold);
  out.report.consistency = cons.percentage;
  for (auto c : cons.empty_classes) {
    out.report.diagnostics.push_back("class '" + dataset.class_names[c] +
                                     "' has a False formula in every fold; consistency counts it as 0");
  }
  return out;
}

CrossvalOutcome crossval(const ExperimentConfig& config) {
  config.validate();
  return crossval(config, materialize_dataset(config.dataset));
}

// ---- reports -------------------------------------------------------------------

json report_to_json(const ExplanationReport& report) {
  json folds = json::array();
  for (const auto& f : report.folds) {
    json per_class = json::array();
    for (const auto& c : f.per_class) {
      per_class.push_back({{"name", c.name},
                           {"formula", c.formula},
                           {"f1", c.f1},
                           {"complexity_literals", c.complexity_literals},
                           {"complexity_minterms", c.complexity_minterms},
                           {"fidelity", c.fidelity}});
    }
    folds.push_back({{"seed", f.seed},
                     {"train_size", f.train_size},
                     {"validation_size", f.validation_size},
                     {"test_size", f.test_size},
                     {"model_accuracy", f.model_accuracy},
                     {"explanation_accuracy", f.explanation_accuracy},
                     {"fidelity", f.fidelity},
                     {"per_class", per_class},
                     {"time_train_s", f.time_train_s ? json(*f.time_train_s) : json(nullptr)},
                     {"time_extract_s", f.time_extract_s ? json(*f.time_extract_s) : json(nullptr)}});
  }
  json aggregate = json::object();
  for (const auto& [name, ms] : report.aggregate) aggregate[name] = mean_sem_json(ms);
  return json{{"config_echo", report.config_echo},
              {"folds", folds},
              {"aggregate", aggregate},
              {"consistency", report.consistency},
              {"diagnostics", report.diagnostics}};
}

ExplanationReport report_from_json(const json& j) {
  ExplanationReport r;
  try {
    r.config_echo = j.at("config_echo");
    for (const auto& f : j.at("folds")) {
      FoldReport fr;
      fr.seed = f.at("seed").get<std::uint64_t>();
      fr.train_size = f.at("train_size").get<std::size_t>();
      fr.validation_size = f.at("validation_size").get<std::size_t>();
      fr.test_size = f.at("test_size").get<std::size_t>();
      fr.model_accuracy = f.at("model_accuracy").get<double>();
      fr.explanation_accuracy = f.at("explanation_accuracy").get<double>();
      fr.fidelity = f.at("fidelity").get<double>();
      for (const auto& c : f.at("per_class")) {
        fr.per_class.push_back({c.at("name").get<std::string>(), c.at("formula").get<std::string>(),
                                c.at("f1").get<double>(),
                                c.at("complexity_literals").get<std::size_t>(),
                                c.at("complexity_minterms").get<std::size_t>(),
                                c.at("fidelity").get<double>()});
      }
      if (!f.at("time_train_s").is_null()) fr.time_train_s = f.at("time_train_s").get<double>();
      if (!f.at("time_extract_s").is_null()) fr.time_extract_s = f.at("time_extract_s").get<double>();
      r.folds.push_back(std::move(fr));
    }
    for (const auto& [name, ms] : j.at("aggregate").items()) {
      r.aggregate[name] = MeanSem{ms.at("mean").get<double>(), ms.at("sem").get<double>()};
    }
    r.consistency = j.at("consistency").get<double>();
    r.diagnostics = j.at("diagnostics").get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed report JSON: ") + e.what());
  }
  return r;
}

std::string report_markdown(const ExplanationReport& report) {
  std::ostringstream md;
  md << "| metric | mean ± sem |\n|---|---|\n";
  const std::pair<const char*, const char*> rates[] = {
      {"model_accuracy", "model accuracy (%)"},
      {"explanation_accuracy", "explanation accuracy (%)"},
      {"fidelity", "fidelity (%)"}};
  for (const auto& [key, label] : rates) {
    auto it = report.aggregate.find(key);
    if (it == report.aggregate.end()) continue;
    md << "| " << label << " | " << format_fixed(100.0 * it->second.mean, 2) << " ± "
       << format_fixed(100.0 * it->second.sem, 2) << " |\n";
  }
  const std::pair<const char*, const char*> counts[] = {
      {"complexity_literals", "complexity (literals)"},
      {"complexity_minterms", "complexity (minterms)"},
      {"time_train_s", "train time (s)"},
      {"time_extract_s", "extraction time (s)"},
      {"time_total_s", "total time (s)"}};
  for (const auto& [key, label] : counts) {
    auto it = report.aggregate.find(key);
    if (it == report.aggregate.end()) continue;
    md << "| " << label << " | " << format_fixed(it->second.mean, 2) << " ± "
       << format_fixed(it->second.sem, 2) << " |\n";
  }
  md << "| consistency (%) | " << format_fixed(report.consistency, 2) << " |\n";
  if (!report.folds.empty()) {
    md << "\nFormulas (fold 0):\n\n";
    for (const auto& c : report.folds.front().per_class) {
      md << "- " << c.name << ": `" << c.formula << "`\n";
    }
  }
  if (!report.diagnostics.empty()) {
    md << "\nDiagnostics:\n\n";
    for (const auto& d : report.diagnostics) md << "- " << d << "\n";
  }
  return md.str();
}

GridReport grid_sweep(const ExperimentConfig& config, std::span<const double> lambdas,
                      std::span<const double> taus) {
  if (lambdas.empty() || taus.empty()) throw ConfigError("grid_sweep: lambda and tau grids must be non-empty");
  config.validate();
  const ConceptDataset dataset = materialize_dataset(config.dataset);
  GridReport out;
  out.config_echo = config_to_json(config);
  out.config_echo["grid"] = {{"lambda", std::vector<double>(lambdas.begin(), lambdas.end())},
                             {"tau", std::vector<double>(taus.begin(), taus.end())}};
  for (double lambda : lambdas) {
    for (double tau : taus) {
      ExperimentConfig point = config;
      point.train.lambda = lambda;
      point.train.tau = tau;
      const auto outcome = crossval(point, dataset);
      const auto& agg = outcome.report.aggregate;
      out.rows.push_back({lambda, tau, agg.at("model_accuracy"), agg.at("explanation_accuracy"),
                          agg.at("complexity_literals")});
    }
  }
  return out;
}

json grid_to_json(const GridReport& report) {
  json rows = json::array();
  for (const auto& r : report.rows) {
    rows.push_back({{"lambda", r.lambda},
                    {"tau", r.tau},
                    {"model_accuracy", mean_sem_json(r.model_accuracy)},
                    {"explanation_accuracy", mean_sem_json(r.explanation_accuracy)},
                    {"complexity", mean_sem_json(r.complexity)}});
  }
  return json{{"config_echo", report.config_echo}, {"rows", rows}};
}

std::string grid_markdown(const GridReport& report) {
  std::ostringstream md;
  md << "| lambda | tau | model accuracy (%) | explanation accuracy (%) | complexity |\n"
     << "|---|---|---|---|---|\n";
  for (const auto& r : report.rows) {
    char lam[32];
    std::snprintf(lam, sizeof(lam), "%g", r.lambda);
    char tau[32];
    std::snprintf(tau, sizeof(tau), "%g", r.tau);
    md << "| " << lam << " | " << tau << " | " << format_fixed(100.0 * r.model_accuracy.mean, 2)
       << " ± " << format_fixed(100.0 * r.model_accuracy.sem, 2) << " | "
       << format_fixed(100.0 * r.explanation_accuracy.mean, 2) << " ± "
       << format_fixed(100.0 * r.explanation_accuracy.sem, 2) << " | "
       << format_fixed(r.complexity.mean, 2) << " ± " << format_fixed(r.complexity.sem, 2)
       << " |\n";
  }
  return md.str();
}

}  // namespace elens
