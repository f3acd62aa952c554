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

#include "elens/network.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "elens/errors.hpp"
#include "elens/random.hpp"

namespace elens {

namespace {

// out(n, o) = in(n, d) * W^T + b
RealMatrix layer_forward(const RealMatrix& in, const RealMatrix& w, std::span<const double> b) {
  RealMatrix out(in.rows(), w.rows());
  for (std::size_t n = 0; n < in.rows(); ++n) {
    const auto x = in.row(n);
    for (std::size_t o = 0; o < w.rows(); ++o) {
      const auto wr = w.row(o);
      double acc = 0.0;
      for (std::size_t d = 0; d < wr.size(); ++d) acc += wr[d] * x[d];
      out(n, o) = acc + b[o];
    }
  }
  return out;
}

RealMatrix apply_activation(const RealMatrix& z, Activation kind, double slope) {
  RealMatrix a = z;
  for (double& v : a.data()) v = activate(kind, v, slope);
  return a;
}

struct ClassCache {
  ConceptScores scores;
  RealMatrix gated;                // n x k
  std::vector<RealMatrix> pre;     // pre-activations of head and hidden layers
  std::vector<RealMatrix> post;    // activations of head and hidden layers
  RealVector logit;                // n
};

ClassCache forward_class(const ClassNetwork& cls, const RealMatrix& concepts, Activation act,
                         double slope) {
  ClassCache cache;
  cache.scores = compute_scores(cls.head);
  cache.gated = concepts;
  for (std::size_t n = 0; n < concepts.rows(); ++n) {
    auto row = cache.gated.row(n);
    for (std::size_t j = 0; j < row.size(); ++j) row[j] *= cache.scores.alpha_tilde[j];
  }
  cache.pre.push_back(layer_forward(cache.gated, cls.head.weights, cls.head.bias));
  cache.post.push_back(apply_activation(cache.pre.back(), act, slope));
  for (std::size_t l = 0; l + 1 < cls.trunk.size(); ++l) {
    cache.pre.push_back(layer_forward(cache.post.back(), cls.trunk[l].weights, cls.trunk[l].bias));
    cache.post.push_back(apply_activation(cache.pre.back(), act, slope));
  }
  const auto& top = cls.trunk.back();
  const RealMatrix out = layer_forward(cache.post.back(), top.weights, top.bias);
  cache.logit.assign(out.data().begin(), out.data().end());
  return cache;
}

double log_sum_exp(std::span<const double> v) {
  const double m = *std::max_element(v.begin(), v.end());
  double acc = 0.0;
  for (double x : v) acc += std::exp(x - m);
  return m + std::log(acc);
}

void append(std::vector<double>& out, std::span<const double> v) {
  out.insert(out.end(), v.begin(), v.end());
}

std::size_t copy_into(std::span<double> dst, std::span<const double> src, std::size_t offset) {
  std::copy(src.begin() + static_cast<std::ptrdiff_t>(offset),
            src.begin() + static_cast<std::ptrdiff_t>(offset + dst.size()), dst.begin());
  return offset + dst.size();
}

}  // namespace

// ---- config ----------------------------------------------------------------

void TrainConfig::validate() const {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ConfigError("lambda must be >= 0");
  if (!(tau > 0.0) || !std::isfinite(tau)) throw ConfigError("tau must be > 0");
  if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be > 0");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw ConfigError("epsilon must lie in (0, 1)");
  if (!(weight_decay >= 0.0)) throw ConfigError("weight_decay must be >= 0");
  if (hidden_units.empty()) throw ConfigError("hidden_units must list at least one layer");
  for (auto h : hidden_units) {
    if (h == 0) throw ConfigError("hidden_units entries must be positive");
  }
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
    throw ConfigError("Adam betas must lie in [0, 1)");
  }
  if (!(adam_epsilon > 0.0)) throw ConfigError("adam_epsilon must be > 0");
}

TrainConfig train_preset(std::string_view name) {
  TrainConfig c;
  if (name == "toy") {
    c.tau = 0.3;
    c.lambda = 1e-4;
    c.learning_rate = 1e-4;
    c.max_epochs = 18000;
    c.hidden_units = {20, 10};
    c.early_stopping = false;
    c.activation = Activation::kRelu;
    c.weight_decay = 1e-2;  // AdamW's customary default
  } else if (name == "parity" || name == "mnist") {
    c.lambda = 1e-7;
    c.tau = 5.0;
    c.max_epochs = 200;
    c.hidden_units = {10};
  } else if (name == "mimic") {
    c.lambda = 1e-3;
    c.tau = 0.7;
    c.max_epochs = 200;
    c.hidden_units = {20};
  } else if (name == "vdem") {
    c.lambda = 1e-5;
    c.tau = 5.0;
    c.max_epochs = 200;
    c.hidden_units = {20, 20};
  } else if (name == "cub") {
    c.lambda = 1e-4;
    c.tau = 0.7;
    c.max_epochs = 500;
    c.hidden_units = {10};
  } else {
    throw ConfigError("unknown preset '" + std::string(name) +
                      "' (expected toy, parity, mnist, mimic, vdem, cub)");
  }
  return c;
}

std::string to_string(RegularizerKind kind) {
  switch (kind) {
    case RegularizerKind::kEntropy: return "entropy";
    case RegularizerKind::kL1: return "l1";
    case RegularizerKind::kNone: return "none";
  }
  return "entropy";
}

RegularizerKind regularizer_from_string(std::string_view s) {
  if (s == "entropy") return RegularizerKind::kEntropy;
  if (s == "l1") return RegularizerKind::kL1;
  if (s == "none") return RegularizerKind::kNone;
  throw ConfigError("unknown regularizer '" + std::string(s) + "'");
}

std::string to_string(TaskLoss kind) {
  switch (kind) {
    case TaskLoss::kAuto: return "auto";
    case TaskLoss::kSoftmaxCrossEntropy: return "softmax_ce";
    case TaskLoss::kBinaryCrossEntropy: return "bce";
  }
  return "auto";
}

TaskLoss task_loss_from_string(std::string_view s) {
  if (s == "auto") return TaskLoss::kAuto;
  if (s == "softmax_ce") return TaskLoss::kSoftmaxCrossEntropy;
  if (s == "bce") return TaskLoss::kBinaryCrossEntropy;
  throw ConfigError("unknown task loss '" + std::string(s) + "'");
}

std::string to_string(Activation kind) {
  return kind == Activation::kRelu ? "relu" : "leaky_relu";
}

Activation activation_from_string(std::string_view s) {
  if (s == "relu") return Activation::kRelu;
  if (s == "leaky_relu") return Activation::kLeakyRelu;
  throw ConfigError("unknown activation '" + std::string(s) + "'");
}

// ---- network ---------------------------------------------------------------

EntropyNetwork::EntropyNetwork(std::vector<ClassNetwork> classes, TrainConfig config)
    : classes_(std::move(classes)), config_(std::move(config)) {
  for (const auto& cls : classes_) {
    cls.head.validate();
    if (cls.trunk.empty() || cls.trunk.back().weights.rows() != 1) {
      throw DimensionError("class network must end in a single output unit");
    }
    std::size_t width = cls.head.hidden_units();
    for (const auto& layer : cls.trunk) {
      if (layer.weights.cols() != width || layer.bias.size() != layer.weights.rows()) {
        throw DimensionError("class network layers do not chain");
      }
      width = layer.weights.rows();
    }
  }
}

EntropyNetwork EntropyNetwork::initialize(std::size_t num_concepts, std::size_t num_classes,
                                          const TrainConfig& config) {
  config.validate();
  Rng rng(config.seed);
  auto init = [&rng](std::size_t out, std::size_t in) {
    DenseLayer layer{RealMatrix(out, in), RealVector(out)};
    const double bound = 1.0 / std::sqrt(static_cast<double>(std::max<std::size_t>(in, 1)));
    for (double& w : layer.weights.data()) w = rng.uniform(-bound, bound);
    for (double& b : layer.bias) b = rng.uniform(-bound, bound);
    return layer;
  };
  std::vector<ClassNetwork> classes;
  for (std::size_t i = 0; i < num_classes; ++i) {
    ClassNetwork cls;
    auto head = init(config.hidden_units.front(), num_concepts);
    cls.head = EntropyHead{i, std::move(head.weights), std::move(head.bias), config.tau};
    std::size_t width = config.hidden_units.front();
    for (std::size_t l = 1; l < config.hidden_units.size(); ++l) {
      cls.trunk.push_back(init(config.hidden_units[l], width));
      width = config.hidden_units[l];
    }
    cls.trunk.push_back(init(1, width));
    classes.push_back(std::move(cls));
  }
  return EntropyNetwork(std::move(classes), config);
}

std::size_t EntropyNetwork::num_concepts() const noexcept {
  return classes_.empty() ? 0 : classes_.front().head.num_concepts();
}

RealMatrix EntropyNetwork::logits(const RealMatrix& concepts) const {
  if (concepts.cols() != num_concepts()) {
    throw DimensionError("network expects " + std::to_string(num_concepts()) +
                         " concepts, got " + std::to_string(concepts.cols()));
  }
  RealMatrix out(concepts.rows(), num_classes());
  for (std::size_t c = 0; c < num_classes(); ++c) {
    const auto cache = forward_class(classes_[c], concepts, config_.activation, config_.leaky_slope);
    for (std::size_t n = 0; n < concepts.rows(); ++n) out(n, c) = cache.logit[n];
  }
  return out;
}

RealMatrix EntropyNetwork::scores(const RealMatrix& concepts) const {
  RealMatrix s = logits(concepts);
  for (double& v : s.data()) v = sigmoid(v);
  return s;
}

ConceptScores EntropyNetwork::concept_scores(std::size_t class_index) const {
  return compute_scores(classes_.at(class_index).head);
}

std::size_t EntropyNetwork::parameter_count() const noexcept {
  std::size_t total = 0;
  for (const auto& cls : classes_) {
    total += cls.head.weights.size() + cls.head.bias.size();
    for (const auto& l : cls.trunk) total += l.weights.size() + l.bias.size();
  }
  return total;
}

std::vector<double> EntropyNetwork::flatten() const {
  std::vector<double> out;
  out.reserve(parameter_count());
  for (const auto& cls : classes_) {
    append(out, cls.head.weights.data());
    append(out, cls.head.bias);
    for (const auto& l : cls.trunk) {
      append(out, l.weights.data());
      append(out, l.bias);
    }
  }
  return out;
}

void EntropyNetwork::assign(std::span<const double> params) {
  if (params.size() != parameter_count()) {
    throw DimensionError("assign: " + std::to_string(params.size()) + " values for " +
                         std::to_string(parameter_count()) + " parameters");
  }
  std::size_t off = 0;
  for (auto& cls : classes_) {
    off = copy_into(cls.head.weights.data(), params, off);
    off = copy_into(cls.head.bias, params, off);
    for (auto& l : cls.trunk) {
      off = copy_into(l.weights.data(), params, off);
      off = copy_into(l.bias, params, off);
    }
  }
}

bool EntropyNetwork::operator==(const EntropyNetwork& other) const {
  if (classes_.size() != other.classes_.size()) return false;
  for (std::size_t c = 0; c < classes_.size(); ++c) {
    const auto& a = classes_[c];
    const auto& b = other.classes_[c];
    if (a.head.weights != b.head.weights || a.head.bias != b.head.bias || a.head.tau != b.head.tau ||
        a.trunk.size() != b.trunk.size()) {
      return false;
    }
    for (std::size_t l = 0; l < a.trunk.size(); ++l) {
      if (a.trunk[l].weights != b.trunk[l].weights || a.trunk[l].bias != b.trunk[l].bias) {
        return false;
      }
    }
  }
  return true;
}

Prediction predict(const EntropyNetwork& network, std::span<const double> concepts) {
  RealMatrix single(1, concepts.size(), RealVector(concepts.begin(), concepts.end()));
  const RealMatrix s = network.scores(single);
  Prediction p;
  p.scores.assign(s.data().begin(), s.data().end());
  p.label = static_cast<std::size_t>(
      std::max_element(p.scores.begin(), p.scores.end()) - p.scores.begin());
  p.outputs = binarize_concepts(p.scores, network.config().epsilon);
  return p;
}

TruthTable build_truth_table(const ConceptDataset& dataset, const EntropyNetwork& network,
                             std::size_t class_index, double epsilon) {
  const RealMatrix s = network.scores(dataset.concepts);
  RealVector column(s.rows());
  for (std::size_t n = 0; n < s.rows(); ++n) column[n] = s(n, class_index);
  const BooleanMask mask = compute_mask(network.concept_scores(class_index), epsilon);
  return build_truth_table(dataset, column, mask, class_index);
}

double label_accuracy(const RealMatrix& scores, const BoolMatrix& targets, double epsilon) {
  if (scores.rows() != targets.rows() || scores.cols() != targets.cols()) {
    throw DimensionError("label_accuracy: scores and targets differ in shape");
  }
  if (scores.rows() == 0) return 0.0;
  bool single = true;
  for (std::size_t n = 0; n < targets.rows() && single; ++n) {
    std::size_t hot = 0;
    for (auto t : targets.row(n)) hot += t;
    single = hot == 1;
  }
  std::size_t hits = 0;
  if (single) {
    for (std::size_t n = 0; n < scores.rows(); ++n) {
      const auto r = scores.row(n);
      const auto pred = static_cast<std::size_t>(std::max_element(r.begin(), r.end()) - r.begin());
      hits += targets(n, pred) ? 1 : 0;
    }
    return static_cast<double>(hits) / static_cast<double>(scores.rows());
  }
  for (std::size_t n = 0; n < scores.rows(); ++n) {
    for (std::size_t c = 0; c < scores.cols(); ++c) {
      hits += ((scores(n, c) >= epsilon) == (targets(n, c) != 0)) ? 1 : 0;
    }
  }
  return static_cast<double>(hits) / static_cast<double>(scores.rows() * scores.cols());
}

// ---- loss ----------------------------------------------------------------

double entropy_of_distribution(std::span<const double> alpha) {
  double h = 0.0;
  for (double a : alpha) {
    if (a > 0.0) h -= a * std::log(a);
  }
  return h;
}

TaskLoss resolve_task_loss(TaskLoss requested, const BoolMatrix& targets) {
  if (requested != TaskLoss::kAuto) return requested;
  for (std::size_t n = 0; n < targets.rows(); ++n) {
    std::size_t hot = 0;
    for (auto t : targets.row(n)) hot += t;
    if (hot != 1) return TaskLoss::kBinaryCrossEntropy;
  }
  return TaskLoss::kSoftmaxCrossEntropy;
}

namespace {

// Task loss and its gradient w.r.t. the logits (n x r).
double task_loss_and_grad(const RealMatrix& logits, const BoolMatrix& targets, TaskLoss kind,
                          RealMatrix* grad) {
  const std::size_t n = logits.rows();
  const std::size_t r = logits.cols();
  if (targets.rows() != n || targets.cols() != r) {
    throw DimensionError("loss: logits (" + std::to_string(n) + "x" + std::to_string(r) +
                         ") vs targets (" + std::to_string(targets.rows()) + "x" +
                         std::to_string(targets.cols()) + ")");
  }
  if (grad) *grad = RealMatrix(n, r);
  if (n == 0) return 0.0;
  double loss = 0.0;
  if (kind == TaskLoss::kSoftmaxCrossEntropy) {
    const double inv_n = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto l = logits.row(i);
      const auto y = targets.row(i);
      double mass = 0.0;
      for (auto t : y) mass += t;
      if (mass == 0.0) continue;
      const double lse = log_sum_exp(l);
      for (std::size_t c = 0; c < r; ++c) {
        const double target = y[c] / mass;
        if (target > 0.0) loss -= target * (l[c] - lse);
        if (grad) (*grad)(i, c) = (std::exp(l[c] - lse) - target) * inv_n;
      }
    }
    return loss * inv_n;
  }
  if (kind == TaskLoss::kBinaryCrossEntropy) {
    const double inv = 1.0 / static_cast<double>(n * r);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t c = 0; c < r; ++c) {
        const double l = logits(i, c);
        const double y = targets(i, c) ? 1.0 : 0.0;
        loss += std::max(l, 0.0) - l * y + std::log1p(std::exp(-std::abs(l)));
        if (grad) (*grad)(i, c) = (sigmoid(l) - y) * inv;
      }
    }
    return loss * inv;
  }
  throw ConfigError("task loss must be resolved before evaluation");
}

double regularizer_value(const ConceptScores& s, RegularizerKind kind) {
  switch (kind) {
    case RegularizerKind::kEntropy: return entropy_of_distribution(s.alpha);
    case RegularizerKind::kL1: {
      double acc = 0.0;
      for (double g : s.gamma) acc += g;
      return acc;
    }
    case RegularizerKind::kNone: return 0.0;
  }
  return 0.0;
}

}  // namespace

LossBreakdown total_loss(const RealMatrix& logits, const BoolMatrix& targets,
                         std::span<const ConceptScores> scores, const TrainConfig& config,
                         TaskLoss loss_kind) {
  if (scores.size() != logits.cols()) {
    throw DimensionError("total_loss: " + std::to_string(scores.size()) +
                         " score sets for " + std::to_string(logits.cols()) + " classes");
  }
  LossBreakdown out;
  out.task = task_loss_and_grad(logits, targets, loss_kind, nullptr);
  for (const auto& s : scores) out.regularizer += regularizer_value(s, config.regularizer);
  out.total = config.regularizer == RegularizerKind::kNone
                  ? out.task
                  : out.task + config.lambda * out.regularizer;
  return out;
}

LossAndGradient backward(const EntropyNetwork& network, const RealMatrix& concepts,
                         const BoolMatrix& targets, const TrainConfig& config,
                         TaskLoss loss_kind) {
  const auto& arch = network.config();
  const std::size_t n = concepts.rows();
  const std::size_t r = network.num_classes();

  std::vector<ClassCache> caches;
  caches.reserve(r);
  LossAndGradient out;
  out.logits = RealMatrix(n, r);
  std::vector<ConceptScores> all_scores;
  for (std::size_t c = 0; c < r; ++c) {
    caches.push_back(forward_class(network.classes()[c], concepts, arch.activation, arch.leaky_slope));
    for (std::size_t i = 0; i < n; ++i) out.logits(i, c) = caches.back().logit[i];
    all_scores.push_back(caches.back().scores);
  }

  RealMatrix dlogits;
  out.loss.task = task_loss_and_grad(out.logits, targets, loss_kind, &dlogits);
  for (const auto& s : all_scores) out.loss.regularizer += regularizer_value(s, config.regularizer);
  const double lambda = config.regularizer == RegularizerKind::kNone ? 0.0 : config.lambda;
  out.loss.total = out.loss.task + lambda * out.loss.regularizer;

  out.gradient.reserve(network.parameter_count());
  for (std::size_t c = 0; c < r; ++c) {
    const ClassNetwork& cls = network.classes()[c];
    const ClassCache& cache = caches[c];
    const std::size_t depth = cls.trunk.size();
    std::vector<DenseLayer> grads(depth);

    // Gradient w.r.t. the output of the layer currently being processed.
    RealMatrix upstream(n, 1);
    for (std::size_t i = 0; i < n; ++i) upstream(i, 0) = dlogits(i, c);

    for (std::size_t l = depth; l-- > 0;) {
      const DenseLayer& layer = cls.trunk[l];
      const RealMatrix& input = cache.post[l];
      DenseLayer& g = grads[l];
      g.weights = RealMatrix(layer.weights.rows(), layer.weights.cols());
      g.bias.assign(layer.bias.size(), 0.0);
      RealMatrix dinput(n, layer.weights.cols());
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t o = 0; o < layer.weights.rows(); ++o) {
          const double d = upstream(i, o);
          if (d == 0.0) continue;
          g.bias[o] += d;
          for (std::size_t k = 0; k < layer.weights.cols(); ++k) {
            g.weights(o, k) += d * input(i, k);
            dinput(i, k) += d * layer.weights(o, k);
          }
        }
      }
      // Through the activation that produced `input`.
      const RealMatrix& pre = cache.pre[l];
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < dinput.cols(); ++k) {
          dinput(i, k) *= activate_derivative(arch.activation, pre(i, k), arch.leaky_slope);
        }
      }
      upstream = std::move(dinput);
    }

    // Entropy head: upstream is dL/dz0 (n x hidden).
    const EntropyHead& head = cls.head;
    const std::size_t hidden = head.hidden_units();
    const std::size_t k = head.num_concepts();
    RealMatrix dW(hidden, k);
    RealVector db(hidden, 0.0);
    RealVector dgate(k, 0.0);  // dL/d alpha_tilde
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t h = 0; h < hidden; ++h) {
        const double d = upstream(i, h);
        if (d == 0.0) continue;
        db[h] += d;
        for (std::size_t j = 0; j < k; ++j) {
          dW(h, j) += d * cache.gated(i, j);
          dgate[j] += d * head.weights(h, j) * concepts(i, j);
        }
      }
    }

    // alpha_tilde_j = exp((gamma_j - gamma_m) / tau), m = argmax gamma.
    const auto& s = cache.scores;
    RealVector dgamma(k, 0.0);
    if (k > 0) {
      const std::size_t m = static_cast<std::size_t>(
          std::max_element(s.alpha.begin(), s.alpha.end()) - s.alpha.begin());
      double weighted = 0.0;
      for (std::size_t j = 0; j < k; ++j) weighted += dgate[j] * s.alpha_tilde[j];
      for (std::size_t j = 0; j < k; ++j) dgamma[j] = dgate[j] * s.alpha_tilde[j] / head.tau;
      dgamma[m] -= weighted / head.tau;
    }
    if (lambda != 0.0) {
      if (config.regularizer == RegularizerKind::kEntropy) {
        const double h_alpha = entropy_of_distribution(s.alpha);
        for (std::size_t j = 0; j < k; ++j) {
          if (s.alpha[j] > 0.0) {
            dgamma[j] -= lambda * s.alpha[j] * (std::log(s.alpha[j]) + h_alpha) / head.tau;
          }
        }
      } else if (config.regularizer == RegularizerKind::kL1) {
        for (std::size_t j = 0; j < k; ++j) dgamma[j] += lambda;
      }
    }
    // gamma_j = sum_h |W(h, j)|
    for (std::size_t h = 0; h < hidden; ++h) {
      for (std::size_t j = 0; j < k; ++j) {
        const double w = head.weights(h, j);
        const double sign = w > 0.0 ? 1.0 : (w < 0.0 ? -1.0 : 0.0);
        dW(h, j) += dgamma[j] * sign;
      }
    }

    append(out.gradient, dW.data());
    append(out.gradient, db);
    for (const auto& g : grads) {
      append(out.gradient, g.weights.data());
      append(out.gradient, g.bias);
    }
  }
  return out;
}

// ---- optimization --------------------------------------------------------

AdamW::AdamW(std::size_t size, double learning_rate, double beta1, double beta2, double epsilon,
             double weight_decay)
    : lr_(learning_rate),
      beta1_(beta1),
      beta2_(beta2),
      eps_(epsilon),
      weight_decay_(weight_decay),
      m_(size, 0.0),
      v_(size, 0.0) {}

void AdamW::step(std::span<double> params, std::span<const double> grads) {
  if (params.size() != m_.size() || grads.size() != m_.size()) {
    throw DimensionError("AdamW::step: buffer sizes differ from optimizer state");
  }
  ++step_;
  const double t = static_cast<double>(step_);
  const double bc1 = 1.0 - std::pow(beta1_, t);
  const double bc2 = 1.0 - std::pow(beta2_, t);
  const double step_size = lr_ / bc1;
  const double sqrt_bc2 = std::sqrt(bc2);
  for (std::size_t i = 0; i < params.size(); ++i) {
    params[i] *= 1.0 - lr_ * weight_decay_;
    m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * grads[i];
    v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * grads[i] * grads[i];
    const double denom = std::sqrt(v_[i]) / sqrt_bc2 + eps_;
    params[i] -= step_size * m_[i] / denom;
  }
}

TrainResult train(EntropyNetwork network, const ConceptDataset& train_set,
                  const ConceptDataset& validation_set, const TrainConfig& config) {
  config.validate();
  if (train_set.num_concepts() != network.num_concepts() ||
      train_set.num_classes() != network.num_classes()) {
    throw DimensionError("train: dataset shape (" + std::to_string(train_set.num_concepts()) +
                         " concepts, " + std::to_string(train_set.num_classes()) +
                         " classes) does not match the network");
  }
  const ConceptDataset& val = validation_set.num_samples() > 0 ? validation_set : train_set;
  const TaskLoss loss_kind = resolve_task_loss(config.task_loss, train_set.targets);

  TrainResult result{std::move(network), {}};
  EntropyNetwork& net = result.network;
  std::vector<double> params = net.flatten();
  AdamW opt(params.size(), config.learning_rate, config.beta1, config.beta2, config.adam_epsilon,
            config.weight_decay);
  std::vector<double> best_params;
  double best_val = -1.0;

  for (std::size_t epoch = 0; epoch < config.max_epochs; ++epoch) {
    LossAndGradient lg = backward(net, train_set.concepts, train_set.targets, config, loss_kind);
    if (!std::isfinite(lg.loss.total) || !all_finite(lg.gradient)) {
      throw TrainingError("non-finite loss at epoch " + std::to_string(epoch) +
                          " (task=" + std::to_string(lg.loss.task) +
                          ", regularizer=" + std::to_string(lg.loss.regularizer) + ")");
    }
    EpochRecord rec;
    rec.total_loss = lg.loss.total;
    rec.task_loss = lg.loss.task;
    rec.regularizer = lg.loss.regularizer;
    RealMatrix train_scores = lg.logits;
    for (double& v : train_scores.data()) v = sigmoid(v);
    rec.train_accuracy = label_accuracy(train_scores, train_set.targets, config.epsilon);

    opt.step(params, lg.gradient);
    net.assign(params);
    rec.validation_accuracy = label_accuracy(net.scores(val.concepts), val.targets, config.epsilon);
    result.history.epochs.push_back(rec);

    if (rec.validation_accuracy >= best_val) {  // ties: keep the more trained epoch
      best_val = rec.validation_accuracy;
      result.history.best_epoch = epoch;
      if (config.early_stopping) best_params = params;
    }
  }
  if (config.early_stopping && !best_params.empty()) {
    net.assign(best_params);
    result.history.restored_best = true;
  }
  result.network = EntropyNetwork(std::move(net.classes()), config);
  return result;
}

}  // namespace elens
