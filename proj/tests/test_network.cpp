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

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "elens/data_io.hpp"
#include "elens/errors.hpp"
#include "elens/network.hpp"
#include "gradient_oracle.hpp"
#include "loss_oracle.hpp"
#include "test_support.hpp"

namespace elens {
namespace {

using testing::make_dataset;

TEST(Entropy, KnownValues) {
  EXPECT_EQ(entropy_of_distribution(RealVector{0, 1, 0}), 0.0);
  EXPECT_NEAR(entropy_of_distribution(RealVector(4, 0.25)), std::log(4.0), 1e-12);
  EXPECT_NEAR(entropy_of_distribution(RealVector{0.5, 0.5}), 0.6931, 1e-4);
}

using testing::binary_ce;
using testing::softmax_ce;

ConceptScores scores_with_alpha(RealVector alpha) {
  ConceptScores s;
  s.gamma = RealVector(alpha.size(), 1.0);
  s.alpha_tilde = RealVector(alpha.size(), 1.0);
  s.alpha = std::move(alpha);
  return s;
}

TEST(TotalLoss, ZeroLambdaIsTheTaskCrossEntropy) {
  std::mt19937_64 gen(21);
  const RealMatrix logits = testing::random_matrix(gen, 6, 3, -3, 3);
  BoolMatrix onehot(6, 3);
  for (std::size_t i = 0; i < 6; ++i) onehot(i, i % 3) = 1;
  TrainConfig cfg;
  cfg.lambda = 0.0;
  const std::vector<ConceptScores> s(3, scores_with_alpha({0.2, 0.3, 0.5}));
  EXPECT_NEAR(total_loss(logits, onehot, s, cfg, TaskLoss::kSoftmaxCrossEntropy).total,
              softmax_ce(logits, onehot), 1e-12);
  EXPECT_NEAR(total_loss(logits, onehot, s, cfg, TaskLoss::kBinaryCrossEntropy).total,
              binary_ce(logits, onehot), 1e-12);
}

TEST(TotalLoss, OneHotAlphaAddsNothing) {
  std::mt19937_64 gen(22);
  const RealMatrix logits = testing::random_matrix(gen, 4, 2, -3, 3);
  BoolMatrix y(4, 2);
  for (std::size_t i = 0; i < 4; ++i) y(i, i % 2) = 1;
  TrainConfig cfg;
  cfg.lambda = 3.0;
  const std::vector<ConceptScores> s(2, scores_with_alpha({0.0, 1.0, 0.0}));
  EXPECT_NEAR(total_loss(logits, y, s, cfg, TaskLoss::kSoftmaxCrossEntropy).total, softmax_ce(logits, y),
              1e-12);
}

TEST(TotalLoss, UniformAlphaArithmetic) {
  // BCE of exactly 1.0 per entry: logit -ln(e-1) on a positive, +ln(e-1) on a negative.
  const double l = std::log(std::exp(1.0) - 1.0);
  RealMatrix logits(1, 2, std::vector<double>{-l, l});
  BoolMatrix y(1, 2);
  y(0, 0) = 1;
  TrainConfig cfg;
  cfg.lambda = 0.1;
  const std::vector<ConceptScores> s(2, scores_with_alpha({0.5, 0.5}));
  const LossBreakdown out = total_loss(logits, y, s, cfg, TaskLoss::kBinaryCrossEntropy);
  EXPECT_NEAR(out.task, 1.0, 1e-12);
  EXPECT_NEAR(out.total, 1.0 + 0.1 * 2.0 * std::log(2.0), 1e-12);
  EXPECT_NEAR(out.total, 1.1386, 1e-4);
}

TEST(TotalLoss, L1AndNoneRegularizers) {
  RealMatrix logits(1, 1, std::vector<double>{0.0});
  BoolMatrix y(1, 1);
  y(0, 0) = 1;
  ConceptScores s = scores_with_alpha({0.5, 0.5});
  s.gamma = {0.7, 1.3};
  TrainConfig cfg;
  cfg.lambda = 0.5;
  cfg.regularizer = RegularizerKind::kL1;
  const std::vector<ConceptScores> ss{s};
  EXPECT_NEAR(total_loss(logits, y, ss, cfg, TaskLoss::kBinaryCrossEntropy).total, std::log(2.0) + 0.5 * 2.0,
              1e-12);
  cfg.regularizer = RegularizerKind::kNone;
  EXPECT_NEAR(total_loss(logits, y, ss, cfg, TaskLoss::kBinaryCrossEntropy).total, std::log(2.0), 1e-12);
}

TEST(TotalLoss, ShapeMismatchThrows) {
  TrainConfig cfg;
  EXPECT_THROW(total_loss(RealMatrix(2, 2), BoolMatrix(2, 3), std::vector<ConceptScores>(2), cfg,
                          TaskLoss::kBinaryCrossEntropy),
               DimensionError);
  EXPECT_THROW(total_loss(RealMatrix(2, 2), BoolMatrix(2, 2), std::vector<ConceptScores>(1), cfg,
                          TaskLoss::kBinaryCrossEntropy),
               DimensionError);
}

TEST(ResolveTaskLoss, SingleVersusMultiLabel) {
  BoolMatrix single(2, 2);
  single(0, 0) = single(1, 1) = 1;
  BoolMatrix multi = single;
  multi(0, 1) = 1;
  EXPECT_EQ(resolve_task_loss(TaskLoss::kAuto, single), TaskLoss::kSoftmaxCrossEntropy);
  EXPECT_EQ(resolve_task_loss(TaskLoss::kAuto, multi), TaskLoss::kBinaryCrossEntropy);
  EXPECT_EQ(resolve_task_loss(TaskLoss::kBinaryCrossEntropy, single), TaskLoss::kBinaryCrossEntropy);
}

TEST(Backward, SmallNetworkMatchesFiniteDifferences) {
  // 6 concepts, 2 classes, 5 hidden units.
  std::mt19937_64 gen(23);
  for (auto reg : {RegularizerKind::kEntropy, RegularizerKind::kL1, RegularizerKind::kNone}) {
    testing::GradientCase gc;
    gc.config.regularizer = reg;
    gc.config.lambda = 0.3;
    gc.config.tau = 0.8;
    gc.config.hidden_units = {5};
    gc.config.seed = 5;
    gc.network = EntropyNetwork::initialize(6, 2, gc.config);
    gc.concepts = testing::random_matrix(gen, 5, 6, 0.0, 1.0);
    gc.targets = BoolMatrix(5, 2);
    for (std::size_t i = 0; i < 5; ++i) gc.targets(i, i % 2) = 1;
    gc.loss_kind = TaskLoss::kSoftmaxCrossEntropy;
    EXPECT_LE(testing::max_relative_gradient_error(gc), 1e-4) << to_string(reg);
  }
}

TEST(Backward, RandomNetworksMatchFiniteDifferences) {
  std::mt19937_64 gen(24);
  for (auto reg : {RegularizerKind::kEntropy, RegularizerKind::kL1, RegularizerKind::kNone}) {
    for (int trial = 0; trial < 10; ++trial) {
      const auto gc = testing::random_gradient_case(gen, reg);
      EXPECT_LE(testing::max_relative_gradient_error(gc), 1e-4) << to_string(reg) << " #" << trial;
    }
  }
}

TEST(Backward, EntropyTermGradientMatchesFiniteDifferences) {
  // Isolate the regularizer: gradient(lambda) - gradient(0) against d(lambda * H(alpha(W)))/dW.
  std::mt19937_64 gen(25);
  auto gc = testing::random_gradient_case(gen, RegularizerKind::kEntropy);
  TrainConfig none = gc.config;
  none.lambda = 0.0;
  const auto with = backward(gc.network, gc.concepts, gc.targets, gc.config, gc.loss_kind).gradient;
  const auto without = backward(gc.network, gc.concepts, gc.targets, none, gc.loss_kind).gradient;
  auto regularizer = [&](const EntropyNetwork& net) {
    double acc = 0.0;
    for (std::size_t c = 0; c < net.num_classes(); ++c) acc += entropy_of_distribution(net.concept_scores(c).alpha);
    return gc.config.lambda * acc;
  };
  EntropyNetwork probe = gc.network;
  const auto base = probe.flatten();
  auto p = base;
  const double h = 1e-5;
  for (std::size_t i = 0; i < p.size(); ++i) {
    p[i] = base[i] + h;
    probe.assign(p);
    const double up = regularizer(probe);
    p[i] = base[i] - h;
    probe.assign(p);
    const double down = regularizer(probe);
    p[i] = base[i];
    const double numeric = (up - down) / (2 * h);
    const double analytic = with[i] - without[i];
    EXPECT_LE(std::fabs(analytic - numeric) / std::max({std::fabs(numeric), std::fabs(analytic), 1e-5}), 1e-4)
        << "parameter " << i;
  }
}

TEST(Backward, FlatGateLeavesBiasAndTrunkGradientsOfAPlainNetwork) {
  // Identical head columns give alpha_tilde == 1, so with lambda = 0 every
  // gradient outside the head weights equals that of an ungated network.
  TrainConfig cfg;
  cfg.lambda = 0.0;
  cfg.hidden_units = {3};
  cfg.activation = Activation::kLeakyRelu;
  cfg.seed = 9;
  EntropyNetwork net = EntropyNetwork::initialize(2, 1, cfg);
  auto& cls = net.classes()[0];
  cls.head.weights = RealMatrix(3, 2, std::vector<double>{0.4, 0.4, -0.3, -0.3, 0.2, 0.2});
  cls.head.bias = {0.1, -0.05, 0.0};
  const RealMatrix x(2, 2, std::vector<double>{0.9, 0.2, 0.3, 0.6});
  BoolMatrix y(2, 1);
  y(0, 0) = 1;
  const auto g = backward(net, x, y, cfg, TaskLoss::kBinaryCrossEntropy).gradient;

  // Plain MLP: h = W x + b, a = leaky(h), z = v.a + c, loss = mean BCE.
  const auto& w = cls.head.weights;
  const auto& top = cls.trunk[0];
  RealVector db(3, 0.0);
  RealVector dv(3, 0.0);
  double dc = 0.0;
  for (std::size_t i = 0; i < 2; ++i) {
    RealVector h(3);
    RealVector a(3);
    double z = top.bias[0];
    for (std::size_t u = 0; u < 3; ++u) {
      h[u] = w(u, 0) * x(i, 0) + w(u, 1) * x(i, 1) + cls.head.bias[u];
      a[u] = h[u] > 0 ? h[u] : cfg.leaky_slope * h[u];
      z += top.weights(0, u) * a[u];
    }
    const double dz = (1.0 / (1.0 + std::exp(-z)) - y(i, 0)) / 2.0;
    dc += dz;
    for (std::size_t u = 0; u < 3; ++u) {
      dv[u] += dz * a[u];
      db[u] += dz * top.weights(0, u) * (h[u] > 0 ? 1.0 : cfg.leaky_slope);
    }
  }
  // Layout: head W (6), head b (3), top W (3), top b (1).
  ASSERT_EQ(g.size(), 13u);
  for (std::size_t u = 0; u < 3; ++u) {
    EXPECT_NEAR(g[6 + u], db[u], 1e-12);
    EXPECT_NEAR(g[9 + u], dv[u], 1e-12);
  }
  EXPECT_NEAR(g[12], dc, 1e-12);
}

TEST(AdamW, FirstStepMatchesHandComputation) {
  AdamW opt(2, 0.1, 0.9, 0.999, 1e-8, 0.01);
  std::vector<double> p{1.0, -2.0};
  const std::vector<double> g{0.5, -0.25};
  opt.step(p, g);
  // Bias-corrected first step moves by lr * g / (|g| + eps) after decay p *= 1 - lr * wd.
  EXPECT_NEAR(p[0], 1.0 * (1 - 0.001) - 0.1 * 0.5 / (0.5 + 1e-8), 1e-12);
  EXPECT_NEAR(p[1], -2.0 * (1 - 0.001) + 0.1 * 0.25 / (0.25 + 1e-8), 1e-12);
  EXPECT_EQ(opt.steps(), 1u);
}

TEST(Network, FlattenAssignRoundTrip) {
  TrainConfig cfg;
  cfg.hidden_units = {4, 3};
  const auto net = EntropyNetwork::initialize(5, 2, cfg);
  EXPECT_EQ(net.flatten().size(), net.parameter_count());
  EntropyNetwork copy = EntropyNetwork::initialize(5, 2, TrainConfig{});
  TrainConfig other = cfg;
  other.seed = 99;
  copy = EntropyNetwork::initialize(5, 2, other);
  EXPECT_FALSE(copy == net);
  copy.assign(net.flatten());
  EXPECT_EQ(copy.flatten(), net.flatten());
}

TEST(Network, InitializationIsFanInBoundedAndSeeded) {
  TrainConfig cfg;
  cfg.hidden_units = {8};
  cfg.seed = 3;
  const auto a = EntropyNetwork::initialize(16, 2, cfg);
  const auto b = EntropyNetwork::initialize(16, 2, cfg);
  EXPECT_TRUE(a == b);
  for (const auto& cls : a.classes()) {
    for (double w : cls.head.weights.data()) EXPECT_LE(std::fabs(w), 1.0 / 4.0);
    for (double w : cls.trunk[0].weights.data()) EXPECT_LE(std::fabs(w), 1.0 / std::sqrt(8.0));
  }
}

TEST(Predict, ZeroLogitIsAPositiveOutput) {
  TrainConfig cfg;
  cfg.hidden_units = {2};
  EntropyNetwork net = EntropyNetwork::initialize(3, 1, cfg);
  net.assign(std::vector<double>(net.parameter_count(), 0.0));
  const Prediction p = predict(net, RealVector{0.2, 0.5, 0.9});
  EXPECT_EQ(p.scores[0], 0.5);
  EXPECT_EQ(p.outputs[0], 1);
  EXPECT_EQ(p.label, 0u);
}

TEST(Predict, DeadPaddingDoesNotChangeScores) {
  TrainConfig cfg;
  cfg.hidden_units = {4};
  cfg.seed = 4;
  const auto small = EntropyNetwork::initialize(3, 2, cfg);
  // Same network with two zero-weight padding concepts appended.
  auto classes = small.classes();
  for (auto& cls : classes) {
    RealMatrix w(cls.head.weights.rows(), 5);
    for (std::size_t i = 0; i < w.rows(); ++i) {
      for (std::size_t j = 0; j < 3; ++j) w(i, j) = cls.head.weights(i, j);
    }
    cls.head.weights = w;
  }
  const EntropyNetwork padded(classes, cfg);
  const Prediction a = predict(small, RealVector{0.3, 0.8, 0.1});
  const Prediction b = predict(padded, RealVector{0.3, 0.8, 0.1, 0.0, 0.0});
  EXPECT_EQ(a.scores, b.scores);
}

TEST(LabelAccuracy, ArgmaxForSingleLabelEntriesForMultiLabel) {
  RealMatrix scores(2, 2, std::vector<double>{0.9, 0.8, 0.2, 0.1});
  BoolMatrix single(2, 2);
  single(0, 0) = 1;
  single(1, 1) = 1;
  EXPECT_DOUBLE_EQ(label_accuracy(scores, single, 0.5), 0.5);
  BoolMatrix multi = single;
  multi(0, 1) = 1;
  // Entries: (1,1) vs (1,1) ok ok; (0,0) vs (0,1) ok miss -> 3/4.
  EXPECT_DOUBLE_EQ(label_accuracy(scores, multi, 0.5), 0.75);
}

TEST(TrainConfig, RejectsIllegalValues) {
  TrainConfig c;
  c.lambda = -1.0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = TrainConfig{};
  c.tau = 0.0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = TrainConfig{};
  c.hidden_units = {};
  EXPECT_THROW(c.validate(), ConfigError);
  EXPECT_NO_THROW(train_preset("toy").validate());
  EXPECT_EQ(train_preset("mnist").lambda, 1e-7);
  EXPECT_EQ(train_preset("parity").tau, 5.0);
}

ConceptDataset tiny_task() {
  // y0 = c0, y1 = not c0, c1 is noise.
  return make_dataset({{1, 0}, {1, 1}, {0, 0}, {0, 1}, {1, 0.2}, {0, 0.7}},
                      {{1, 0}, {1, 0}, {0, 1}, {0, 1}, {1, 0}, {0, 1}});
}

TEST(Train, ZeroEpochsReturnsTheInitialNetwork) {
  TrainConfig cfg;
  cfg.max_epochs = 0;
  const auto ds = tiny_task();
  const auto net = EntropyNetwork::initialize(2, 2, cfg);
  const auto result = train(net, ds, ds, cfg);
  EXPECT_TRUE(result.network == net);
  EXPECT_TRUE(result.history.epochs.empty());
  EXPECT_FALSE(result.history.best_epoch.has_value());
}

TEST(Train, SeededRunsAreBitIdentical) {
  TrainConfig cfg;
  cfg.max_epochs = 50;
  cfg.seed = 17;
  const auto ds = tiny_task();
  const auto a = train(EntropyNetwork::initialize(2, 2, cfg), ds, ds, cfg);
  const auto b = train(EntropyNetwork::initialize(2, 2, cfg), ds, ds, cfg);
  EXPECT_EQ(a.network.flatten(), b.network.flatten());
  ASSERT_EQ(a.history.epochs.size(), b.history.epochs.size());
  for (std::size_t e = 0; e < a.history.epochs.size(); ++e) {
    EXPECT_EQ(a.history.epochs[e].total_loss, b.history.epochs[e].total_loss);
    EXPECT_EQ(a.history.epochs[e].validation_accuracy, b.history.epochs[e].validation_accuracy);
  }
}

TEST(Train, RecordsBoundedEntropyAndRestoresTheBestEpoch) {
  TrainConfig cfg;
  cfg.max_epochs = 150;
  cfg.seed = 2;
  cfg.lambda = 0.0;  // keep the history purely task-driven
  const auto ds = tiny_task();
  const auto result = train(EntropyNetwork::initialize(2, 2, cfg), ds, ds, cfg);
  ASSERT_TRUE(result.history.best_epoch.has_value());
  double best = 0.0;
  for (const auto& rec : result.history.epochs) {
    best = std::max(best, rec.validation_accuracy);
    EXPECT_GE(rec.regularizer, 0.0);
    EXPECT_LE(rec.regularizer, 2 * std::log(2.0) + 1e-12);
  }
  const auto& hist = result.history;
  EXPECT_EQ(hist.epochs[*hist.best_epoch].validation_accuracy, best);
  EXPECT_TRUE(hist.restored_best);
  const double restored = label_accuracy(result.network.scores(ds.concepts), ds.targets, cfg.epsilon);
  EXPECT_EQ(restored, best);
  EXPECT_GE(restored, hist.epochs.back().validation_accuracy);
  EXPECT_EQ(restored, 1.0);
}

TEST(Train, NonFiniteLossAborts) {
  TrainConfig cfg;
  cfg.max_epochs = 50;
  cfg.learning_rate = 1e305;
  const auto ds = tiny_task();
  try {
    train(EntropyNetwork::initialize(2, 2, cfg), ds, ds, cfg);
    FAIL() << "expected TrainingError";
  } catch (const TrainingError& e) {
    EXPECT_NE(std::string(e.what()).find("epoch"), std::string::npos);
  }
}

TEST(Train, ShapeMismatchThrows) {
  TrainConfig cfg;
  const auto ds = tiny_task();
  EXPECT_THROW(train(EntropyNetwork::initialize(3, 2, cfg), ds, ds, cfg), DimensionError);
}

std::size_t kept_for_class(const EntropyNetwork& net, std::size_t c) {
  return compute_mask(net.concept_scores(c), 0.5).popcount();
}

TEST(Train, ToyFitsAndEntropyPressurePrunesConcepts) {
  const auto ds = synth_toy(100);
  TrainConfig cfg = train_preset("toy");
  cfg.seed = 1;
  const auto regularized = train(EntropyNetwork::initialize(ds.num_concepts(), 4, cfg), ds, ds, cfg);
  EXPECT_EQ(regularized.history.epochs.back().train_accuracy, 1.0);

  TrainConfig plain = cfg;
  plain.lambda = 0.0;
  const auto unregularized = train(EntropyNetwork::initialize(ds.num_concepts(), 4, plain), ds, ds, plain);
  TrainConfig strong = cfg;
  strong.lambda = 1e-3;
  const auto pruned = train(EntropyNetwork::initialize(ds.num_concepts(), 4, strong), ds, ds, strong);
  EXPECT_LT(kept_for_class(pruned.network, 0), kept_for_class(unregularized.network, 0));
}

}  // namespace
}  // namespace elens
