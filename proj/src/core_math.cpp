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

#include "elens/core_math.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "elens/errors.hpp"

namespace elens {

namespace {

std::string shape(std::size_t r, std::size_t c) {
  return "(" + std::to_string(r) + "x" + std::to_string(c) + ")";
}

}  // namespace

RealMatrix::RealMatrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

RealMatrix::RealMatrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) {
    throw DimensionError("matrix data length " + std::to_string(data_.size()) +
                         " does not match shape " + shape(rows_, cols_));
  }
}

RealMatrix RealMatrix::identity(std::size_t n) {
  RealMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

RealVector affine(const RealMatrix& w, std::span<const double> x, std::span<const double> b) {
  if (w.cols() != x.size() || w.rows() != b.size()) {
    throw DimensionError("affine: W " + shape(w.rows(), w.cols()) + ", x (" +
                         std::to_string(x.size()) + "), b (" + std::to_string(b.size()) + ")");
  }
  RealVector out(w.rows());
  for (std::size_t i = 0; i < w.rows(); ++i) {
    const auto r = w.row(i);
    double acc = 0.0;
    for (std::size_t j = 0; j < r.size(); ++j) acc += r[j] * x[j];
    out[i] = acc + b[i];
  }
  return out;
}

RealVector softmax_with_temperature(std::span<const double> v, double tau) {
  if (!(tau > 0.0) || !std::isfinite(tau)) {
    throw ConfigError("softmax temperature must be positive and finite, got " +
                      std::to_string(tau));
  }
  RealVector out(v.size());
  if (v.empty()) return out;
  const double vmax = *std::max_element(v.begin(), v.end());
  double total = 0.0;
  for (std::size_t j = 0; j < v.size(); ++j) {
    out[j] = std::exp((v[j] - vmax) / tau);
    total += out[j];
  }
  for (double& o : out) o /= total;
  return out;
}

double l1_column_norm(const RealMatrix& w, std::size_t j) {
  if (j >= w.cols()) {
    throw DimensionError("column " + std::to_string(j) + " out of range for matrix " +
                         shape(w.rows(), w.cols()));
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < w.rows(); ++i) acc += std::abs(w(i, j));
  return acc;
}

double relu(double x) noexcept { return x > 0.0 ? x : 0.0; }
double relu_derivative(double x) noexcept { return x > 0.0 ? 1.0 : 0.0; }
double leaky_relu(double x, double slope) noexcept { return x > 0.0 ? x : slope * x; }
double leaky_relu_derivative(double x, double slope) noexcept { return x > 0.0 ? 1.0 : slope; }

double sigmoid(double x) noexcept {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double sigmoid_derivative(double x) noexcept {
  const double s = sigmoid(x);
  return s * (1.0 - s);
}

double activate(Activation kind, double x, double slope) noexcept {
  return kind == Activation::kRelu ? relu(x) : leaky_relu(x, slope);
}

double activate_derivative(Activation kind, double x, double slope) noexcept {
  return kind == Activation::kRelu ? relu_derivative(x) : leaky_relu_derivative(x, slope);
}

bool all_finite(std::span<const double> v) noexcept {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace elens
