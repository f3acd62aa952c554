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

// Dense 64-bit vector/matrix arithmetic used by every other module.
// Reductions run sequentially in index order so results are reproducible
// bit-for-bit across runs.

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace elens {

using RealVector = std::vector<double>;

/// Boolean vector stored as bytes (0/1) so spans over it behave like any other array.
using BoolVector = std::vector<std::uint8_t>;

/// Row-major dense matrix. data.size() == rows * cols always holds.
class RealMatrix {
 public:
  RealMatrix() = default;
  RealMatrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  RealMatrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  static RealMatrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }

  double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) noexcept { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const noexcept {
    return {data_.data() + r * cols_, cols_};
  }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }

  bool operator==(const RealMatrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// result[i] = sum_j w(i, j) * x[j] + b[i]. Throws DimensionError on shape mismatch.
RealVector affine(const RealMatrix& w, std::span<const double> x, std::span<const double> b);

/// exp(v[j]/tau) / sum_l exp(v[l]/tau), evaluated with max-subtraction.
/// Throws ConfigError when tau <= 0 or is not finite.
RealVector softmax_with_temperature(std::span<const double> v, double tau);

/// sum_i |w(i, j)|. Throws DimensionError when j is out of range.
double l1_column_norm(const RealMatrix& w, std::size_t j);

/// Row-major 0/1 matrix.
class BoolMatrix {
 public:
  BoolMatrix() = default;
  BoolMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  std::uint8_t& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
  std::uint8_t operator()(std::size_t r, std::size_t c) const noexcept {
    return data_[r * cols_ + c];
  }
  std::span<const std::uint8_t> row(std::size_t r) const noexcept {
    return {data_.data() + r * cols_, cols_};
  }
  std::span<std::uint8_t> row(std::size_t r) noexcept { return {data_.data() + r * cols_, cols_}; }

  bool operator==(const BoolMatrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::uint8_t> data_;
};

enum class Activation { kRelu, kLeakyRelu };

double relu(double x) noexcept;
double relu_derivative(double x) noexcept;
double leaky_relu(double x, double slope) noexcept;
double leaky_relu_derivative(double x, double slope) noexcept;
double sigmoid(double x) noexcept;
double sigmoid_derivative(double x) noexcept;

/// Applies `kind` to x; slope is only used by the leaky variant.
double activate(Activation kind, double x, double slope) noexcept;
double activate_derivative(Activation kind, double x, double slope) noexcept;

bool all_finite(std::span<const double> v) noexcept;

}  // namespace elens
