// Copyright 2026 The supersage Authors.
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

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace supersage {

/// Dense row-major matrix of 64-bit floats. All training math runs at full
/// double precision; the 4-byte-per-element wire convention lives in the
/// communication ledger, not here.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  /// Construction from external input: rejects NaN/Inf entries.
  static Matrix validated(std::size_t rows, std::size_t cols,
                          std::vector<double> data);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  const std::vector<double>& values() const { return data_; }

  bool same_shape(const Matrix& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }

  void fill(double v);
  void scale(double s);
  /// this += s * other (shapes must match).
  void add_scaled(const Matrix& other, double s);

  bool operator==(const Matrix& other) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix matmul(const Matrix& a, const Matrix& b);
/// transpose(a) * b without materializing the transpose.
Matrix matmul_at(const Matrix& a, const Matrix& b);
/// a * transpose(b) without materializing the transpose.
Matrix matmul_bt(const Matrix& a, const Matrix& b);

Matrix relu(const Matrix& x);
/// Masks upstream where x <= 0.
Matrix relu_backward(const Matrix& x, const Matrix& upstream);

/// Row-wise softmax with max subtraction; each output row sums to 1.
Matrix softmax_rows(const Matrix& x);

/// Sum (not mean) of masked negative log-likelihoods plus the unscaled
/// per-row gradient (softmax - onehot on masked rows, zero elsewhere).
/// Callers divide by their own count so distributed partials compose exactly.
struct CrossEntropyPartial {
  double loss_sum = 0.0;
  Matrix grad;
  std::size_t count = 0;
};
CrossEntropyPartial cross_entropy_sum(const Matrix& logits,
                                      std::span<const int> labels,
                                      std::span<const std::uint8_t> mask);

/// Mean negative log-likelihood over the mask and matching gradient.
std::pair<double, Matrix> cross_entropy(const Matrix& logits,
                                        std::span<const int> labels,
                                        std::span<const std::uint8_t> mask);

struct SgdConfig {
  double learning_rate = 0.0;
  double momentum = 0.0;
};

/// Plain SGD with optional heavy-ball momentum. Velocity buffers are sized on
/// first step and keyed by parameter slot order, which must stay stable.
class SgdState {
 public:
  explicit SgdState(SgdConfig config);

  void step(std::span<Matrix* const> params, std::span<const Matrix* const> grads);

  const SgdConfig& config() const { return config_; }

 private:
  SgdConfig config_;
  std::vector<Matrix> velocity_;
};

}  // namespace supersage
