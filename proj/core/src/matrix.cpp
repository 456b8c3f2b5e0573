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

#include "supersage/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "supersage/errors.hpp"

namespace supersage {

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) {
    throw ShapeError("matrix data length " + std::to_string(data_.size()) +
                     " does not match " + std::to_string(rows_) + "x" +
                     std::to_string(cols_));
  }
}

Matrix Matrix::validated(std::size_t rows, std::size_t cols,
                         std::vector<double> data) {
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (!std::isfinite(data[i])) {
      throw RangeError("non-finite matrix entry at flat index " + std::to_string(i));
    }
  }
  return Matrix(rows, cols, std::move(data));
}

void Matrix::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

void Matrix::scale(double s) {
  for (double& x : data_) x *= s;
}

void Matrix::add_scaled(const Matrix& other, double s) {
  if (!same_shape(other)) throw ShapeError("add_scaled shape mismatch");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += s * other.data_[i];
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) {
    throw ShapeError("matmul shape mismatch: " + std::to_string(a.rows()) + "x" +
                     std::to_string(a.cols()) + " * " + std::to_string(b.rows()) +
                     "x" + std::to_string(b.cols()));
  }
  Matrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      const double* brow = b.data() + k * b.cols();
      double* orow = out.data() + i * out.cols();
      for (std::size_t j = 0; j < b.cols(); ++j) orow[j] += aik * brow[j];
    }
  }
  return out;
}

Matrix matmul_at(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows()) throw ShapeError("matmul_at shape mismatch");
  Matrix out(a.cols(), b.cols());
  for (std::size_t k = 0; k < a.rows(); ++k) {
    const double* arow = a.data() + k * a.cols();
    const double* brow = b.data() + k * b.cols();
    for (std::size_t i = 0; i < a.cols(); ++i) {
      const double aki = arow[i];
      if (aki == 0.0) continue;
      double* orow = out.data() + i * out.cols();
      for (std::size_t j = 0; j < b.cols(); ++j) orow[j] += aki * brow[j];
    }
  }
  return out;
}

Matrix matmul_bt(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols()) throw ShapeError("matmul_bt shape mismatch");
  Matrix out(a.rows(), b.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const double* arow = a.data() + i * a.cols();
    for (std::size_t j = 0; j < b.rows(); ++j) {
      const double* brow = b.data() + j * b.cols();
      double acc = 0.0;
      for (std::size_t k = 0; k < a.cols(); ++k) acc += arow[k] * brow[k];
      out(i, j) = acc;
    }
  }
  return out;
}

Matrix relu(const Matrix& x) {
  Matrix out = x;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out.data()[i] < 0.0) out.data()[i] = 0.0;
  }
  return out;
}

Matrix relu_backward(const Matrix& x, const Matrix& upstream) {
  if (!x.same_shape(upstream)) throw ShapeError("relu_backward shape mismatch");
  Matrix out = upstream;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (x.data()[i] <= 0.0) out.data()[i] = 0.0;
  }
  return out;
}

Matrix softmax_rows(const Matrix& x) {
  Matrix out(x.rows(), x.cols());
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const auto in = x.row(r);
    auto o = out.row(r);
    double m = -std::numeric_limits<double>::infinity();
    for (double v : in) m = std::max(m, v);
    double sum = 0.0;
    for (std::size_t c = 0; c < x.cols(); ++c) {
      o[c] = std::exp(in[c] - m);
      sum += o[c];
    }
    for (std::size_t c = 0; c < x.cols(); ++c) o[c] /= sum;
  }
  return out;
}

CrossEntropyPartial cross_entropy_sum(const Matrix& logits,
                                      std::span<const int> labels,
                                      std::span<const std::uint8_t> mask) {
  if (labels.size() != logits.rows() || mask.size() != logits.rows()) {
    throw ShapeError("cross_entropy row count mismatch");
  }
  CrossEntropyPartial out;
  out.grad = Matrix(logits.rows(), logits.cols());
  for (std::size_t r = 0; r < logits.rows(); ++r) {
    if (!mask[r]) continue;
    const int label = labels[r];
    if (label < 0 || static_cast<std::size_t>(label) >= logits.cols()) {
      throw RangeError("label " + std::to_string(label) + " out of range for " +
                       std::to_string(logits.cols()) + " classes");
    }
    const auto in = logits.row(r);
    double m = -std::numeric_limits<double>::infinity();
    for (double v : in) m = std::max(m, v);
    double sum = 0.0;
    for (double v : in) sum += std::exp(v - m);
    const double log_sum = std::log(sum) + m;
    out.loss_sum += log_sum - in[static_cast<std::size_t>(label)];
    auto g = out.grad.row(r);
    for (std::size_t c = 0; c < logits.cols(); ++c) {
      g[c] = std::exp(in[c] - log_sum);
    }
    g[static_cast<std::size_t>(label)] -= 1.0;
    ++out.count;
  }
  return out;
}

std::pair<double, Matrix> cross_entropy(const Matrix& logits,
                                        std::span<const int> labels,
                                        std::span<const std::uint8_t> mask) {
  CrossEntropyPartial partial = cross_entropy_sum(logits, labels, mask);
  if (partial.count == 0) throw MetricError("cross_entropy over an empty mask");
  const double inv = 1.0 / static_cast<double>(partial.count);
  partial.grad.scale(inv);
  return {partial.loss_sum * inv, std::move(partial.grad)};
}

SgdState::SgdState(SgdConfig config) : config_(config) {
  if (!(config_.learning_rate > 0.0)) {
    throw ParameterError("learning rate must be positive");
  }
  if (config_.momentum < 0.0 || config_.momentum >= 1.0) {
    throw ParameterError("momentum must be in [0, 1)");
  }
}

void SgdState::step(std::span<Matrix* const> params,
                    std::span<const Matrix* const> grads) {
  if (params.size() != grads.size()) throw ShapeError("sgd param/grad count mismatch");
  if (velocity_.empty() && config_.momentum > 0.0) {
    velocity_.reserve(params.size());
    for (const Matrix* g : grads) velocity_.emplace_back(g->rows(), g->cols());
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    Matrix& p = *params[i];
    const Matrix& g = *grads[i];
    if (!p.same_shape(g)) throw ShapeError("sgd param/grad shape mismatch");
    if (config_.momentum > 0.0) {
      Matrix& v = velocity_[i];
      if (!v.same_shape(g)) throw ShapeError("sgd velocity shape mismatch");
      for (std::size_t j = 0; j < v.size(); ++j) {
        v.data()[j] = config_.momentum * v.data()[j] + g.data()[j];
        p.data()[j] -= config_.learning_rate * v.data()[j];
      }
    } else {
      p.add_scaled(g, -config_.learning_rate);
    }
  }
}

}  // namespace supersage
