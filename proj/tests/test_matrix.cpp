#include <cmath>
#include <limits>

#include <doctest.h>

#include "supersage/errors.hpp"
#include "supersage/matrix.hpp"
#include "supersage/rng.hpp"
#include "support/oracles.hpp"

using namespace supersage;

namespace {

Matrix random_matrix(std::size_t rows, std::size_t cols, Rng& rng) {
  Matrix m(rows, cols);
  for (std::size_t i = 0; i < m.size(); ++i) m.data()[i] = rng.normal();
  return m;
}

}  // namespace

TEST_CASE("matmul identity and hand arithmetic") {
  Matrix id(2, 2);
  id(0, 0) = id(1, 1) = 1.0;
  const Matrix m(2, 2, {5.0, -3.0, 2.0, 7.0});
  CHECK(matmul(id, m) == m);

  const Matrix a(2, 2, {1.0, 2.0, 3.0, 4.0});
  const Matrix ones(2, 1, {1.0, 1.0});
  const Matrix product = matmul(a, ones);
  CHECK(product(0, 0) == doctest::Approx(3.0));
  CHECK(product(1, 0) == doctest::Approx(7.0));

  CHECK_THROWS_AS(matmul(a, Matrix(3, 2)), ShapeError);
}

TEST_CASE("matmul matches the naive triple-loop oracle") {
  Rng rng(123);
  const Matrix a = random_matrix(5, 7, rng);
  const Matrix b = random_matrix(7, 3, rng);
  const Matrix got = matmul(a, b);
  const Matrix want = oracles::naive_matmul(a, b);
  for (std::size_t i = 0; i < got.size(); ++i) {
    CHECK(got.data()[i] == doctest::Approx(want.data()[i]).epsilon(1e-12));
  }
}

TEST_CASE("matmul_at and matmul_bt agree with explicit transposes") {
  Rng rng(7);
  const Matrix a = random_matrix(4, 6, rng);
  const Matrix b = random_matrix(4, 5, rng);
  const Matrix at_b = matmul_at(a, b);  // (6x4)*(4x5)
  Matrix a_t(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) a_t(j, i) = a(i, j);
  }
  const Matrix want = oracles::naive_matmul(a_t, b);
  for (std::size_t i = 0; i < at_b.size(); ++i) {
    CHECK(at_b.data()[i] == doctest::Approx(want.data()[i]).epsilon(1e-12));
  }

  const Matrix c = random_matrix(3, 6, rng);
  const Matrix a_ct = matmul_bt(a, c);  // (4x6)*(6x3)
  Matrix c_t(c.cols(), c.rows());
  for (std::size_t i = 0; i < c.rows(); ++i) {
    for (std::size_t j = 0; j < c.cols(); ++j) c_t(j, i) = c(i, j);
  }
  const Matrix want2 = oracles::naive_matmul(a, c_t);
  for (std::size_t i = 0; i < a_ct.size(); ++i) {
    CHECK(a_ct.data()[i] == doctest::Approx(want2.data()[i]).epsilon(1e-12));
  }
}

TEST_CASE("relu forward and backward") {
  const Matrix x(1, 3, {-1.0, 0.0, 2.0});
  const Matrix y = relu(x);
  CHECK(y(0, 0) == 0.0);
  CHECK(y(0, 1) == 0.0);
  CHECK(y(0, 2) == 2.0);

  const Matrix x2(1, 2, {-1.0, 2.0});
  const Matrix up(1, 2, {5.0, 5.0});
  const Matrix back = relu_backward(x2, up);
  CHECK(back(0, 0) == 0.0);
  CHECK(back(0, 1) == 5.0);
}

TEST_CASE("relu backward matches central differences") {
  Rng rng(99);
  Matrix x = random_matrix(3, 3, rng);
  // Keep entries away from the kink.
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (std::abs(x.data()[i]) < 1e-3) x.data()[i] += 0.5;
  }
  const Matrix up = random_matrix(3, 3, rng);
  // f(x) = sum(relu(x) * up); df/dx == relu_backward(x, up).
  std::vector<double> buffer(x.data(), x.data() + x.size());
  auto f = [&] {
    double acc = 0.0;
    for (std::size_t i = 0; i < buffer.size(); ++i) {
      acc += (buffer[i] > 0.0 ? buffer[i] : 0.0) * up.data()[i];
    }
    return acc;
  };
  const auto numeric = oracles::central_differences(buffer, f);
  const Matrix analytic = relu_backward(x, up);
  for (std::size_t i = 0; i < analytic.size(); ++i) {
    CHECK(oracles::rel_error(analytic.data()[i], numeric[i]) < 1e-6);
  }
}

TEST_CASE("softmax rows") {
  const Matrix zeros(1, 4);
  const Matrix uniform = softmax_rows(zeros);
  for (std::size_t c = 0; c < 4; ++c) CHECK(uniform(0, c) == doctest::Approx(0.25));

  const Matrix big(1, 2, {1000.0, 1000.0});
  const Matrix stable = softmax_rows(big);
  CHECK(stable(0, 0) == doctest::Approx(0.5));
  CHECK(stable(0, 1) == doctest::Approx(0.5));

  Rng rng(17);
  const Matrix x = random_matrix(4, 6, rng);
  const Matrix got = softmax_rows(x);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    // exp/sum oracle, no max subtraction (safe at this scale).
    double sum = 0.0;
    for (std::size_t c = 0; c < x.cols(); ++c) sum += std::exp(x(r, c));
    double row_total = 0.0;
    for (std::size_t c = 0; c < x.cols(); ++c) {
      const double want = std::exp(x(r, c)) / sum;
      CHECK(got(r, c) == doctest::Approx(want).epsilon(1e-12));
      CHECK(got(r, c) >= 0.0);
      CHECK(got(r, c) <= 1.0);
      row_total += got(r, c);
    }
    CHECK(row_total == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("cross entropy analytic values") {
  // One-hot correct with a huge margin: loss ~ 0.
  Matrix confident(2, 3);
  confident(0, 1) = 100.0;
  confident(1, 2) = 100.0;
  const std::vector<int> labels = {1, 2};
  const std::vector<std::uint8_t> mask = {1, 1};
  auto [loss, grad] = cross_entropy(confident, labels, mask);
  CHECK(loss == doctest::Approx(0.0).epsilon(1e-12));

  // Uniform logits over C classes: loss = ln C.
  const Matrix uniform(2, 5);
  auto [loss_u, grad_u] = cross_entropy(uniform, labels, mask);
  CHECK(loss_u == doctest::Approx(std::log(5.0)));

  // Grad is zero outside the mask.
  const std::vector<std::uint8_t> partial_mask = {1, 0};
  auto [loss_p, grad_p] = cross_entropy(confident, labels, partial_mask);
  for (std::size_t c = 0; c < 3; ++c) CHECK(grad_p(1, c) == 0.0);

  CHECK_THROWS_AS(cross_entropy(confident, std::vector<int>{1, 7}, mask), RangeError);
  CHECK_THROWS_AS(cross_entropy(confident, labels, std::vector<std::uint8_t>{0, 0}),
                  MetricError);
}

TEST_CASE("cross entropy gradient matches central differences") {
  Rng rng(31);
  Matrix logits = random_matrix(4, 3, rng);
  const std::vector<int> labels = {0, 2, 1, 1};
  const std::vector<std::uint8_t> mask = {1, 1, 0, 1};

  auto [loss, grad] = cross_entropy(logits, labels, mask);
  std::vector<double> buffer(logits.data(), logits.data() + logits.size());
  auto f = [&] {
    const Matrix m(logits.rows(), logits.cols(), buffer);
    return cross_entropy(m, labels, mask).first;
  };
  const auto numeric = oracles::central_differences(buffer, f);
  for (std::size_t i = 0; i < grad.size(); ++i) {
    CHECK(oracles::rel_error(grad.data()[i], numeric[i]) < 1e-6);
  }
}

TEST_CASE("sgd step") {
  SgdState plain(SgdConfig{0.1, 0.0});
  Matrix theta(1, 1, {1.0});
  const Matrix g(1, 1, {2.0});
  Matrix* params[] = {&theta};
  const Matrix* grads[] = {&g};
  plain.step(params, grads);
  CHECK(theta(0, 0) == doctest::Approx(0.8));

  const Matrix zero(1, 1, {0.0});
  const Matrix* zgrads[] = {&zero};
  plain.step(params, zgrads);
  CHECK(theta(0, 0) == doctest::Approx(0.8));

  // Momentum 0.9, two unit gradients: decrements eta*1 then eta*1.9.
  SgdState momentum(SgdConfig{0.1, 0.9});
  Matrix theta2(1, 1, {1.0});
  const Matrix one(1, 1, {1.0});
  Matrix* params2[] = {&theta2};
  const Matrix* ograds[] = {&one};
  momentum.step(params2, ograds);
  CHECK(theta2(0, 0) == doctest::Approx(0.9));
  momentum.step(params2, ograds);
  CHECK(theta2(0, 0) == doctest::Approx(0.9 - 0.1 * 1.9));

  CHECK_THROWS_AS(SgdState(SgdConfig{0.0, 0.0}), ParameterError);
}

TEST_CASE("validated matrix rejects non-finite input") {
  CHECK_THROWS_AS(Matrix::validated(1, 2, {1.0, std::nan("")}), RangeError);
  CHECK_THROWS_AS(Matrix::validated(1, 1, {std::numeric_limits<double>::infinity()}),
                  RangeError);
  CHECK_NOTHROW(Matrix::validated(1, 2, {1.0, -2.0}));
}
