#include "relrbf/errors.hpp"
#include "relrbf/network.hpp"

#include "support.hpp"

#include <doctest.h>

#include <cmath>

using namespace relrbf;
using namespace testing;

namespace {

NetworkParams single(double w0, double w, double sigma) {
  NetworkParams p;
  p.w0 = Vector::Constant(1, w0);
  p.W = Matrix::Constant(1, 1, w);
  p.sigma = Vector::Constant(1, sigma);
  return p;
}

}  // namespace

TEST_SUITE("network") {
  TEST_CASE("gaussian_kernel") {
    CHECK(gaussian_kernel(0.0, 1.0) == 1.0);
    CHECK(gaussian_kernel(2.0, 1.0) == doctest::Approx(0.36788).epsilon(1e-5));
    CHECK(gaussian_kernel(1.25, 0.5) == doctest::Approx(0.08208).epsilon(1e-4));
    CHECK_THROWS_AS(gaussian_kernel(1.0, 0.0), Error);
    CHECK_THROWS_AS(gaussian_kernel(1.0, -1.0), Error);
  }

  TEST_CASE("forward examples") {
    CHECK(forward(Matrix::Zero(1, 1), single(0.0, 1.0, 1.0)).output(0, 0) == 1.0);
    CHECK(forward(Matrix::Constant(1, 1, 2.0), single(0.5, 2.0, 1.0)).output(0, 0) ==
          doctest::Approx(0.5 + 2.0 * std::exp(-1.0)).epsilon(1e-12));
    CHECK(0.5 + 2.0 * std::exp(-1.0) == doctest::Approx(1.23576).epsilon(1e-5));

    NetworkParams p;
    p.w0 = Vector::Constant(2, 0.7);
    p.W = Matrix::Zero(3, 2);
    p.sigma = Vector::Ones(3);
    const NetworkResponse r = forward(Matrix::Constant(3, 5, 0.3), p);
    CHECK((r.output.array() == 0.7).all());
    CHECK(r.hidden.rows() == 3);
    CHECK(r.output.rows() == 5);
  }

  TEST_CASE("forward matches a per-entry evaluation") {
    Rng rng(2, 0);
    NetworkParams p;
    p.w0 = Vector::Random(3);
    p.W = Matrix::Random(4, 3);
    p.sigma = (Vector::Random(4).array().abs() + 0.5).matrix();
    Matrix d(4, 7);
    for (Index j = 0; j < 4; ++j) {
      for (Index i = 0; i < 7; ++i) d(j, i) = rng.uniform(0.0, 3.0);
    }
    const NetworkResponse r = forward(d, p);
    for (Index i = 0; i < 7; ++i) {
      for (Index k = 0; k < 3; ++k) {
        double y = p.w0(k);
        for (Index j = 0; j < 4; ++j) y += p.W(j, k) * std::exp(-d(j, i) / (2.0 * p.sigma(j) * p.sigma(j)));
        CHECK(r.output(i, k) == doctest::Approx(y).epsilon(1e-13));
      }
    }
  }

  TEST_CASE("forward dimension checks") {
    CHECK_THROWS_AS(forward(Matrix::Zero(2, 3), single(0, 1, 1)), Error);
  }

  TEST_CASE("sse examples") {
    Matrix y(1, 2);
    y << 1, 0;
    Matrix yh(1, 2);
    yh << 0.8, 0.3;
    CHECK(sse(y, yh) == doctest::Approx(0.13));
    CHECK(sse(y, y) == 0.0);
    CHECK(sse(Matrix::Ones(1, 1), Matrix::Zero(1, 1)) == 1.0);
    CHECK_THROWS_AS(sse(y, Matrix::Zero(2, 2)), Error);
  }

  TEST_CASE("classify and one_hot") {
    Matrix out(3, 3);
    out << 0.1, 0.9, 0.2, 0.5, 0.5, 0.1, -1, -2, -0.5;
    CHECK(classify(out) == std::vector<int>{1, 0, 2});
    const Matrix y = one_hot({2, 0, 1}, 3);
    CHECK(y(0, 2) == 1.0);
    CHECK(y(1, 0) == 1.0);
    CHECK(y.sum() == 3.0);
    CHECK(classify(y) == std::vector<int>{2, 0, 1});
  }

  TEST_CASE("params check") {
    NetworkParams p = single(0, 1, 1);
    CHECK_NOTHROW(p.check());
    p.sigma(0) = 0.0;
    CHECK_THROWS_AS(p.check(), Error);
  }
}
