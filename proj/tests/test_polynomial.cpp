#include "plqstab/polynomial.hpp"
#include "plqstab/rng.hpp"

#include <doctest.h>

using namespace plqstab;

namespace {

Polynomial random_polynomial(int n, CounterRng& rng) {
  std::vector<Monomial> terms;
  const int count = 1 + static_cast<int>(rng.uniform() * 5);
  for (int t = 0; t < count; ++t) {
    Monomial mono{rng.uniform(-2.0, 2.0), std::vector<int>(n, 0)};
    int budget = static_cast<int>(rng.uniform() * 5);
    for (int j = 0; j < n && budget > 0; ++j) {
      const int e = static_cast<int>(rng.uniform() * (budget + 1));
      mono.exponents[j] = e;
      budget -= e;
    }
    terms.push_back(mono);
  }
  return Polynomial(n, terms);
}

}  // namespace

TEST_CASE("evaluation by hand") {
  // 0.5 x1^2 - x1 x2 + 3
  const Polynomial f(2, {{0.5, {2, 0}}, {-1.0, {1, 1}}, {3.0, {0, 0}}});
  const Eigen::Vector2d x(2.0, -1.0);
  CHECK(f(x) == doctest::Approx(0.5 * 4 + 2 + 3));
  const Eigen::VectorXd g = f.gradient(x);
  CHECK(g(0) == doctest::Approx(2.0 + 1.0));
  CHECK(g(1) == doctest::Approx(-2.0));
  const Eigen::MatrixXd h = f.hessian(x);
  CHECK(h(0, 0) == doctest::Approx(1.0));
  CHECK(h(0, 1) == doctest::Approx(-1.0));
  CHECK(h(1, 1) == doctest::Approx(0.0));
}

TEST_CASE("like terms merge and zero terms drop") {
  const Polynomial f(1, {{1.0, {2}}, {2.0, {2}}, {0.0, {1}}, {1.0, {0}}, {-1.0, {0}}});
  REQUIRE(f.terms().size() == 1);
  CHECK(f.terms()[0].coefficient == 3.0);
  CHECK(f.degree() == 2);
  CHECK(Polynomial(1, {{1.0, {1}}, {-1.0, {1}}}).is_zero());
}

TEST_CASE("degree and dimension are enforced") {
  CHECK_THROWS_AS(Polynomial(1, {{1.0, {7}}}), InputError);
  CHECK_THROWS_AS(Polynomial(2, {{1.0, {1}}}), InputError);
  const Polynomial f = Polynomial::linear(2, 0);
  CHECK_THROWS_AS(f(Eigen::VectorXd::Zero(3)), InputError);
}

TEST_CASE("gradient and hessian agree with central differences") {
  for (int trial = 0; trial < 40; ++trial) {
    CounterRng rng(7, trial);
    const int n = 1 + trial % 3;
    const Polynomial f = random_polynomial(n, rng);
    const Eigen::VectorXd x = rng.in_ball(Eigen::VectorXd::Zero(n), 1.0);
    const double h = 1e-5;
    const Eigen::VectorXd g = f.gradient(x);
    const Eigen::MatrixXd hess = f.hessian(x);
    for (int j = 0; j < n; ++j) {
      const Eigen::VectorXd e = Eigen::VectorXd::Unit(n, j);
      CHECK(g(j) == doctest::Approx((f(x + h * e) - f(x - h * e)) / (2 * h)).epsilon(1e-6));
      const Eigen::VectorXd dg = (f.gradient(x + h * e) - f.gradient(x - h * e)) / (2 * h);
      for (int i = 0; i < n; ++i) CHECK(hess(i, j) == doctest::Approx(dg(i)).epsilon(1e-6));
    }
    CHECK((hess - hess.transpose()).norm() == 0.0);
  }
}

TEST_CASE("sum and scaling act pointwise") {
  CounterRng rng(3, 0);
  const Polynomial f = random_polynomial(2, rng);
  const Polynomial g = random_polynomial(2, rng);
  const Eigen::Vector2d x(0.3, -0.7);
  CHECK((f + g)(x) == doctest::Approx(f(x) + g(x)));
  CHECK((f * 2.5)(x) == doctest::Approx(2.5 * f(x)));
}

TEST_CASE("jacobian stacks gradients") {
  const std::vector<Polynomial> maps{Polynomial::linear(2, 0, 2.0), Polynomial(2, {{1.0, {1, 1}}})};
  const Eigen::Vector2d x(1.0, 3.0);
  const Eigen::MatrixXd j = jacobian(maps, x);
  CHECK(j(0, 0) == 2.0);
  CHECK(j(0, 1) == 0.0);
  CHECK(j(1, 0) == 3.0);
  CHECK(j(1, 1) == 1.0);
  CHECK(evaluate_all(maps, x)(1) == 3.0);
  const PolynomialEval e = eval_polynomial(maps[1], x);
  CHECK(e.value == 3.0);
  CHECK(e.hessian(0, 1) == 1.0);
}
