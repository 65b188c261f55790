#include "plqstab/polynomial.hpp"

#include <algorithm>
#include <numeric>

namespace plqstab {

namespace {

double power(double base, int exponent) {
  double result = 1.0;
  for (int k = 0; k < exponent; ++k) result *= base;
  return result;
}

// Product over all variables except those listed in `skip`, with the
// exponents of the skipped variables lowered as requested.
double partial_product(const Monomial& term, const Eigen::VectorXd& x, int first, int second) {
  double product = term.coefficient;
  const int n = static_cast<int>(term.exponents.size());
  for (int j = 0; j < n; ++j) {
    int e = term.exponents[j];
    if (j == first) {
      product *= e;
      --e;
    }
    if (j == second) {
      product *= e;
      --e;
    }
    if (e < 0) return 0.0;
    product *= power(x(j), e);
  }
  return product;
}

}  // namespace

int Monomial::degree() const { return std::accumulate(exponents.begin(), exponents.end(), 0); }

Polynomial::Polynomial(int dimension) : dimension_(dimension) {
  if (dimension < 0) throw InputError("polynomial dimension must be nonnegative");
}

Polynomial::Polynomial(int dimension, std::vector<Monomial> terms) : Polynomial(dimension) {
  for (const auto& term : terms) {
    if (static_cast<int>(term.exponents.size()) != dimension)
      throw InputError("monomial exponent vector has length " +
                       std::to_string(term.exponents.size()) + ", expected " +
                       std::to_string(dimension));
    for (int e : term.exponents)
      if (e < 0) throw InputError("negative exponent in monomial");
    if (term.degree() > kMaxDegree)
      throw InputError("monomial degree " + std::to_string(term.degree()) +
                       " exceeds the cap of " + std::to_string(kMaxDegree));
  }
  std::sort(terms.begin(), terms.end(),
            [](const Monomial& a, const Monomial& b) { return a.exponents < b.exponents; });
  for (auto& term : terms) {
    if (!terms_.empty() && terms_.back().exponents == term.exponents)
      terms_.back().coefficient += term.coefficient;
    else
      terms_.push_back(std::move(term));
  }
  std::erase_if(terms_, [](const Monomial& t) { return t.coefficient == 0.0; });
}

Polynomial Polynomial::constant(int dimension, double value) {
  return Polynomial(dimension, {Monomial{value, std::vector<int>(dimension, 0)}});
}

Polynomial Polynomial::linear(int dimension, int index, double coefficient) {
  std::vector<int> exponents(dimension, 0);
  exponents.at(index) = 1;
  return Polynomial(dimension, {Monomial{coefficient, exponents}});
}

Polynomial Polynomial::affine(const Eigen::VectorXd& row, double offset) {
  const int n = static_cast<int>(row.size());
  Polynomial result = constant(n, offset);
  for (int j = 0; j < n; ++j) result = result + linear(n, j, row(j));
  return result;
}

int Polynomial::degree() const {
  int d = 0;
  for (const auto& t : terms_) d = std::max(d, t.degree());
  return d;
}

Eigen::VectorXd Polynomial::gradient(const Eigen::VectorXd& x) const {
  check_dimension(static_cast<int>(x.size()));
  Eigen::VectorXd g = Eigen::VectorXd::Zero(dimension_);
  for (const auto& term : terms_)
    for (int j = 0; j < dimension_; ++j)
      if (term.exponents[j] > 0) g(j) += partial_product(term, x, j, -1);
  return g;
}

Eigen::MatrixXd Polynomial::hessian(const Eigen::VectorXd& x) const {
  check_dimension(static_cast<int>(x.size()));
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dimension_, dimension_);
  for (const auto& term : terms_)
    for (int i = 0; i < dimension_; ++i) {
      if (term.exponents[i] == 0) continue;
      for (int j = i; j < dimension_; ++j) {
        if (term.exponents[j] == 0 || (i == j && term.exponents[i] < 2)) continue;
        h(i, j) += partial_product(term, x, i, j);
      }
    }
  h.triangularView<Eigen::StrictlyLower>() = h.transpose();
  return h;
}

Polynomial Polynomial::operator+(const Polynomial& other) const {
  if (other.dimension_ != dimension_) throw InputError("adding polynomials of different dimension");
  std::vector<Monomial> all = terms_;
  all.insert(all.end(), other.terms_.begin(), other.terms_.end());
  return Polynomial(dimension_, std::move(all));
}

Polynomial Polynomial::operator*(double scale) const {
  std::vector<Monomial> scaled = terms_;
  for (auto& t : scaled) t.coefficient *= scale;
  return Polynomial(dimension_, std::move(scaled));
}

PolynomialEval eval_polynomial(const Polynomial& f, const Eigen::VectorXd& x) {
  return {f(x), f.gradient(x), f.hessian(x)};
}

Eigen::VectorXd evaluate_all(const std::vector<Polynomial>& maps, const Eigen::VectorXd& x) {
  Eigen::VectorXd values(static_cast<Eigen::Index>(maps.size()));
  for (std::size_t i = 0; i < maps.size(); ++i) values(static_cast<Eigen::Index>(i)) = maps[i](x);
  return values;
}

Eigen::MatrixXd jacobian(const std::vector<Polynomial>& maps, const Eigen::VectorXd& x) {
  Eigen::MatrixXd jac(static_cast<Eigen::Index>(maps.size()), x.size());
  for (std::size_t i = 0; i < maps.size(); ++i)
    jac.row(static_cast<Eigen::Index>(i)) = maps[i].gradient(x).transpose();
  return jac;
}

}  // namespace plqstab
