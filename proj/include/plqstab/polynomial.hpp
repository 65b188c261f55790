#pragma once

#include <Eigen/Core>

#include <stdexcept>
#include <string>
#include <vector>

namespace plqstab {

/// Raised for malformed user data: dimension mismatches, bad files, invalid functions.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Monomial {
  double coefficient = 0.0;
  std::vector<int> exponents;

  int degree() const;
  friend bool operator==(const Monomial&, const Monomial&) = default;
};

/// Sparse multivariate polynomial with exact first and second derivatives.
///
/// Terms are kept canonical: sorted by exponent vector, like terms merged,
/// zero coefficients dropped. Each term has total degree at most kMaxDegree.
class Polynomial {
 public:
  static constexpr int kMaxDegree = 6;

  Polynomial() = default;
  explicit Polynomial(int dimension);
  Polynomial(int dimension, std::vector<Monomial> terms);

  static Polynomial constant(int dimension, double value);
  /// coefficient * x_index
  static Polynomial linear(int dimension, int index, double coefficient = 1.0);
  /// sum_j row[j] * x_j + offset
  static Polynomial affine(const Eigen::VectorXd& row, double offset);

  int dimension() const { return dimension_; }
  const std::vector<Monomial>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  int degree() const;

  template <typename Derived>
  typename Derived::Scalar operator()(const Eigen::MatrixBase<Derived>& x) const {
    using Scalar = typename Derived::Scalar;
    check_dimension(static_cast<int>(x.size()));
    Scalar total(0);
    for (const auto& term : terms_) {
      Scalar product(term.coefficient);
      for (int j = 0; j < dimension_; ++j)
        for (int k = 0; k < term.exponents[j]; ++k) product *= x(j);
      total += product;
    }
    return total;
  }

  Eigen::VectorXd gradient(const Eigen::VectorXd& x) const;
  Eigen::MatrixXd hessian(const Eigen::VectorXd& x) const;

  Polynomial operator+(const Polynomial& other) const;
  Polynomial operator*(double scale) const;

  friend bool operator==(const Polynomial&, const Polynomial&) = default;

 private:
  void check_dimension(int size) const {
    if (size != dimension_)
      throw InputError("polynomial in " + std::to_string(dimension_) +
                       " variables evaluated at a point of dimension " + std::to_string(size));
  }

  int dimension_ = 0;
  std::vector<Monomial> terms_;
};

struct PolynomialEval {
  double value = 0.0;
  Eigen::VectorXd gradient;
  Eigen::MatrixXd hessian;
};

PolynomialEval eval_polynomial(const Polynomial& f, const Eigen::VectorXd& x);

/// Stacks values of a polynomial list into a vector.
Eigen::VectorXd evaluate_all(const std::vector<Polynomial>& maps, const Eigen::VectorXd& x);

/// Jacobian with one row per polynomial.
Eigen::MatrixXd jacobian(const std::vector<Polynomial>& maps, const Eigen::VectorXd& x);

}  // namespace plqstab
