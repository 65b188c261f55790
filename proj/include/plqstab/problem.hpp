#pragma once

#include "plqstab/plq.hpp"
#include "plqstab/polynomial.hpp"

#include <Eigen/Core>

#include <optional>
#include <vector>

namespace plqstab {

inline constexpr double kKktTolerance = 1e-8;

/// minimize f0(x) + sum_i g_i(F_i(x) + u_i) - v.x over x in R^n.
struct GnlpProblem {
  int n = 0;
  int m = 0;
  Polynomial objective;
  std::vector<Polynomial> constraints;
  std::vector<UnivariatePlq> outer;

  /// Throws InputError on dimension mismatches or invalid outer functions.
  void validate() const;
  /// Every outer function is the indicator of (-inf, 0] or {0}.
  bool classical() const;
};

struct KktPoint {
  Eigen::VectorXd x;
  Eigen::VectorXd y;
  Eigen::VectorXd v;
  Eigen::VectorXd u;
  double residual = 0.0;

  bool admissible(double tol = kKktTolerance) const { return residual <= tol; }
};

/// Candidate pair with its residual filled in.
KktPoint make_kkt_point(const GnlpProblem& problem, Eigen::VectorXd x, Eigen::VectorXd y, Eigen::VectorXd v,
                        Eigen::VectorXd u);

/// Multipliers compatible with a primal point: box intersected with the stationarity rows.
struct MultiplierSet {
  std::vector<Interval> box;
  Eigen::MatrixXd affine_matrix;  // n x m, grad F(x)^T
  Eigen::VectorXd affine_rhs;     // v - grad f0(x)
  std::optional<Eigen::VectorXd> representative;
  bool is_singleton = false;
};

/// F(x) + u
Eigen::VectorXd shifted_constraints(const GnlpProblem& problem, const Eigen::VectorXd& x, const Eigen::VectorXd& u);

Eigen::VectorXd lagrangian_gradient(const GnlpProblem& problem, const Eigen::VectorXd& x, const Eigen::VectorXd& y);
Eigen::MatrixXd lagrangian_hessian(const GnlpProblem& problem, const Eigen::VectorXd& x, const Eigen::VectorXd& y);

double kkt_residual(const GnlpProblem& problem, const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                    const Eigen::VectorXd& v, const Eigen::VectorXd& u);

MultiplierSet multiplier_set(const GnlpProblem& problem, const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                             const Eigen::VectorXd& v, double tol = kKktTolerance);

/// f0(x) + sum g_i(F_i(x) + u_i) - v.x; +inf when some argument leaves dom g_i.
double objective_value(const GnlpProblem& problem, const Eigen::VectorXd& x, const Eigen::VectorXd& v,
                       const Eigen::VectorXd& u);

}  // namespace plqstab
