#pragma once

#include <Eigen/Core>

namespace plqstab {

/// minimize cost.x  s.t.  eq x = eq_rhs,  ge x >= ge_rhs,  lower <= x <= upper.
///
/// Bounds may be infinite. Empty constraint blocks are allowed (zero rows).
struct LinearProgram {
  Eigen::VectorXd cost;
  Eigen::MatrixXd eq;
  Eigen::VectorXd eq_rhs;
  Eigen::MatrixXd ge;
  Eigen::VectorXd ge_rhs;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  /// Problem in `n` variables with no constraints and free bounds.
  static LinearProgram free(int n);
  int variables() const { return static_cast<int>(cost.size()); }
};

enum class LpStatus { optimal, infeasible, unbounded, numerical_failure };

struct LpResult {
  LpStatus status = LpStatus::numerical_failure;
  Eigen::VectorXd x;
  double objective = 0.0;
};

struct SimplexOptions {
  double feasibility_tol = 1e-9;
  double pivot_tol = 1e-11;
  int max_iterations = 20000;
  /// Switch from Dantzig's rule to Bland's rule after this many degenerate pivots in a row.
  int bland_after = 25;
};

/// Dense two-phase tableau simplex.
LpResult solve_lp(const LinearProgram& lp, const SimplexOptions& options = {});

const char* to_string(LpStatus s);

}  // namespace plqstab
