#pragma once

#include "plqstab/problem.hpp"

#include <Eigen/Core>

#include <optional>
#include <vector>

namespace plqstab {

enum class SolveStatus { unique, multiple, boundary_suspect, empty };

struct LocalMinimizer {
  Eigen::VectorXd x;
  Eigen::VectorXd y;  // multiplier set representative, or the solver's estimate when the set is empty
  double objective = 0.0;
  bool multiplier_singleton = false;
};

struct LocalizedSolveResult {
  std::vector<LocalMinimizer> minimizers;  // clusters attaining m_delta
  std::vector<LocalMinimizer> local_only;  // strictly higher local minima in the ball
  double m_delta = kInf;
  SolveStatus status = SolveStatus::empty;
};

struct SolverOptions {
  int resolution = 64;  // grid points per axis
  int grid_seeds = 8;
  double cluster_tol = 1e-6;
  double value_tol = 1e-9;
  double boundary_tol = 1e-6;
  double feasibility_tol = 1e-9;
};

/// Minimizes f0(x) + sum g_i(F_i(x) + u_i) - v.x over the closed ball |x - x_bar| <= delta.
/// Requires n <= 3.
LocalizedSolveResult solve_localized(const GnlpProblem& problem, const Eigen::VectorXd& v, const Eigen::VectorXd& u,
                                     double delta, const Eigen::VectorXd& x_bar, const SolverOptions& options = {});

/// Polished stationary point of the ball-constrained problem starting at x0,
/// or nullopt when the iteration does not reach a feasible point.
struct PolishResult {
  Eigen::VectorXd x;
  Eigen::VectorXd y;     // multipliers of the outer functions
  double ball_multiplier = 0.0;
  double violation = 0.0;  // distance of F(x) + u from dom g, worst index
};

std::optional<PolishResult> polish_minimizer(const GnlpProblem& problem, const Eigen::VectorXd& v,
                                             const Eigen::VectorXd& u, const Eigen::VectorXd& x_bar, double delta,
                                             const Eigen::VectorXd& x0);

struct KktEnumeration {
  std::vector<KktPoint> points;  // distinct KKT pairs with x and y in the open balls
  bool resolved = true;          // false when a polished point sits within two grid cells of the boundary
};

/// All KKT pairs (x, y) for (v, u) with |x - x_bar| < delta and |y - y_bar| < delta,
/// found by semismooth Newton from grid seeds. Requires n <= 2.
KktEnumeration enumerate_kkt_pairs(const GnlpProblem& problem, const Eigen::VectorXd& v, const Eigen::VectorXd& u,
                                   const Eigen::VectorXd& x_bar, const Eigen::VectorXd& y_bar, double delta,
                                   int resolution = 64, std::uint64_t seed = 1);

const char* to_string(SolveStatus s);

}  // namespace plqstab
