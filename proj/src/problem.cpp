#include "plqstab/problem.hpp"

#include "plqstab/cone_engine.hpp"
#include "plqstab/simplex.hpp"

#include <Eigen/QR>

#include <cmath>

namespace plqstab {

namespace {

void require_size(const Eigen::VectorXd& v, int expected, const char* what) {
  if (v.size() != expected)
    throw InputError(std::string(what) + " has length " + std::to_string(v.size()) + ", expected " +
                     std::to_string(expected));
}

Eigen::VectorXd project_box(const Eigen::VectorXd& z, const std::vector<Interval>& box) {
  Eigen::VectorXd out = z;
  for (int i = 0; i < z.size(); ++i) out(i) = box[i].clamp(z(i));
  return out;
}

// Least-norm point of box ∩ {A y = b} by Dykstra's alternating projections.
Eigen::VectorXd least_norm_point(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, const std::vector<Interval>& box) {
  const Eigen::Index m = a.cols();
  const Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(a);
  auto project_affine = [&](const Eigen::VectorXd& z) -> Eigen::VectorXd {
    if (a.rows() == 0) return z;
    return z - cod.solve(a * z - b);
  };
  Eigen::VectorXd x = Eigen::VectorXd::Zero(m);
  Eigen::VectorXd p = Eigen::VectorXd::Zero(m);
  Eigen::VectorXd q = Eigen::VectorXd::Zero(m);
  for (int it = 0; it < 200000; ++it) {
    const Eigen::VectorXd y = project_box(x + p, box);
    p = x + p - y;
    const Eigen::VectorXd next = project_affine(y + q);
    q = y + q - next;
    const double step = (next - x).norm();
    x = next;
    if (step <= 1e-12 && (x - y).norm() <= 1e-10) break;
  }
  return project_box(x, box);
}

}  // namespace

void GnlpProblem::validate() const {
  if (n <= 0) throw InputError("primal dimension must be positive");
  if (m < 0) throw InputError("constraint count must be nonnegative");
  if (objective.dimension() != n)
    throw InputError("objective has " + std::to_string(objective.dimension()) + " variables, expected " +
                     std::to_string(n));
  if (static_cast<int>(constraints.size()) != m || static_cast<int>(outer.size()) != m)
    throw InputError("expected " + std::to_string(m) + " constraint maps and outer functions");
  for (int i = 0; i < m; ++i) {
    if (constraints[i].dimension() != n)
      throw InputError("constraint " + std::to_string(i + 1) + " has the wrong number of variables");
    require_valid(outer[i], "g " + std::to_string(i + 1));
  }
}

bool GnlpProblem::classical() const {
  for (const auto& g : outer)
    if (!g.is_indicator()) return false;
  return true;
}

KktPoint make_kkt_point(const GnlpProblem& problem, Eigen::VectorXd x, Eigen::VectorXd y, Eigen::VectorXd v,
                        Eigen::VectorXd u) {
  KktPoint k{std::move(x), std::move(y), std::move(v), std::move(u), 0.0};
  k.residual = kkt_residual(problem, k.x, k.y, k.v, k.u);
  return k;
}

Eigen::VectorXd shifted_constraints(const GnlpProblem& problem, const Eigen::VectorXd& x, const Eigen::VectorXd& u) {
  require_size(x, problem.n, "x");
  require_size(u, problem.m, "u");
  return evaluate_all(problem.constraints, x) + u;
}

Eigen::VectorXd lagrangian_gradient(const GnlpProblem& problem, const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  require_size(x, problem.n, "x");
  require_size(y, problem.m, "y");
  Eigen::VectorXd g = problem.objective.gradient(x);
  for (int i = 0; i < problem.m; ++i)
    if (y(i) != 0.0) g += y(i) * problem.constraints[i].gradient(x);
  return g;
}

Eigen::MatrixXd lagrangian_hessian(const GnlpProblem& problem, const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  require_size(x, problem.n, "x");
  require_size(y, problem.m, "y");
  Eigen::MatrixXd h = problem.objective.hessian(x);
  for (int i = 0; i < problem.m; ++i)
    if (y(i) != 0.0) h += y(i) * problem.constraints[i].hessian(x);
  return h;
}

double kkt_residual(const GnlpProblem& problem, const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                    const Eigen::VectorXd& v, const Eigen::VectorXd& u) {
  require_size(v, problem.n, "v");
  double r = (lagrangian_gradient(problem, x, y) - v).norm();
  const Eigen::VectorXd w = shifted_constraints(problem, x, u);
  for (int i = 0; i < problem.m; ++i) r += SubgradientGraph(problem.outer[i]).distance({w(i), y(i)});
  return r;
}

MultiplierSet multiplier_set(const GnlpProblem& problem, const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                             const Eigen::VectorXd& v, double tol) {
  require_size(v, problem.n, "v");
  const int m = problem.m;
  const Eigen::VectorXd w = shifted_constraints(problem, x, u);
  MultiplierSet set;
  set.affine_matrix = jacobian(problem.constraints, x).transpose();
  if (m == 0) set.affine_matrix.resize(problem.n, 0);
  set.affine_rhs = v - problem.objective.gradient(x);

  bool feasible = true;
  for (int i = 0; i < m; ++i) {
    const auto& g = problem.outer[i];
    const Interval dom = g.domain();
    if (w(i) < dom.lo - tol || w(i) > dom.hi + tol) {
      set.box.push_back({kInf, -kInf});
      feasible = false;
      continue;
    }
    double arg = dom.clamp(w(i));
    for (double a : SubgradientGraph(g).vertical_abscissae())
      if (std::abs(arg - a) <= tol) arg = a;
    set.box.push_back(*plq_subgradient(g, arg));
  }
  if (!feasible) return set;

  const Eigen::MatrixXd& a = set.affine_matrix;
  const Eigen::VectorXd& b = set.affine_rhs;
  const double scale = 1.0 + (b.size() ? b.cwiseAbs().maxCoeff() : 0.0);
  if (m == 0) {
    if (b.norm() <= tol * scale) {
      set.representative = Eigen::VectorXd::Zero(0);
      set.is_singleton = true;
    }
    return set;
  }

  // Feasibility: minimize the l1 residual of the stationarity rows over the box.
  const int n = problem.n;
  LinearProgram lp = LinearProgram::free(m + 2 * n);
  for (int i = 0; i < m; ++i) {
    lp.lower(i) = set.box[i].lo;
    lp.upper(i) = set.box[i].hi;
  }
  lp.lower.tail(2 * n).setZero();
  lp.cost.tail(2 * n).setOnes();
  lp.eq.resize(n, m + 2 * n);
  lp.eq << a, Eigen::MatrixXd::Identity(n, n), -Eigen::MatrixXd::Identity(n, n);
  lp.eq_rhs = b;
  const LpResult fit = solve_lp(lp);
  if (fit.status != LpStatus::optimal || fit.objective > tol * scale) return set;

  Eigen::VectorXd rep = least_norm_point(a, b, set.box);
  if ((a * rep - b).cwiseAbs().maxCoeff() > tol * scale) rep = fit.x.head(m);
  set.representative = rep;

  // Singleton iff no nonzero feasible direction d with A d = 0 exists at rep.
  ConeSelectionSystem directions;
  directions.equality = a;
  std::vector<Eigen::RowVectorXd> rows;
  for (int i = 0; i < m; ++i) {
    const Interval& box = set.box[i];
    if (box.is_point()) {
      directions.fixed.push_back(i);
      continue;
    }
    const bool at_lo = rep(i) <= box.lo + 1e-9 * (1.0 + std::abs(box.lo));
    const bool at_hi = rep(i) >= box.hi - 1e-9 * (1.0 + std::abs(box.hi));
    if (!at_lo && !at_hi) continue;
    rows.push_back(Eigen::RowVectorXd::Unit(m, i));
    directions.graphs.push_back(PlanarConeUnion({PlanarCone::ray({at_lo ? 1.0 : -1.0, 0.0})}));
  }
  directions.first.resize(static_cast<Eigen::Index>(rows.size()), m);
  for (std::size_t k = 0; k < rows.size(); ++k) directions.first.row(static_cast<Eigen::Index>(k)) = rows[k];
  directions.second = Eigen::MatrixXd::Zero(directions.first.rows(), m);
  set.is_singleton = cone_nonzero_feasibility(directions).status == ConeStatus::only_zero;
  return set;
}

double objective_value(const GnlpProblem& problem, const Eigen::VectorXd& x, const Eigen::VectorXd& v,
                       const Eigen::VectorXd& u) {
  require_size(v, problem.n, "v");
  const Eigen::VectorXd w = shifted_constraints(problem, x, u);
  double total = problem.objective(x) - v.dot(x);
  for (int i = 0; i < problem.m; ++i) total += problem.outer[i].value(w(i));
  return total;
}

}  // namespace plqstab
