#include "plqstab/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace plqstab {

namespace {

constexpr double kInfinity = std::numeric_limits<double>::infinity();

// Original variable j equals offset(j) + sum of coefficient * standard variable.
struct VariableMap {
  Eigen::VectorXd offset;
  std::vector<std::vector<std::pair<int, double>>> columns;
  std::vector<std::pair<int, double>> upper_rows;  // (standard variable, width) needing w <= width
  int standard = 0;
};

VariableMap map_variables(const LinearProgram& lp) {
  const int n = lp.variables();
  VariableMap map;
  map.offset = Eigen::VectorXd::Zero(n);
  map.columns.resize(n);
  for (int j = 0; j < n; ++j) {
    const double lo = lp.lower(j);
    const double hi = lp.upper(j);
    if (std::isfinite(lo)) {
      map.offset(j) = lo;
      map.columns[j].push_back({map.standard, 1.0});
      if (std::isfinite(hi)) map.upper_rows.push_back({map.standard, hi - lo});
      ++map.standard;
    } else if (std::isfinite(hi)) {
      map.offset(j) = hi;
      map.columns[j].push_back({map.standard++, -1.0});
    } else {
      map.columns[j].push_back({map.standard++, 1.0});
      map.columns[j].push_back({map.standard++, -1.0});
    }
  }
  return map;
}

class Tableau {
 public:
  Tableau(Eigen::MatrixXd a, Eigen::VectorXd b, const SimplexOptions& options)
      : rows_(static_cast<int>(a.rows())), real_(static_cast<int>(a.cols())), options_(options) {
    for (int i = 0; i < rows_; ++i)
      if (b(i) < 0.0) {
        a.row(i) *= -1.0;
        b(i) *= -1.0;
      }
    table_ = Eigen::MatrixXd::Zero(rows_ + 1, real_ + rows_ + 1);
    table_.topLeftCorner(rows_, real_) = a;
    table_.block(0, real_, rows_, rows_).setIdentity();
    table_.col(rhs()).head(rows_) = b;
    for (int i = 0; i < rows_; ++i) basis_.push_back(real_ + i);
  }

  // Minimizes the sum of artificials, then pivots them out where possible.
  LpStatus phase_one() {
    Eigen::VectorXd cost = Eigen::VectorXd::Zero(real_ + rows_);
    cost.tail(rows_).setOnes();
    set_objective(cost);
    const LpStatus s = iterate(real_ + rows_);
    if (s != LpStatus::optimal) return s;
    const double scale = 1.0 + table_.col(rhs()).head(rows_).cwiseAbs().maxCoeff();
    if (-table_(rows_, rhs()) > options_.feasibility_tol * scale) return LpStatus::infeasible;
    for (int i = 0; i < rows_; ++i) {
      if (basis_[i] < real_) continue;
      for (int j = 0; j < real_; ++j)
        if (std::abs(table_(i, j)) > 1e-9) {
          pivot(i, j);
          break;
        }
    }
    return LpStatus::optimal;
  }

  LpStatus phase_two(const Eigen::VectorXd& cost) {
    Eigen::VectorXd full = Eigen::VectorXd::Zero(real_ + rows_);
    full.head(real_) = cost;
    set_objective(full);
    return iterate(real_);
  }

  Eigen::VectorXd solution() const {
    Eigen::VectorXd w = Eigen::VectorXd::Zero(real_);
    for (int i = 0; i < rows_; ++i)
      if (basis_[i] < real_) w(basis_[i]) = table_(i, rhs());
    return w;
  }

 private:
  int rhs() const { return real_ + rows_; }

  void set_objective(const Eigen::VectorXd& cost) {
    table_.row(rows_).setZero();
    table_.row(rows_).head(real_ + rows_) = cost.transpose();
    for (int i = 0; i < rows_; ++i) {
      const double cb = cost(basis_[i]);
      if (cb != 0.0) table_.row(rows_) -= cb * table_.row(i);
    }
  }

  void pivot(int r, int c) {
    table_.row(r) /= table_(r, c);
    for (int i = 0; i <= rows_; ++i) {
      if (i == r) continue;
      const double f = table_(i, c);
      if (f != 0.0) table_.row(i) -= f * table_.row(r);
    }
    basis_[r] = c;
  }

  LpStatus iterate(int allowed) {
    int degenerate_streak = 0;
    for (int it = 0; it < options_.max_iterations; ++it) {
      const bool bland = degenerate_streak >= options_.bland_after;
      int enter = -1;
      double best = -options_.feasibility_tol;
      for (int j = 0; j < allowed; ++j) {
        const double rc = table_(rows_, j);
        if (rc < best) {
          enter = j;
          if (bland) break;
          best = rc;
        }
      }
      if (enter < 0) return LpStatus::optimal;

      int leave = -1;
      double ratio = kInfinity;
      for (int i = 0; i < rows_; ++i) {
        const double a = table_(i, enter);
        if (a <= options_.pivot_tol) continue;
        const double r = table_(i, rhs()) / a;
        if (leave < 0 || r < ratio - 1e-12) {
          ratio = r;
          leave = i;
        } else if (r <= ratio + 1e-12 && basis_[i] < basis_[leave]) {
          ratio = std::min(ratio, r);
          leave = i;
        }
      }
      if (leave < 0) return LpStatus::unbounded;
      degenerate_streak = ratio <= options_.feasibility_tol ? degenerate_streak + 1 : 0;
      pivot(leave, enter);
    }
    return LpStatus::numerical_failure;
  }

  int rows_;
  int real_;
  SimplexOptions options_;
  Eigen::MatrixXd table_;
  std::vector<int> basis_;
};

double max_violation(const LinearProgram& lp, const Eigen::VectorXd& x) {
  double v = 0.0;
  if (lp.eq.rows() > 0) v = std::max(v, (lp.eq * x - lp.eq_rhs).cwiseAbs().maxCoeff());
  if (lp.ge.rows() > 0) v = std::max(v, (lp.ge_rhs - lp.ge * x).maxCoeff());
  for (int j = 0; j < x.size(); ++j) v = std::max({v, lp.lower(j) - x(j), x(j) - lp.upper(j)});
  return v;
}

}  // namespace

LinearProgram LinearProgram::free(int n) {
  LinearProgram lp;
  lp.cost = Eigen::VectorXd::Zero(n);
  lp.eq = Eigen::MatrixXd::Zero(0, n);
  lp.eq_rhs = Eigen::VectorXd::Zero(0);
  lp.ge = Eigen::MatrixXd::Zero(0, n);
  lp.ge_rhs = Eigen::VectorXd::Zero(0);
  lp.lower = Eigen::VectorXd::Constant(n, -kInfinity);
  lp.upper = Eigen::VectorXd::Constant(n, kInfinity);
  return lp;
}

LpResult solve_lp(const LinearProgram& lp, const SimplexOptions& options) {
  const int n = lp.variables();
  const VariableMap map = map_variables(lp);
  Eigen::MatrixXd transform = Eigen::MatrixXd::Zero(n, map.standard);
  for (int j = 0; j < n; ++j)
    for (const auto& [k, coef] : map.columns[j]) transform(j, k) = coef;

  const int eq_rows = static_cast<int>(lp.eq.rows());
  const int ge_rows = static_cast<int>(lp.ge.rows());
  const int ub_rows = static_cast<int>(map.upper_rows.size());
  const int slacks = ge_rows + ub_rows;
  const int cols = map.standard + slacks;
  const int rows = eq_rows + ge_rows + ub_rows;

  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(rows, cols);
  Eigen::VectorXd b(rows);
  if (eq_rows > 0) {
    a.block(0, 0, eq_rows, map.standard) = lp.eq * transform;
    b.head(eq_rows) = lp.eq_rhs - lp.eq * map.offset;
  }
  if (ge_rows > 0) {
    a.block(eq_rows, 0, ge_rows, map.standard) = lp.ge * transform;
    a.block(eq_rows, map.standard, ge_rows, ge_rows) = -Eigen::MatrixXd::Identity(ge_rows, ge_rows);
    b.segment(eq_rows, ge_rows) = lp.ge_rhs - lp.ge * map.offset;
  }
  for (int k = 0; k < ub_rows; ++k) {
    const int r = eq_rows + ge_rows + k;
    a(r, map.upper_rows[k].first) = 1.0;
    a(r, map.standard + ge_rows + k) = 1.0;
    b(r) = map.upper_rows[k].second;
  }

  Eigen::VectorXd cost = Eigen::VectorXd::Zero(cols);
  cost.head(map.standard) = transform.transpose() * lp.cost;

  LpResult result;
  Tableau tableau(a, b, options);
  result.status = tableau.phase_one();
  if (result.status != LpStatus::optimal) return result;
  result.status = tableau.phase_two(cost);
  if (result.status != LpStatus::optimal) return result;

  const Eigen::VectorXd w = tableau.solution();
  result.x = map.offset + transform * w.head(map.standard);
  result.objective = lp.cost.dot(result.x);
  const double scale = 1.0 + std::max(lp.eq_rhs.size() ? lp.eq_rhs.cwiseAbs().maxCoeff() : 0.0,
                                      lp.ge_rhs.size() ? lp.ge_rhs.cwiseAbs().maxCoeff() : 0.0);
  if (max_violation(lp, result.x) > 1e-7 * scale) result.status = LpStatus::numerical_failure;
  return result;
}

const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::optimal:
      return "optimal";
    case LpStatus::infeasible:
      return "infeasible";
    case LpStatus::unbounded:
      return "unbounded";
    case LpStatus::numerical_failure:
      return "numerical failure";
  }
  return "?";
}

}  // namespace plqstab
