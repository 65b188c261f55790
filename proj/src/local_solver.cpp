#include "plqstab/local_solver.hpp"

#include "plqstab/rng.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace plqstab {

namespace {

double distance_to(const Interval& dom, double t) { return t < dom.lo ? dom.lo - t : (t > dom.hi ? t - dom.hi : 0.0); }

// The problem plus the ball, written as constraints c_k(x) fed through convex g_k.
// The last constraint is |x - x_bar|^2 - delta^2 <= 0.
class BallProblem {
 public:
  BallProblem(const GnlpProblem& problem, const Eigen::VectorXd& v, const Eigen::VectorXd& u,
              const Eigen::VectorXd& x_bar, double delta)
      : problem_(problem), v_(v), u_(u), x_bar_(x_bar), delta_(delta), ball_(UnivariatePlq::indicator_nonpositive()) {
    for (const auto& g : problem.outer) {
      graphs_.emplace_back(g);
      domains_.push_back(g.domain());
    }
  }

  int m() const { return problem_.m; }

  Eigen::VectorXd arguments(const Eigen::VectorXd& x) const {
    Eigen::VectorXd c(problem_.m + 1);
    c.head(problem_.m) = shifted_constraints(problem_, x, u_);
    c(problem_.m) = (x - x_bar_).squaredNorm() - delta_ * delta_;
    return c;
  }

  const SubgradientGraph& graph(int k) const { return k < problem_.m ? graphs_[k] : ball_; }
  const UnivariatePlq& outer(int k) const { return problem_.outer[k]; }
  const Interval& domain(int k) const { return domains_[k]; }

  // Value with each argument projected onto dom g, plus the projection distances.
  double merit(const Eigen::VectorXd& x, double penalty) const {
    const Eigen::VectorXd w = shifted_constraints(problem_, x, u_);
    double total = problem_.objective(x) - v_.dot(x);
    for (int i = 0; i < problem_.m; ++i) {
      const double p = domains_[i].clamp(w(i));
      total += problem_.outer[i].value(p) + penalty * std::abs(w(i) - p);
    }
    return total;
  }

  double violation(const Eigen::VectorXd& x) const {
    const Eigen::VectorXd w = shifted_constraints(problem_, x, u_);
    double worst = 0.0;
    for (int i = 0; i < problem_.m; ++i) worst = std::max(worst, distance_to(domains_[i], w(i)));
    return worst;
  }

  double ball_excess(const Eigen::VectorXd& x) const { return std::max(0.0, (x - x_bar_).norm() - delta_); }

  // Gradients and Hessians of every c_k.
  void derivatives(const Eigen::VectorXd& x, Eigen::MatrixXd& grads, std::vector<Eigen::MatrixXd>& hessians) const {
    const int n = problem_.n;
    grads.resize(problem_.m + 1, n);
    hessians.resize(problem_.m + 1);
    for (int i = 0; i < problem_.m; ++i) {
      grads.row(i) = problem_.constraints[i].gradient(x).transpose();
      hessians[i] = problem_.constraints[i].hessian(x);
    }
    grads.row(problem_.m) = 2.0 * (x - x_bar_).transpose();
    hessians[problem_.m] = 2.0 * Eigen::MatrixXd::Identity(n, n);
  }

  const GnlpProblem& problem() const { return problem_; }
  const Eigen::VectorXd& v() const { return v_; }

 private:
  const GnlpProblem& problem_;
  const Eigen::VectorXd& v_;
  const Eigen::VectorXd& u_;
  const Eigen::VectorXd& x_bar_;
  double delta_;
  std::vector<SubgradientGraph> graphs_;
  std::vector<Interval> domains_;
  SubgradientGraph ball_;
};

double outer_value(const BallProblem& bp, int k, double p) {
  return k < bp.m() ? bp.outer(k).value(p) : 0.0;
}

// Augmented Lagrangian value f0 - v.x + sum of Moreau envelopes at c(x) + mu y.
double augmented_value(const BallProblem& bp, const Eigen::VectorXd& x, const Eigen::VectorXd& y, double mu) {
  const Eigen::VectorXd c = bp.arguments(x);
  double total = bp.problem().objective(x) - bp.v().dot(x);
  for (int k = 0; k < c.size(); ++k) {
    const double z = c(k) + mu * y(k);
    const auto prox = bp.graph(k).prox(mu, z);
    total += outer_value(bp, k, prox.point) + (z - prox.point) * (z - prox.point) / (2.0 * mu);
  }
  return total;
}

struct AugmentedModel {
  Eigen::VectorXd gradient;
  Eigen::MatrixXd hessian;
  Eigen::VectorXd multipliers;  // y hat
  Eigen::VectorXd gap;          // c - prox
};

AugmentedModel augmented_model(const BallProblem& bp, const Eigen::VectorXd& x, const Eigen::VectorXd& y, double mu) {
  const Eigen::VectorXd c = bp.arguments(x);
  Eigen::MatrixXd grads;
  std::vector<Eigen::MatrixXd> hessians;
  bp.derivatives(x, grads, hessians);
  const auto f0 = eval_polynomial(bp.problem().objective, x);
  AugmentedModel model;
  model.gradient = f0.gradient - bp.v();
  model.hessian = f0.hessian;
  model.multipliers.resize(c.size());
  model.gap.resize(c.size());
  for (int k = 0; k < c.size(); ++k) {
    const double z = c(k) + mu * y(k);
    const auto prox = bp.graph(k).prox(mu, z);
    const double yk = (z - prox.point) / mu;
    model.multipliers(k) = yk;
    model.gap(k) = c(k) - prox.point;
    model.gradient += yk * grads.row(k).transpose();
    model.hessian += yk * hessians[k] + ((1.0 - prox.derivative) / mu) * grads.row(k).transpose() * grads.row(k);
  }
  return model;
}

// Levenberg-shifted Newton with Armijo backtracking on the augmented Lagrangian.
Eigen::VectorXd minimize_augmented(const BallProblem& bp, Eigen::VectorXd x, const Eigen::VectorXd& y, double mu) {
  for (int it = 0; it < 200; ++it) {
    const AugmentedModel model = augmented_model(bp, x, y, mu);
    if (!model.gradient.allFinite()) break;
    if (model.gradient.norm() <= 1e-15) break;
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(model.hessian);
    const double scale = 1.0 + model.hessian.cwiseAbs().maxCoeff();
    const double shift = std::max(0.0, -eig.eigenvalues().minCoeff()) + 1e-12 * scale;
    Eigen::VectorXd d = -(eig.eigenvectors() *
                          (eig.eigenvectors().transpose() * model.gradient).cwiseQuotient(
                              (eig.eigenvalues().array() + shift).matrix()));
    double slope = model.gradient.dot(d);
    if (!(slope < 0.0)) {
      d = -model.gradient;
      slope = -model.gradient.squaredNorm();
    }
    const double f = augmented_value(bp, x, y, mu);
    double alpha = 1.0;
    bool moved = false;
    for (int ls = 0; ls < 60; ++ls, alpha *= 0.5) {
      const Eigen::VectorXd trial = x + alpha * d;
      if (augmented_value(bp, trial, y, mu) <= f + 1e-4 * alpha * slope) {
        moved = true;
        x = trial;
        break;
      }
    }
    if (!moved || alpha * d.norm() <= 1e-15 * (1.0 + x.norm())) break;
  }
  return x;
}

Eigen::VectorXd outer_multipliers(const Eigen::VectorXd& y, int m) { return y.head(m); }

struct Candidate {
  Eigen::VectorXd x;
  double value = 0.0;
};

std::vector<Eigen::VectorXd> grid_points(const Eigen::VectorXd& center, double radius, int resolution) {
  const int n = static_cast<int>(center.size());
  std::vector<Eigen::VectorXd> points;
  long total = 1;
  for (int j = 0; j < n; ++j) total *= resolution;
  for (long index = 0; index < total; ++index) {
    Eigen::VectorXd x(n);
    long rest = index;
    for (int j = n - 1; j >= 0; --j) {
      const long k = rest % resolution;
      rest /= resolution;
      x(j) = center(j) + radius * (-1.0 + (2.0 * static_cast<double>(k) + 1.0) / resolution);
    }
    points.push_back(x);
  }
  return points;
}

}  // namespace

std::optional<PolishResult> polish_minimizer(const GnlpProblem& problem, const Eigen::VectorXd& v,
                                             const Eigen::VectorXd& u, const Eigen::VectorXd& x_bar, double delta,
                                             const Eigen::VectorXd& x0) {
  const BallProblem bp(problem, v, u, x_bar, delta);
  Eigen::VectorXd x = x0;
  Eigen::VectorXd y = Eigen::VectorXd::Zero(problem.m + 1);
  double mu = 0.1;
  double previous_gap = kInf;
  for (int outer = 0; outer < 80; ++outer) {
    x = minimize_augmented(bp, x, y, mu);
    const AugmentedModel model = augmented_model(bp, x, y, mu);
    if (!model.multipliers.allFinite()) return std::nullopt;
    const double gap = model.gap.cwiseAbs().maxCoeff();
    const double change = (model.multipliers - y).cwiseAbs().maxCoeff();
    y = model.multipliers;
    if (gap <= 1e-13 * (1.0 + x.norm()) && change <= 1e-10 * (1.0 + y.norm())) break;
    if (gap > 0.25 * previous_gap) mu = std::max(0.1 * mu, 1e-12);
    previous_gap = gap;
  }
  PolishResult result;
  result.x = x;
  result.y = outer_multipliers(y, problem.m);
  result.ball_multiplier = y(problem.m);
  result.violation = std::max(bp.violation(x), bp.ball_excess(x));
  return result;
}

LocalizedSolveResult solve_localized(const GnlpProblem& problem, const Eigen::VectorXd& v, const Eigen::VectorXd& u,
                                     double delta, const Eigen::VectorXd& x_bar, const SolverOptions& options) {
  problem.validate();
  if (problem.n > 3) throw InputError("localized solves support n <= 3");
  if (!(delta > 0.0)) throw InputError("delta must be positive");
  if (options.resolution < 64) throw InputError("grid resolution must be at least 64 per axis");
  if (x_bar.size() != problem.n || v.size() != problem.n || u.size() != problem.m)
    throw InputError("localized solve: dimension mismatch");

  const BallProblem bp(problem, v, u, x_bar, delta);
  const std::vector<Eigen::VectorXd> grid = grid_points(x_bar, delta, options.resolution);
  std::vector<double> merit(grid.size(), kInf);
  std::vector<bool> inside(grid.size(), false);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    inside[k] = (grid[k] - x_bar).norm() <= delta;
    if (inside[k]) merit[k] = bp.merit(grid[k], 1e6);
  }

  // Discrete local minima among in-ball grid neighbours.
  const int n = problem.n;
  const int r = options.resolution;
  std::vector<std::size_t> minima;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (!inside[k]) continue;
    std::vector<int> coord(n);
    long rest = static_cast<long>(k);
    for (int j = n - 1; j >= 0; --j) {
      coord[j] = static_cast<int>(rest % r);
      rest /= r;
    }
    bool is_min = true;
    int offsets = 1;
    for (int j = 0; j < n; ++j) offsets *= 3;
    for (int o = 0; o < offsets && is_min; ++o) {
      int code = o;
      long neighbour = 0;
      bool valid = true;
      bool self = true;
      for (int j = 0; j < n; ++j) {
        const int step = code % 3 - 1;
        code /= 3;
        if (step != 0) self = false;
        const int c = coord[j] + step;
        if (c < 0 || c >= r) valid = false;
        neighbour = neighbour * r + c;
      }
      if (self || !valid || !inside[neighbour]) continue;
      if (merit[neighbour] < merit[k]) is_min = false;
    }
    if (is_min) minima.push_back(k);
  }
  std::stable_sort(minima.begin(), minima.end(), [&](std::size_t a, std::size_t b) { return merit[a] < merit[b]; });
  if (static_cast<int>(minima.size()) > options.grid_seeds) minima.resize(options.grid_seeds);

  std::vector<Eigen::VectorXd> seeds{x_bar};
  if (n > 0) {
    const auto best = std::min_element(merit.begin(), merit.end()) - merit.begin();
    if (inside[best]) seeds.push_back(grid[best]);
  }
  for (std::size_t k : minima) seeds.push_back(grid[k]);

  std::vector<Candidate> candidates;
  for (const auto& seed : seeds) {
    const auto polished = polish_minimizer(problem, v, u, x_bar, delta, seed);
    if (!polished || polished->violation > options.feasibility_tol || !polished->x.allFinite()) continue;
    candidates.push_back({polished->x, bp.merit(polished->x, 0.0)});
  }

  LocalizedSolveResult result;
  if (candidates.empty()) return result;
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const Candidate& a, const Candidate& b) { return a.value < b.value; });
  std::vector<Candidate> clusters;
  for (const auto& c : candidates) {
    const bool merged = std::any_of(clusters.begin(), clusters.end(), [&](const Candidate& rep) {
      return (rep.x - c.x).norm() <= options.cluster_tol;
    });
    if (!merged) clusters.push_back(c);
  }

  result.m_delta = clusters.front().value;
  const double level = result.m_delta + options.value_tol * std::max(1.0, std::abs(result.m_delta));
  bool touches = false;
  for (const auto& c : clusters) {
    LocalMinimizer entry;
    entry.x = c.x;
    entry.objective = c.value;
    const MultiplierSet ms = multiplier_set(problem, c.x, u, v);
    if (ms.representative) {
      entry.y = *ms.representative;
      entry.multiplier_singleton = ms.is_singleton;
    } else {
      entry.y = polish_minimizer(problem, v, u, x_bar, delta, c.x)->y;
    }
    if (c.value <= level) {
      if (std::abs((c.x - x_bar).norm() - delta) <= options.boundary_tol) touches = true;
      result.minimizers.push_back(std::move(entry));
    } else {
      result.local_only.push_back(std::move(entry));
    }
  }
  if (result.minimizers.size() > 1)
    result.status = SolveStatus::multiple;
  else
    result.status = touches ? SolveStatus::boundary_suspect : SolveStatus::unique;
  return result;
}

namespace {

struct KktSystem {
  Eigen::VectorXd residual;
  Eigen::MatrixXd jacobian;
};

// [grad_x L - v; w - prox(w + y)] with w = F(x) + u and the prox of each g_i at unit step.
KktSystem kkt_system(const GnlpProblem& problem, const std::vector<SubgradientGraph>& graphs, const Eigen::VectorXd& v,
                     const Eigen::VectorXd& u, const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  const int n = problem.n;
  const int m = problem.m;
  const Eigen::VectorXd w = shifted_constraints(problem, x, u);
  const Eigen::MatrixXd jf = jacobian(problem.constraints, x);
  KktSystem s;
  s.residual.resize(n + m);
  s.jacobian = Eigen::MatrixXd::Zero(n + m, n + m);
  s.residual.head(n) = lagrangian_gradient(problem, x, y) - v;
  s.jacobian.topLeftCorner(n, n) = lagrangian_hessian(problem, x, y);
  s.jacobian.topRightCorner(n, m) = jf.transpose();
  for (int i = 0; i < m; ++i) {
    const auto prox = graphs[i].prox(1.0, w(i) + y(i));
    s.residual(n + i) = w(i) - prox.point;
    s.jacobian.block(n + i, 0, 1, n) = (1.0 - prox.derivative) * jf.row(i);
    s.jacobian(n + i, n + i) = -prox.derivative;
  }
  return s;
}

}  // namespace

KktEnumeration enumerate_kkt_pairs(const GnlpProblem& problem, const Eigen::VectorXd& v, const Eigen::VectorXd& u,
                                   const Eigen::VectorXd& x_bar, const Eigen::VectorXd& y_bar, double delta,
                                   int resolution, std::uint64_t seed) {
  problem.validate();
  if (problem.n > 2) throw InputError("KKT enumeration supports n <= 2");
  const int n = problem.n;
  const int m = problem.m;
  std::vector<SubgradientGraph> graphs;
  for (const auto& g : problem.outer) graphs.emplace_back(g);
  const double cell = 2.0 * delta / resolution;

  KktEnumeration result;
  const std::vector<Eigen::VectorXd> grid = grid_points(x_bar, delta, resolution);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if ((grid[k] - x_bar).norm() >= delta) continue;
    CounterRng rng(seed, k);
    Eigen::VectorXd x = grid[k];
    Eigen::VectorXd y = rng.in_ball(y_bar, delta);
    double norm = kInf;
    for (int it = 0; it < 100; ++it) {
      const KktSystem s = kkt_system(problem, graphs, v, u, x, y);
      norm = s.residual.norm();
      if (!std::isfinite(norm) || norm < 1e-13) break;
      const Eigen::VectorXd step = -s.jacobian.completeOrthogonalDecomposition().solve(s.residual);
      double alpha = 1.0;
      bool moved = false;
      for (int ls = 0; ls < 40; ++ls, alpha *= 0.5) {
        const Eigen::VectorXd xt = x + alpha * step.head(n);
        const Eigen::VectorXd yt = y + alpha * step.tail(m);
        if (kkt_system(problem, graphs, v, u, xt, yt).residual.norm() <= (1.0 - 1e-4 * alpha) * norm) {
          x = xt;
          y = yt;
          moved = true;
          break;
        }
      }
      if (!moved) break;
    }
    if (!(norm < 1e-9)) continue;
    if (kkt_residual(problem, x, y, v, u) >= 1e-9) continue;
    const double rx = (x - x_bar).norm();
    const double ry = (y - y_bar).norm();
    if (rx >= delta || ry >= delta) continue;
    if (rx > delta - 2.0 * cell || ry > delta - 2.0 * cell) result.resolved = false;
    const bool known = std::any_of(result.points.begin(), result.points.end(), [&](const KktPoint& p) {
      return (p.x - x).norm() <= 1e-6 && (p.y - y).norm() <= 1e-6;
    });
    if (!known) result.points.push_back(make_kkt_point(problem, x, y, v, u));
  }
  return result;
}

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::unique: return "UNIQUE";
    case SolveStatus::multiple: return "MULTIPLE";
    case SolveStatus::boundary_suspect: return "BOUNDARY_SUSPECT";
    case SolveStatus::empty: return "EMPTY";
  }
  return "?";
}

}  // namespace plqstab
