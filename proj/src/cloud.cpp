#include "plqstab/cloud.hpp"

#include "plqstab/cone_engine.hpp"
#include "plqstab/derivatives.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>

namespace plqstab {

namespace {

constexpr double kOnGraph = 1e-9;

double angle_between(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return std::acos(std::clamp(a.dot(b) / (a.norm() * b.norm()), -1.0, 1.0));
}

void require_on_graph(const GraphSampler& sampler, const Eigen::VectorXd& p, const char* what) {
  const double d = sampler.distance(p);
  if (!(d <= kOnGraph))
    throw ContractViolation(std::string(what) + " is off the graph by " + std::to_string(d));
}

// Log-uniform magnitude in [radius * 10^-decades, radius].
double log_uniform(double radius, double decades, CounterRng& rng) {
  return radius * std::pow(10.0, -decades * rng.uniform());
}

// Moves x so that G_j(x) equals kinks[j] for j in `snap`, by minimum-norm
// Gauss-Newton steps.
std::optional<Eigen::VectorXd> snap_to_kinks(const std::vector<Polynomial>& inner, Eigen::VectorXd x,
                                            const std::vector<int>& snap, const Eigen::VectorXd& kinks) {
  if (snap.empty()) return x;
  const int k = static_cast<int>(snap.size());
  for (int it = 0; it < 40; ++it) {
    Eigen::VectorXd r(k);
    Eigen::MatrixXd j(k, x.size());
    for (int a = 0; a < k; ++a) {
      r(a) = inner[snap[a]](x) - kinks(snap[a]);
      j.row(a) = inner[snap[a]].gradient(x).transpose();
    }
    if (r.cwiseAbs().maxCoeff() <= 1e-15 * (1.0 + kinks.cwiseAbs().maxCoeff())) return x;
    x -= j.completeOrthogonalDecomposition().solve(r);
  }
  for (int a = 0; a < k; ++a)
    if (std::abs(inner[snap[a]](x) - kinks(snap[a])) > 1e-13) return std::nullopt;
  return x;
}

}  // namespace

Eigen::VectorXd PlqGraphSampler::sample_near(const Eigen::VectorXd& center, double radius, CounterRng& rng) const {
  const GraphLocation loc = graph_.locate(center.head<2>());
  const double offset = log_uniform(radius, 4.0, rng);
  const double s = graph_.arc_length(loc) + (rng.coin() ? offset : -offset);
  return graph_.point_at(s);
}

DirectionCloud sample_strict_derivative_cloud(const GraphSampler& sampler, const Eigen::VectorXd& base,
                                              const CloudOptions& options) {
  if (options.t_grid.empty()) throw std::invalid_argument("empty t grid");
  require_on_graph(sampler, base, "base point");
  DirectionCloud cloud;
  for (int k = 0; k < options.count; ++k) {
    CounterRng rng(options.seed, static_cast<std::uint64_t>(k));
    const double t = options.t_grid[static_cast<std::size_t>(k) % options.t_grid.size()];
    for (int attempt = 0; attempt < 50; ++attempt) {
      const Eigen::VectorXd p1 = sampler.sample_near(base, options.radius_factor * t, rng);
      require_on_graph(sampler, p1, "sampled point");
      const Eigen::VectorXd p2 = sampler.sample_near(p1, t, rng);
      require_on_graph(sampler, p2, "sampled point");
      const Eigen::VectorXd chord = p2 - p1;
      const double length = chord.norm();
      if (length < 1e-3 * t) continue;
      cloud.points.push_back(chord / length);
      cloud.t.push_back(t);
      cloud.perturbation.push_back((p1 - base).norm());
      break;
    }
  }
  return cloud;
}

ContainmentReport containment_check(const DirectionCloud& cloud, const PlanarConeUnion& analytic, double outer_tol,
                                    double coverage_tol) {
  ContainmentReport report;
  for (const auto& p : cloud.points) {
    const double a = analytic.angular_distance(p.head<2>());
    report.worst_outer = std::max(report.worst_outer, a);
    if (a > outer_tol) ++report.outside;
  }
  for (const auto& ray : analytic.extreme_rays()) {
    double best = std::numbers::pi;
    for (const auto& p : cloud.points) best = std::min(best, angle_between(ray, p.head<2>()));
    report.worst_coverage = std::max(report.worst_coverage, best);
  }
  report.outer_ok = report.outside == 0;
  report.coverage_ok = !cloud.points.empty() && report.worst_coverage <= coverage_tol;
  report.pass = report.outer_ok && report.coverage_ok;
  return report;
}

ChainRuleReport sample_chain_rule(const ChainRuleProblem& problem, const ChainRuleOptions& options) {
  const int n = problem.n();
  const int m = problem.m();
  if (static_cast<int>(problem.outer_map.size()) != m || static_cast<int>(problem.inner_map.size()) != m ||
      problem.s_bar.size() != m)
    throw InputError("chain rule data: F, G, g and s_bar must have one entry per outer function");
  for (int j = 0; j < m; ++j) {
    if (problem.outer_map[j].dimension() != n || problem.inner_map[j].dimension() != n)
      throw InputError("chain rule data: maps must have the dimension of x_bar");
    require_valid(problem.outer[j], "g " + std::to_string(j + 1));
  }

  const Eigen::VectorXd& xb = problem.x_bar;
  const Eigen::VectorXd& sb = problem.s_bar;
  const Eigen::VectorXd wb = evaluate_all(problem.inner_map, xb);
  const Eigen::MatrixXd jf = jacobian(problem.outer_map, xb);
  const Eigen::MatrixXd jg = jacobian(problem.inner_map, xb);

  std::vector<SubgradientGraph> graphs;
  std::vector<PlanarConeUnion> cones;
  std::vector<bool> has_kink(m, false);
  std::vector<bool> always_snap(m, false);
  std::vector<Interval> kink_interval(m);
  for (int j = 0; j < m; ++j) {
    graphs.emplace_back(problem.outer[j]);
    const GraphLocation loc = graphs[j].locate({wb(j), sb(j)});
    if (loc.distance > kOnGraph)
      throw InputError("chain rule base: s_bar is not in S0(G(x_bar)) at index " + std::to_string(j + 1));
    cones.push_back(strict_derivative_graph(graphs[j].slopes_at(loc)));
    for (double a : graphs[j].vertical_abscissae())
      if (a == wb(j)) has_kink[j] = true;
    if (has_kink[j]) {
      kink_interval[j] = *plq_subgradient(problem.outer[j], wb(j));
      always_snap[j] = sb(j) > kink_interval[j].lo && sb(j) < kink_interval[j].hi;
    }
  }

  // One graph point of S near the base: x with G snapped on `snap`, and v = F(x) + s.
  auto graph_point = [&](const Eigen::VectorXd& x, const std::vector<int>& snap, double radius,
                         CounterRng& rng) -> std::optional<Eigen::VectorXd> {
    const Eigen::VectorXd w = evaluate_all(problem.inner_map, x);
    Eigen::VectorXd s(m);
    for (int j = 0; j < m; ++j) {
      if (std::find(snap.begin(), snap.end(), j) != snap.end()) {
        const double offset = log_uniform(radius, 3.0, rng);
        s(j) = kink_interval[j].clamp(sb(j) + (rng.coin() ? offset : -offset));
      } else {
        const auto sub = plq_subgradient(problem.outer[j], w(j));
        if (!sub) return std::nullopt;
        s(j) = sub->clamp(sb(j));
      }
      if (std::abs(s(j) - sb(j)) > 2.0 * radius * (1.0 + std::abs(sb(j))) + 1e-12) return std::nullopt;
    }
    Eigen::VectorXd point(n + m);
    point << x, evaluate_all(problem.outer_map, x) + s;
    return point;
  };

  auto choose_snap = [&](CounterRng& rng) {
    std::vector<int> snap;
    for (int j = 0; j < m; ++j)
      if (has_kink[j] && (always_snap[j] || rng.coin())) snap.push_back(j);
    return snap;
  };

  std::vector<Eigen::VectorXd> cloud;
  ChainRuleReport report;
  for (int k = 0; k < options.count; ++k) {
    CounterRng rng(options.seed, static_cast<std::uint64_t>(k));
    const double t = options.t_grid[static_cast<std::size_t>(k) % options.t_grid.size()];
    const double radius = options.radius_factor * t;
    for (int attempt = 0; attempt < 50; ++attempt) {
      const std::vector<int> snap1 = choose_snap(rng);
      const auto x1 = snap_to_kinks(problem.inner_map, xb + log_uniform(radius, 3.0, rng) * rng.unit_vector(n),
                                    snap1, wb);
      if (!x1) continue;
      const std::vector<int> snap2 = choose_snap(rng);
      const auto x2 = snap_to_kinks(problem.inner_map, *x1 + log_uniform(t, 2.0, rng) * rng.unit_vector(n),
                                    snap2, wb);
      if (!x2) continue;
      const auto p1 = graph_point(*x1, snap1, radius, rng);
      const auto p2 = graph_point(*x2, snap2, radius, rng);
      if (!p1 || !p2) continue;
      const Eigen::VectorXd chord = *p2 - *p1;
      if (chord.norm() < 1e-3 * t) continue;
      // Both orientations of a chord are difference quotients of the same pair.
      cloud.push_back((rng.coin() ? 1.0 : -1.0) * chord / chord.norm());
      break;
    }
  }
  report.samples = static_cast<int>(cloud.size());

  for (const auto& d : cloud) {
    const Eigen::VectorXd xp = d.head(n);
    const Eigen::VectorXd a = jg * xp;
    const Eigen::VectorXd wp = d.tail(m) - jf * xp;
    for (int j = 0; j < m; ++j) report.worst_forward = std::max(report.worst_forward, cones[j].distance({a(j), wp(j)}));
  }
  report.forward_pass = report.samples > 0 && report.worst_forward <= options.outer_tol;

  const RankNullspace rn = rank_and_nullspace(jg, 1e-9);
  report.rank = rn.rank;
  report.full_rank = rn.rank == m;
  if (!report.full_rank) return report;

  // Right-hand side: pick a cone per index and a point in it, then solve grad G x' = a.
  const Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(jg);
  const Eigen::MatrixXd null_basis = rank_and_nullspace(jg, 1e-9).nullspace;
  for (int k = 0; k < options.rhs_count; ++k) {
    CounterRng rng(options.seed ^ 0x5A5A5A5AULL, static_cast<std::uint64_t>(k));
    Eigen::VectorXd a(m);
    Eigen::VectorXd wp(m);
    for (int j = 0; j < m; ++j) {
      const auto& list = cones[j].cones();
      const PlanarCone& c = list[static_cast<std::size_t>(rng.uniform() * list.size()) % list.size()];
      Eigen::Vector2d p;
      switch (c.kind) {
        case PlanarCone::Kind::line:
          p = rng.normal() * c.first;
          break;
        case PlanarCone::Kind::ray:
          p = std::abs(rng.normal()) * c.first;
          break;
        case PlanarCone::Kind::wedge:
          p = rng.uniform() * c.first + rng.uniform() * c.second;
          break;
      }
      a(j) = p.x();
      wp(j) = p.y();
    }
    Eigen::VectorXd xp = cod.solve(a);
    if (null_basis.cols() > 0) {
      Eigen::VectorXd zeta(null_basis.cols());
      for (Eigen::Index i = 0; i < zeta.size(); ++i) zeta(i) = rng.normal();
      xp += null_basis * zeta;
    }
    Eigen::VectorXd e(n + m);
    e << xp, jf * xp + wp;
    if (e.norm() < 1e-12) continue;
    e /= e.norm();
    double best = std::numbers::pi;
    for (const auto& d : cloud) best = std::min(best, angle_between(e, d));
    report.worst_reverse = std::max(report.worst_reverse, best);
  }
  report.reverse_pass = report.worst_reverse <= options.coverage_tol;
  return report;
}

}  // namespace plqstab
