#include "plqstab/experiment.hpp"

#include "plqstab/rng.hpp"

#include <Eigen/QR>

#include <cmath>
#include <sstream>

namespace plqstab {

double estimate_lipschitz(const std::vector<std::pair<Eigen::VectorXd, Eigen::VectorXd>>& samples,
                          double min_input_distance) {
  double best = 0.0;
  bool any = false;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    for (std::size_t j = i + 1; j < samples.size(); ++j) {
      const double din = (samples[i].first - samples[j].first).norm();
      if (din == 0.0 || din < min_input_distance) continue;
      any = true;
      best = std::max(best, (samples[i].second - samples[j].second).norm() / din);
    }
  }
  if (!any) throw InputError("Lipschitz estimate needs two samples with distinct inputs");
  return best;
}

LocalizationEstimate stability_experiment(const GnlpProblem& problem, const KktPoint& kkt,
                                          const ExperimentOptions& options) {
  problem.validate();
  if (!kkt.admissible()) throw InadmissibleKkt("KKT residual " + std::to_string(kkt.residual) + " exceeds tolerance");
  const int n = problem.n;
  const int m = problem.m;
  LocalizationEstimate est;

  const MultiplierSet base = multiplier_set(problem, kkt.x, kkt.u, kkt.v);
  est.base_multiplier_singleton = base.is_singleton;
  if (!base.is_singleton) est.notes.push_back("multiplier set at the base point is not a singleton");

  Eigen::VectorXd center(n + m);
  center << kkt.v, kkt.u;
  SolverOptions solver;
  solver.resolution = options.resolution;

  for (std::size_t r = 0; r < options.ladder.size(); ++r) {
    const double radius = options.rho * options.ladder[r];
    std::vector<std::pair<Eigen::VectorXd, Eigen::VectorXd>> pairs;
    for (int k = 0; k < options.samples; ++k) {
      CounterRng rng(options.seed + r, static_cast<std::uint64_t>(k));
      const Eigen::VectorXd input = rng.in_ball(center, radius);
      const LocalizedSolveResult res =
          solve_localized(problem, input.head(n), input.tail(m), options.delta, kkt.x, solver);
      ++est.sample_count;
      switch (res.status) {
        case SolveStatus::empty: ++est.empty_count; continue;
        case SolveStatus::multiple: ++est.multiple_count; continue;
        case SolveStatus::boundary_suspect: ++est.boundary_count; continue;
        case SolveStatus::unique: break;
      }
      const LocalMinimizer& best = res.minimizers.front();
      if (!best.multiplier_singleton) ++est.nonsingleton_count;
      if ((best.y - kkt.y).norm() > options.delta) ++est.far_multiplier_count;
      Eigen::VectorXd output(n + m);
      output << best.x, best.y;
      pairs.emplace_back(input, output);
    }
    LadderRung rung{radius, 0.0, static_cast<int>(pairs.size())};
    if (pairs.size() >= 2) {
      try {
        rung.estimate = estimate_lipschitz(pairs, options.pair_filter * radius);
      } catch (const InputError&) {
        rung.estimate = 0.0;
      }
    }
    est.radius_ladder.push_back(rung);

    if (r == 0 && options.identification_samples > 0 && n <= 2) {
      std::vector<std::pair<Eigen::VectorXd, Eigen::VectorXd>> subset;
      for (int k = 0; k < std::min<int>(options.identification_samples, options.samples); ++k) {
        CounterRng rng(options.seed + r, static_cast<std::uint64_t>(k));
        const Eigen::VectorXd input = rng.in_ball(center, radius);
        subset.emplace_back(input.head(n), input.tail(m));
      }
      bool ok = true;
      for (const auto& outcome : verify_identification(problem, kkt, subset, options.delta))
        ok = ok && outcome.status == IdentificationStatus::pass;
      est.identification_ok = ok;
    }
  }

  for (std::size_t r = 1; r < est.radius_ladder.size(); ++r) {
    const double prev = est.radius_ladder[r - 1].estimate;
    if (prev > 0.0 && est.radius_ladder[r].estimate >= options.divergence_factor * prev) est.diverging = true;
  }
  if (!est.radius_ladder.empty()) est.lipschitz_estimate = est.radius_ladder.front().estimate;

  est.single_valued = est.base_multiplier_singleton && est.multiple_count == 0 && est.boundary_count == 0 &&
                      est.nonsingleton_count == 0 && est.far_multiplier_count == 0;
  if (!est.single_valued || est.diverging)
    est.verdict = ExperimentVerdict::fail;
  else if (est.sample_count == 0 || est.empty_count > options.empty_fraction * est.sample_count)
    est.verdict = ExperimentVerdict::invalid;
  else
    est.verdict = ExperimentVerdict::pass;

  if (est.empty_count > 0) est.notes.push_back(std::to_string(est.empty_count) + " samples had an empty feasible ball");
  if (est.diverging) est.notes.push_back("ladder estimate grows by the divergence factor between rungs");
  est.notes.push_back("the experiment works at one fixed (rho, delta); a failure is evidence, not proof");
  return est;
}

namespace {

std::string format_vector(const Eigen::VectorXd& x) {
  std::ostringstream out;
  out.precision(9);
  out << '(';
  for (Eigen::Index i = 0; i < x.size(); ++i) out << (i ? ", " : "") << x(i);
  out << ')';
  return out.str();
}

bool is_local_minimizer(const GnlpProblem& problem, const Eigen::VectorXd& x, const Eigen::VectorXd& v,
                        const Eigen::VectorXd& u) {
  const double radius = 1e-3;
  const LocalizedSolveResult res = solve_localized(problem, v, u, radius, x);
  return res.status == SolveStatus::unique && (res.minimizers.front().x - x).norm() <= 1e-6;
}

}  // namespace

std::vector<IdentificationOutcome> verify_identification(
    const GnlpProblem& problem, const KktPoint& kkt,
    const std::vector<std::pair<Eigen::VectorXd, Eigen::VectorXd>>& samples, double delta, int resolution,
    std::uint64_t seed) {
  problem.validate();
  if (problem.n > 2) throw InputError("identification check supports n <= 2");
  std::vector<IdentificationOutcome> outcomes;
  for (std::size_t s = 0; s < samples.size(); ++s) {
    const auto& [v, u] = samples[s];
    IdentificationOutcome out;
    const LocalizedSolveResult res = solve_localized(problem, v, u, delta, kkt.x);
    const KktEnumeration pairs = enumerate_kkt_pairs(problem, v, u, kkt.x, kkt.y, delta, resolution, seed + s);
    out.kkt_pairs = static_cast<int>(pairs.points.size());
    if (!pairs.resolved) {
      out.status = IdentificationStatus::unresolved;
      out.notes.push_back("a KKT pair lies within two grid cells of the ball boundary");
      outcomes.push_back(std::move(out));
      continue;
    }
    switch (res.status) {
      case SolveStatus::empty:
        if (!pairs.points.empty()) out.status = IdentificationStatus::fail;
        out.notes.push_back("no feasible point in the ball");
        outcomes.push_back(std::move(out));
        continue;
      case SolveStatus::multiple:
        out.status = IdentificationStatus::fail;
        out.notes.push_back("localized minimizer is not unique");
        outcomes.push_back(std::move(out));
        continue;
      case SolveStatus::boundary_suspect:
        out.status = IdentificationStatus::unresolved;
        out.notes.push_back("localized minimizer touches the ball boundary");
        outcomes.push_back(std::move(out));
        continue;
      case SolveStatus::unique:
        break;
    }
    const LocalMinimizer& best = res.minimizers.front();
    if (!best.multiplier_singleton) {
      out.status = IdentificationStatus::fail;
      out.notes.push_back("multiplier set of the localized minimizer is not a singleton");
    }
    for (const auto& p : pairs.points) {
      const double gap = std::sqrt((p.x - best.x).squaredNorm() + (p.y - best.y).squaredNorm());
      if (gap <= 1e-6) continue;
      if (is_local_minimizer(problem, p.x, v, u)) {
        out.status = IdentificationStatus::fail;
        out.notes.push_back("KKT pair at x = " + format_vector(p.x) + " is a local minimizer distinct from the localized one");
      } else {
        out.notes.push_back("KKT pair at x = " + format_vector(p.x) + " is not a local minimizer");
      }
    }
    outcomes.push_back(std::move(out));
  }
  return outcomes;
}

std::optional<Eigen::VectorXd> solve_generalized_equation(const GeneralizedEquation& ge, const Eigen::VectorXd& p,
                                                          const Eigen::VectorXd& v, const Eigen::VectorXd& x0) {
  std::vector<SubgradientGraph> graphs;
  for (const auto& g : ge.outer) graphs.emplace_back(g);
  const int n = ge.n;
  // r(x) = x - prox(x + v - h(p, x)); zero exactly when v - h(p, x) is a subgradient at x.
  auto residual = [&](const Eigen::VectorXd& x, Eigen::MatrixXd* jac) {
    const Eigen::VectorXd y = ge.residual_values(p, x, v);
    Eigen::VectorXd r(n);
    Eigen::VectorXd slope(n);
    for (int i = 0; i < n; ++i) {
      const auto prox = graphs[i].prox(1.0, x(i) + y(i));
      r(i) = x(i) - prox.point;
      slope(i) = prox.derivative;
    }
    if (jac) {
      const Eigen::MatrixXd inner = Eigen::MatrixXd::Identity(n, n) - ge.x_jacobian(p, x);
      *jac = Eigen::MatrixXd::Identity(n, n) - slope.asDiagonal() * inner;
    }
    return r;
  };
  Eigen::VectorXd x = x0;
  for (int it = 0; it < 100; ++it) {
    Eigen::MatrixXd jac;
    const Eigen::VectorXd r = residual(x, &jac);
    const double norm = r.norm();
    if (norm <= 1e-14) return x;
    const Eigen::VectorXd step = -jac.completeOrthogonalDecomposition().solve(r);
    double alpha = 1.0;
    bool moved = false;
    for (int ls = 0; ls < 40; ++ls, alpha *= 0.5) {
      const Eigen::VectorXd trial = x + alpha * step;
      if (residual(trial, nullptr).norm() <= (1.0 - 1e-4 * alpha) * norm) {
        x = trial;
        moved = true;
        break;
      }
    }
    if (!moved) break;
  }
  if (residual(x, nullptr).norm() <= 1e-12) return x;
  return std::nullopt;
}

GeneralizedEquationSamples sample_generalized_equation(const GeneralizedEquation& ge, double rho, int count,
                                                       std::uint64_t seed) {
  ge.validate();
  GeneralizedEquationSamples out;
  for (int k = 0; k < count; ++k) {
    CounterRng rng(seed, static_cast<std::uint64_t>(k));
    const Eigen::VectorXd p = rng.in_ball(ge.p_bar, rho);
    const auto x = solve_generalized_equation(ge, p, ge.v_bar, ge.x_bar);
    if (x)
      out.pairs.emplace_back(p, *x);
    else
      ++out.failures;
  }
  return out;
}

const char* to_string(ExperimentVerdict v) {
  switch (v) {
    case ExperimentVerdict::pass: return "PASS";
    case ExperimentVerdict::fail: return "FAIL";
    case ExperimentVerdict::invalid: return "INVALID";
  }
  return "?";
}

const char* to_string(IdentificationStatus s) {
  switch (s) {
    case IdentificationStatus::pass: return "PASS";
    case IdentificationStatus::fail: return "FAIL";
    case IdentificationStatus::unresolved: return "UNRESOLVED";
  }
  return "?";
}

}  // namespace plqstab
