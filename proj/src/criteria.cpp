#include "plqstab/criteria.hpp"

#include <cmath>
#include <sstream>

namespace plqstab {

namespace {

std::string format_vector(const Eigen::VectorXd& v) {
  std::ostringstream out;
  out.precision(9);
  out << "(";
  for (Eigen::Index i = 0; i < v.size(); ++i) out << (i ? ", " : "") << (v(i) == 0.0 ? 0.0 : v(i));
  out << ")";
  return out.str();
}

void require_kkt_shape(const GnlpProblem& problem, const KktPoint& kkt) {
  if (kkt.x.size() != problem.n || kkt.v.size() != problem.n || kkt.y.size() != problem.m ||
      kkt.u.size() != problem.m)
    throw InputError("KKT point dimensions do not match the problem");
}

PlanarConeUnion derivative_graph(const SlopePair& slopes, CriterionMode mode) {
  return mode == CriterionMode::strict ? strict_derivative_graph(slopes) : coderivative_graph(slopes);
}

Eigen::VectorXd normalized_witness(Eigen::VectorXd w) {
  w /= w.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < w.size(); ++i)
    if (std::abs(w(i)) <= 1e-12) w(i) = 0.0;
  for (Eigen::Index i = 0; i < w.size(); ++i)
    if (w(i) != 0.0) {
      if (w(i) < 0.0) w = -w;
      break;
    }
  return w;
}

}  // namespace

IndexClassification classify_indices(const GnlpProblem& problem, const KktPoint& kkt, double tol) {
  require_kkt_shape(problem, kkt);
  const Eigen::VectorXd w = shifted_constraints(problem, kkt.x, kkt.u);
  IndexClassification out;
  for (int i = 0; i < problem.m; ++i) {
    const auto& g = problem.outer[i];
    const SubgradientGraph graph(g);
    const GraphLocation loc = graph.locate({w(i), kkt.y(i)}, tol);
    if (loc.distance > tol) {
      std::ostringstream msg;
      msg << "index " << i + 1 << ": (F(x)+u, y) = (" << w(i) << ", " << kkt.y(i)
          << ") is off the subgradient graph by " << loc.distance;
      throw InadmissibleKkt(msg.str());
    }
    IndexInfo info;
    info.slopes = graph.slopes_at(loc);
    info.argument = loc.point.x();
    const Interval dom = g.domain();
    info.boundary = !(info.argument > dom.lo + tol && info.argument < dom.hi - tol);
    if (g.is_indicator()) {
      if (info.slopes.equal())
        info.kind = info.slopes.plus.is_vertical() ? IndexClass::strongly_active : IndexClass::inactive;
      else
        info.kind = IndexClass::degenerate;
    } else {
      info.kind = info.slopes.equal() && !info.slopes.plus.is_vertical() ? IndexClass::smooth
                                                                         : IndexClass::general_kink;
    }
    out.indices.push_back(info);
  }
  return out;
}

LigcResult check_ligc(const GnlpProblem& problem, const KktPoint& kkt) {
  const IndexClassification cls = classify_indices(problem, kkt);
  LigcResult result;
  for (int i = 0; i < problem.m; ++i)
    if (cls.indices[i].boundary) result.indices.push_back(i);
  if (result.indices.empty()) return result;

  const int k = static_cast<int>(result.indices.size());
  Eigen::MatrixXd gradients(problem.n, k);
  for (int j = 0; j < k; ++j) gradients.col(j) = problem.constraints[result.indices[j]].gradient(kkt.x);
  const RankNullspace rn = rank_and_nullspace(gradients, 1e-9);
  if (rn.rank == k) return result;

  result.holds = false;
  const Eigen::VectorXd combination = normalized_witness(rn.nullspace.col(0));
  Eigen::VectorXd full = Eigen::VectorXd::Zero(problem.m);
  for (int j = 0; j < k; ++j) full(result.indices[j]) = combination(j);
  result.witness = full;
  return result;
}

SsocResult check_ssoc(const GnlpProblem& problem, const KktPoint& kkt) {
  SsocResult result;
  const IndexClassification cls = classify_indices(problem, kkt);
  if (!problem.classical()) return result;

  std::vector<int> active;
  for (int i = 0; i < problem.m; ++i)
    if (cls.indices[i].kind == IndexClass::strongly_active) active.push_back(i);
  Eigen::MatrixXd basis = Eigen::MatrixXd::Identity(problem.n, problem.n);
  if (!active.empty()) {
    Eigen::MatrixXd rows(static_cast<Eigen::Index>(active.size()), problem.n);
    for (std::size_t j = 0; j < active.size(); ++j)
      rows.row(static_cast<Eigen::Index>(j)) = problem.constraints[active[j]].gradient(kkt.x).transpose();
    basis = rank_and_nullspace(rows, 1e-9).nullspace;
  }
  result.subspace_dimension = static_cast<int>(basis.cols());
  result.min_eigenvalue = projected_min_eigenvalue(lagrangian_hessian(problem, kkt.x, kkt.y), basis);
  if (result.min_eigenvalue > kSsocTolerance)
    result.status = SsocStatus::holds;
  else if (result.min_eigenvalue < -kSsocTolerance)
    result.status = SsocStatus::fails;
  else
    result.status = SsocStatus::inconclusive;
  return result;
}

ConeSelectionSystem build_criterion_system(const GnlpProblem& problem, const KktPoint& kkt, CriterionMode mode,
                                           bool fix_x_prime) {
  const IndexClassification cls = classify_indices(problem, kkt);
  const int n = problem.n;
  const int m = problem.m;
  ConeSelectionSystem system;
  system.equality.resize(n, n + m);
  system.equality.leftCols(n) = lagrangian_hessian(problem, kkt.x, kkt.y);
  if (m > 0) system.equality.rightCols(m) = jacobian(problem.constraints, kkt.x).transpose();
  system.first = Eigen::MatrixXd::Zero(m, n + m);
  system.second = Eigen::MatrixXd::Zero(m, n + m);
  for (int i = 0; i < m; ++i) {
    system.first.row(i).head(n) = problem.constraints[i].gradient(kkt.x).transpose();
    system.second(i, n + i) = 1.0;
    system.graphs.push_back(derivative_graph(cls.indices[i].slopes, mode));
  }
  if (fix_x_prime)
    for (int j = 0; j < n; ++j) system.fixed.push_back(j);
  return system;
}

FeasibilityVerdict check_criterion(const GnlpProblem& problem, const KktPoint& kkt, CriterionMode mode,
                                   bool fix_x_prime) {
  return cone_nonzero_feasibility(build_criterion_system(problem, kkt, mode, fix_x_prime));
}

DerivativeFibers derivative_fibers(const GnlpProblem& problem, const KktPoint& kkt, const Eigen::VectorXd& x_prime,
                                   const Eigen::VectorXd& u_prime, CriterionMode mode) {
  if (x_prime.size() != problem.n || u_prime.size() != problem.m)
    throw InputError("direction (x', u') does not match the problem dimensions");
  const IndexClassification cls = classify_indices(problem, kkt);
  DerivativeFibers out;
  out.hessian_term = lagrangian_hessian(problem, kkt.x, kkt.y) * x_prime;
  out.transpose_jacobian = problem.m > 0 ? Eigen::MatrixXd(jacobian(problem.constraints, kkt.x).transpose())
                                         : Eigen::MatrixXd::Zero(problem.n, 0);
  for (int i = 0; i < problem.m; ++i) {
    const double a = problem.constraints[i].gradient(kkt.x).dot(x_prime) + u_prime(i);
    out.arguments.push_back(a);
    out.fibers.push_back(derivative_graph(cls.indices[i].slopes, mode).fiber(a));
  }
  return out;
}

void GeneralizedEquation::validate() const {
  if (n <= 0) throw InputError("generalized equation needs at least one unknown");
  if (parameters < 0) throw InputError("parameter dimension must be nonnegative");
  if (static_cast<int>(maps.size()) != n || static_cast<int>(outer.size()) != n)
    throw InputError("generalized equation needs one map and one outer function per unknown");
  for (int i = 0; i < n; ++i) {
    if (maps[i].dimension() != parameters + n)
      throw InputError("map " + std::to_string(i + 1) + " must have " + std::to_string(parameters + n) +
                       " variables (parameters first)");
    require_valid(outer[i], "g " + std::to_string(i + 1));
  }
  if (p_bar.size() != parameters || x_bar.size() != n || v_bar.size() != n)
    throw InputError("base point dimensions do not match the generalized equation");
}

Eigen::VectorXd GeneralizedEquation::joint(const Eigen::VectorXd& p, const Eigen::VectorXd& x) const {
  Eigen::VectorXd z(parameters + n);
  z << p, x;
  return z;
}

Eigen::VectorXd GeneralizedEquation::residual_values(const Eigen::VectorXd& p, const Eigen::VectorXd& x,
                                                     const Eigen::VectorXd& v) const {
  return v - evaluate_all(maps, joint(p, x));
}

Eigen::MatrixXd GeneralizedEquation::x_jacobian(const Eigen::VectorXd& p, const Eigen::VectorXd& x) const {
  return jacobian(maps, joint(p, x)).rightCols(n);
}

FeasibilityVerdict check_generalized_equation(const GeneralizedEquation& ge) {
  ge.validate();
  const Eigen::VectorXd y = ge.residual_values(ge.p_bar, ge.x_bar, ge.v_bar);
  ConeSelectionSystem system;
  system.equality = Eigen::MatrixXd::Zero(0, ge.n);
  system.first = Eigen::MatrixXd::Identity(ge.n, ge.n);
  system.second = -ge.x_jacobian(ge.p_bar, ge.x_bar);
  std::ostringstream off;
  for (int i = 0; i < ge.n; ++i) {
    const SubgradientGraph graph(ge.outer[i]);
    const GraphLocation loc = graph.locate({ge.x_bar(i), y(i)}, kKktTolerance);
    if (loc.distance > kKktTolerance) off << " index " << i + 1 << " off by " << loc.distance << ";";
    system.graphs.push_back(strict_derivative_graph(graph.slopes_at(loc)));
  }
  if (!off.str().empty()) throw InputError("base point is not a solution of the generalized equation:" + off.str());
  return cone_nonzero_feasibility(system);
}

StabilityReport stability_verdict(const GnlpProblem& problem, const KktPoint& kkt, const StabilityOptions& options) {
  StabilityReport report;
  report.classification = classify_indices(problem, kkt);
  report.ligc = check_ligc(problem, kkt);
  report.ssoc = check_ssoc(problem, kkt);
  report.strict_criterion = check_criterion(problem, kkt, options.mode, false);
  report.origin_criterion = check_criterion(problem, kkt, options.mode, true);

  const bool ssoc_holds = report.ssoc.status == SsocStatus::holds;
  if (problem.classical() && ssoc_holds) {
    report.sufficiency = Sufficiency::equals_ssoc;
    report.strong_sufficiency = true;
  } else if (options.assume_strong_sufficiency || options.assume_sufficiency) {
    report.sufficiency = Sufficiency::asserted_by_user;
    report.strong_sufficiency = options.assume_strong_sufficiency;
  } else if (problem.classical()) {
    report.sufficiency = Sufficiency::equals_ssoc;
  }
  const bool resolved = ssoc_holds || options.assume_sufficiency || options.assume_strong_sufficiency;

  if (!report.ligc.holds)
    report.notes.push_back("LIGC fails; dependent combination " + format_vector(*report.ligc.witness));
  if (problem.classical() && !ssoc_holds)
    report.notes.push_back(std::string("SSOC ") + to_string(report.ssoc.status) +
                           ", so strong variational sufficiency is not established");

  const FeasibilityVerdict& strict = report.strict_criterion;
  if (strict.status == ConeStatus::nonzero) {
    const Eigen::VectorXd& z = *strict.witness;
    const Eigen::VectorXd xp = z.head(problem.n);
    const Eigen::VectorXd yp = z.tail(problem.m);
    const double curvature = 0.0 - xp.dot(lagrangian_hessian(problem, kkt.x, kkt.y) * xp);
    double coupling = 0.0;
    for (int i = 0; i < problem.m; ++i) coupling += yp(i) * problem.constraints[i].gradient(kkt.x).dot(xp);
    std::ostringstream note;
    note.precision(9);
    note << "criterion admits nonzero (x', y') = " << format_vector(z) << "; -x'.H x' = " << curvature
         << ", sum y'_i a'_i = " << coupling;
    report.notes.push_back(note.str());
    report.overall = Overall::not_stable;
  } else if (resolved) {
    report.overall = Overall::stable;
  } else {
    report.overall = Overall::conditional;
    report.notes.push_back("criterion holds but variational sufficiency is unresolved; pass an assumption flag");
  }
  if (report.strong_sufficiency && report.origin_criterion.status != strict.status)
    report.notes.push_back("origin criterion disagrees with the full criterion under strong sufficiency");
  return report;
}

const char* to_string(IndexClass c) {
  switch (c) {
    case IndexClass::inactive:
      return "INACTIVE";
    case IndexClass::strongly_active:
      return "STRONGLY_ACTIVE";
    case IndexClass::degenerate:
      return "DEGENERATE";
    case IndexClass::smooth:
      return "SMOOTH";
    case IndexClass::general_kink:
      return "GENERAL_KINK";
  }
  return "?";
}

const char* to_string(SsocStatus s) {
  switch (s) {
    case SsocStatus::holds:
      return "HOLDS";
    case SsocStatus::fails:
      return "FAILS";
    case SsocStatus::inconclusive:
      return "INCONCLUSIVE";
    case SsocStatus::not_applicable:
      return "NOT_APPLICABLE";
  }
  return "?";
}

const char* to_string(Sufficiency s) {
  switch (s) {
    case Sufficiency::asserted_by_user:
      return "ASSERTED_BY_USER";
    case Sufficiency::equals_ssoc:
      return "EQUALS_SSOC";
    case Sufficiency::unknown:
      return "UNKNOWN";
  }
  return "?";
}

const char* to_string(Overall o) {
  switch (o) {
    case Overall::stable:
      return "STABLE";
    case Overall::not_stable:
      return "NOT_STABLE";
    case Overall::conditional:
      return "CONDITIONAL";
  }
  return "?";
}

const char* to_string(CriterionMode m) { return m == CriterionMode::strict ? "strict" : "coderivative"; }

}  // namespace plqstab
