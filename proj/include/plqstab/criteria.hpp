#pragma once

#include "plqstab/cone_engine.hpp"
#include "plqstab/derivatives.hpp"
#include "plqstab/problem.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace plqstab {

/// Raised when a KKT pair is off the subgradient graphs beyond tolerance.
class InadmissibleKkt : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

enum class IndexClass { inactive, strongly_active, degenerate, smooth, general_kink };

struct IndexInfo {
  IndexClass kind = IndexClass::smooth;
  SlopePair slopes;
  bool boundary = false;  // F_i(x) + u_i is not interior to dom g_i
  double argument = 0.0;  // F_i(x) + u_i after snapping
};

struct IndexClassification {
  std::vector<IndexInfo> indices;
};

IndexClassification classify_indices(const GnlpProblem& problem, const KktPoint& kkt, double tol = kKktTolerance);

struct LigcResult {
  bool holds = true;
  std::vector<int> indices;               // boundary indices whose gradients are tested
  std::optional<Eigen::VectorXd> witness; // length m, max-norm 1, first nonzero entry positive
};

LigcResult check_ligc(const GnlpProblem& problem, const KktPoint& kkt);

inline constexpr double kSsocTolerance = 1e-8;

enum class SsocStatus { holds, fails, inconclusive, not_applicable };

struct SsocResult {
  SsocStatus status = SsocStatus::not_applicable;
  double min_eigenvalue = 0.0;
  int subspace_dimension = 0;
};

/// Second-order test on the strongly active subspace; classical problems only.
SsocResult check_ssoc(const GnlpProblem& problem, const KktPoint& kkt);

enum class CriterionMode { strict, coderivative };

/// Unknowns (x', y'); equality rows  Hess L x' + grad F^T y' = 0;
/// coupling i pairs (grad F_i . x', y'_i) with the derivative graph of dg_i.
/// With fix_x_prime the x' coordinates are pinned to zero.
ConeSelectionSystem build_criterion_system(const GnlpProblem& problem, const KktPoint& kkt, CriterionMode mode,
                                           bool fix_x_prime);

FeasibilityVerdict check_criterion(const GnlpProblem& problem, const KktPoint& kkt, CriterionMode mode,
                                   bool fix_x_prime);

/// Derivative of the KKT map in direction (x', u'): for each index the set of
/// admissible y'_i, and v' = hessian_term + transpose_jacobian * y'.
struct DerivativeFibers {
  std::vector<double> arguments;  // grad F_i . x' + u'_i
  std::vector<std::vector<Interval>> fibers;
  Eigen::VectorXd hessian_term;
  Eigen::MatrixXd transpose_jacobian;
};

DerivativeFibers derivative_fibers(const GnlpProblem& problem, const KktPoint& kkt, const Eigen::VectorXd& x_prime,
                                   const Eigen::VectorXd& u_prime, CriterionMode mode);

/// v in h(p, x) + H(x), with H(x) the product of dg_i(x_i).
/// The maps h_i are polynomials in (p, x), parameters first.
struct GeneralizedEquation {
  int parameters = 0;  // d
  int n = 0;
  std::vector<Polynomial> maps;
  std::vector<UnivariatePlq> outer;
  Eigen::VectorXd p_bar;
  Eigen::VectorXd x_bar;
  Eigen::VectorXd v_bar;

  void validate() const;
  Eigen::VectorXd joint(const Eigen::VectorXd& p, const Eigen::VectorXd& x) const;
  Eigen::VectorXd residual_values(const Eigen::VectorXd& p, const Eigen::VectorXd& x, const Eigen::VectorXd& v) const;
  Eigen::MatrixXd x_jacobian(const Eigen::VectorXd& p, const Eigen::VectorXd& x) const;
};

/// ONLY_ZERO certifies a single-valued Lipschitz localization of the solution map.
FeasibilityVerdict check_generalized_equation(const GeneralizedEquation& ge);

enum class Sufficiency { asserted_by_user, equals_ssoc, unknown };
enum class Overall { stable, not_stable, conditional };

struct StabilityOptions {
  bool assume_sufficiency = false;
  bool assume_strong_sufficiency = false;
  CriterionMode mode = CriterionMode::strict;
};

struct StabilityReport {
  IndexClassification classification;
  LigcResult ligc;
  SsocResult ssoc;
  FeasibilityVerdict strict_criterion;  // full criterion over (x', y')
  FeasibilityVerdict origin_criterion;  // x' pinned to zero
  Sufficiency sufficiency = Sufficiency::unknown;
  bool strong_sufficiency = false;
  Overall overall = Overall::conditional;
  std::vector<std::string> notes;
};

StabilityReport stability_verdict(const GnlpProblem& problem, const KktPoint& kkt, const StabilityOptions& options = {});

const char* to_string(IndexClass c);
const char* to_string(SsocStatus s);
const char* to_string(Sufficiency s);
const char* to_string(Overall o);
const char* to_string(CriterionMode m);

}  // namespace plqstab
