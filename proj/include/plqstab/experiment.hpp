#pragma once

#include "plqstab/criteria.hpp"
#include "plqstab/local_solver.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace plqstab {

/// Largest output-distance / input-distance ratio over pairs whose inputs are
/// at least `min_input_distance` apart (and distinct). Throws InputError when
/// no pair qualifies.
double estimate_lipschitz(const std::vector<std::pair<Eigen::VectorXd, Eigen::VectorXd>>& samples,
                          double min_input_distance = 0.0);

struct LadderRung {
  double radius = 0.0;
  double estimate = 0.0;  // 0 when fewer than two unique solves qualify
  int unique_solves = 0;
};

enum class ExperimentVerdict { pass, fail, invalid };

struct ExperimentOptions {
  double rho = 0.1;
  double delta = 0.5;
  int samples = 1000;
  std::uint64_t seed = 1;
  int resolution = 64;
  std::vector<double> ladder{1.0, 0.1, 0.001};  // rung radii as fractions of rho
  double pair_filter = 0.01;                    // pairs need input distance >= pair_filter * radius
  double divergence_factor = 10.0;
  double empty_fraction = 0.01;
  int identification_samples = 0;  // samples of the first rung re-checked for identification (needs n <= 2)
};

struct LocalizationEstimate {
  ExperimentVerdict verdict = ExperimentVerdict::invalid;
  bool single_valued = false;
  bool diverging = false;
  double lipschitz_estimate = 0.0;  // first rung; meaningless when diverging
  int sample_count = 0;
  int empty_count = 0;
  int multiple_count = 0;
  int boundary_count = 0;
  int nonsingleton_count = 0;
  int far_multiplier_count = 0;  // unique solves whose multiplier leaves the delta-ball around y_bar
  bool base_multiplier_singleton = true;
  std::vector<LadderRung> radius_ladder;
  std::optional<bool> identification_ok;
  std::vector<std::string> notes;
};

LocalizationEstimate stability_experiment(const GnlpProblem& problem, const KktPoint& kkt,
                                          const ExperimentOptions& options = {});

enum class IdentificationStatus { pass, fail, unresolved };

struct IdentificationOutcome {
  IdentificationStatus status = IdentificationStatus::pass;
  int kkt_pairs = 0;
  std::vector<std::string> notes;
};

/// For each (v, u): every KKT pair in the open delta-balls around (x_bar, y_bar)
/// must coincide with the localized minimizer pair, unless its x is not a local minimizer.
std::vector<IdentificationOutcome> verify_identification(
    const GnlpProblem& problem, const KktPoint& kkt,
    const std::vector<std::pair<Eigen::VectorXd, Eigen::VectorXd>>& samples, double delta, int resolution = 32,
    std::uint64_t seed = 1);

/// Solution of v in h(p, x) + H(x) near x0 by semismooth Newton, or nullopt.
std::optional<Eigen::VectorXd> solve_generalized_equation(const GeneralizedEquation& ge, const Eigen::VectorXd& p,
                                                          const Eigen::VectorXd& v, const Eigen::VectorXd& x0);

struct GeneralizedEquationSamples {
  std::vector<std::pair<Eigen::VectorXd, Eigen::VectorXd>> pairs;  // (p, x(p)) with v = v_bar
  int failures = 0;
};

GeneralizedEquationSamples sample_generalized_equation(const GeneralizedEquation& ge, double rho, int count,
                                                       std::uint64_t seed);

const char* to_string(ExperimentVerdict v);
const char* to_string(IdentificationStatus s);

}  // namespace plqstab
