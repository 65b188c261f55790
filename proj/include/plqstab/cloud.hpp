#pragma once

#include "plqstab/planar_cones.hpp"
#include "plqstab/plq.hpp"
#include "plqstab/polynomial.hpp"
#include "plqstab/rng.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

namespace plqstab {

/// A sampler handed a point off its own graph.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Draws points of a closed graph near a given graph point.
class GraphSampler {
 public:
  virtual ~GraphSampler() = default;
  virtual int dimension() const = 0;
  /// A graph point within `radius` of `center`.
  virtual Eigen::VectorXd sample_near(const Eigen::VectorXd& center, double radius, CounterRng& rng) const = 0;
  virtual double distance(const Eigen::VectorXd& p) const = 0;
};

/// Samples gph dg by arc length, with log-uniform offsets so that every
/// scale below `radius` is visited.
class PlqGraphSampler : public GraphSampler {
 public:
  explicit PlqGraphSampler(const UnivariatePlq& g) : graph_(g) {}
  int dimension() const override { return 2; }
  Eigen::VectorXd sample_near(const Eigen::VectorXd& center, double radius, CounterRng& rng) const override;
  double distance(const Eigen::VectorXd& p) const override { return graph_.distance(p.head<2>()); }
  const SubgradientGraph& graph() const { return graph_; }

 private:
  SubgradientGraph graph_;
};

struct DirectionCloud {
  std::vector<Eigen::VectorXd> points;  // unit vectors
  std::vector<double> t;
  std::vector<double> perturbation;     // distance of the first graph point from the base
};

struct CloudOptions {
  std::vector<double> t_grid{1e-3, 1e-4, 1e-5, 1e-6};
  double radius_factor = 10.0;  // graph points are drawn within radius_factor * t of the base
  int count = 10000;
  std::uint64_t seed = 1;
};

/// Normalized difference quotients of the graph near `base`.
DirectionCloud sample_strict_derivative_cloud(const GraphSampler& sampler, const Eigen::VectorXd& base,
                                              const CloudOptions& options);

struct ContainmentReport {
  bool pass = false;
  bool outer_ok = false;
  bool coverage_ok = false;
  double worst_outer = 0.0;     // largest angle from a cloud direction to the analytic set
  double worst_coverage = 0.0;  // largest angle from an extreme ray to the cloud
  int outside = 0;
};

ContainmentReport containment_check(const DirectionCloud& cloud, const PlanarConeUnion& analytic, double outer_tol,
                                    double coverage_tol);

/// S(x) = F(x) + S0(G(x)) with S0 the product of the dg_j.
struct ChainRuleProblem {
  std::vector<Polynomial> outer_map;  // F, one entry per outer function
  std::vector<Polynomial> inner_map;  // G, one entry per outer function
  std::vector<UnivariatePlq> outer;
  Eigen::VectorXd x_bar;
  Eigen::VectorXd s_bar;  // element of S0(G(x_bar))

  int n() const { return static_cast<int>(x_bar.size()); }
  int m() const { return static_cast<int>(outer.size()); }
};

struct ChainRuleOptions {
  std::vector<double> t_grid{1e-5, 1e-6};
  double radius_factor = 10.0;
  int count = 8000;
  int rhs_count = 300;
  std::uint64_t seed = 1;
  double outer_tol = 1e-3;
  double coverage_tol = 0.15;
};

struct ChainRuleReport {
  int rank = 0;
  bool full_rank = false;
  int samples = 0;
  bool forward_pass = false;
  double worst_forward = 0.0;
  /// Only evaluated when grad G has full rank.
  std::optional<bool> reverse_pass;
  double worst_reverse = 0.0;
};

ChainRuleReport sample_chain_rule(const ChainRuleProblem& problem, const ChainRuleOptions& options = {});

}  // namespace plqstab
