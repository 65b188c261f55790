// End-to-end acceptance checks. Prints one PASS/FAIL line per check and
// exits nonzero when any check fails.

#include "cone_oracle.hpp"
#include "plqstab/cloud.hpp"
#include "plqstab/criteria.hpp"
#include "plqstab/derivatives.hpp"
#include "plqstab/experiment.hpp"
#include "plqstab/problem_file.hpp"
#include "support.hpp"

#include <array>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <sys/wait.h>

using namespace plqstab;
using plqstab::testing::corpus_names;
using plqstab::testing::graph_points;
using plqstab::testing::random_plq;

namespace {

// Tolerances and sizes.
constexpr int kRandomPlqs = 24;
constexpr int kPointsPerPlq = 6;
constexpr double kOuterTol = 1e-6;
constexpr double kCoverageTol = 1e-2;
constexpr int kCloudSamples = 10000;
constexpr int kComposites = 10;
constexpr double kSuiteRho = 0.1;
constexpr double kSuiteDelta = 0.5;
constexpr int kSuiteSamples = 1000;
constexpr std::uint64_t kSuiteSeed = 1;
constexpr double kHalfLineLipschitzCap = 3.0;
constexpr double kDivergenceGrowth = 10.0;
constexpr double kKummerLipschitzCap = 1.0 + 1e-6;
constexpr int kOracleSystemsNeeded = 30;

const Eigen::Vector2d kE1(1.0, 0.0);
const Eigen::Vector2d kE2(0.0, 1.0);

struct Outcome {
  bool pass = false;
  std::string detail;
};

ProblemFile corpus(const std::string& name) { return load_problem_file(std::string(PLQSTAB_CORPUS) + "/" + name + ".txt"); }

std::vector<std::pair<UnivariatePlq, Eigen::Vector2d>> plq_points() {
  std::vector<std::pair<UnivariatePlq, Eigen::Vector2d>> out;
  for (int k = 0; k < kRandomPlqs; ++k) {
    CounterRng rng(2024, k);
    const UnivariatePlq g = random_plq(rng);
    const SubgradientGraph graph(g);
    auto points = graph_points(graph, rng, kPointsPerPlq);
    for (const auto& p : points) out.emplace_back(g, graph.locate(p).point);
  }
  return out;
}

Outcome case_table() {
  const UnivariatePlq ineq = UnivariatePlq::indicator_nonpositive();
  const PlanarConeUnion axis_u({PlanarCone::line(kE1)});
  const PlanarConeUnion axis_y({PlanarCone::line(kE2)});
  const PlanarConeUnion quadrants({PlanarCone::wedge(kE1, kE2), PlanarCone::wedge(-kE1, -kE2)});
  int ok = 0;
  ok += strict_derivative_graph(ineq, -1.0, 0.0) == axis_u;
  ok += strict_derivative_graph(ineq, 0.0, 1.0) == axis_y &&
        strict_derivative_graph(UnivariatePlq::indicator_zero(), 0.0, 0.5) == axis_y;
  ok += strict_derivative_graph(ineq, 0.0, 0.0) == quadrants;
  return {ok == 3, std::to_string(ok) + "/3 cases"};
}

Outcome origin_fibers() {
  const auto points = plq_points();
  int ok = 0;
  for (const auto& [g, p] : points)
    ok += origin_fiber(strict_derivative_graph(g, p.x(), p.y())) == origin_fiber(coderivative_graph(g, p.x(), p.y()));
  return {ok == static_cast<int>(points.size()),
          std::to_string(ok) + "/" + std::to_string(points.size()) + " graph points on " + std::to_string(kRandomPlqs) +
              " functions"};
}

Outcome minkowski() {
  const auto points = plq_points();
  int ok = 0;
  for (const auto& [g, p] : points)
    ok += strict_derivative_graph(g, p.x(), p.y()) == ray_minkowski_difference(graphical_derivative_graph(g, p.x(), p.y()));
  return {ok == static_cast<int>(points.size()), std::to_string(ok) + "/" + std::to_string(points.size()) + " graph points"};
}

Outcome sampled_cones() {
  const std::vector<std::tuple<std::string, UnivariatePlq, Eigen::Vector2d>> cases{
      {"half-line corner", UnivariatePlq::indicator_nonpositive(), {0.0, 0.0}},
      {"quadratic", UnivariatePlq::quadratic(2.0), {0.5, 1.0}},
      {"derivative kink", UnivariatePlq({{-kInf, 0.0, 0.0, 0.0, 0.0}, {0.0, kInf, 1.0, 0.0, 0.0}}), {0.0, 0.0}}};
  bool pass = true;
  std::ostringstream detail;
  detail.precision(3);
  for (const auto& [name, g, base] : cases) {
    CloudOptions opt;
    opt.count = kCloudSamples;
    const DirectionCloud cloud = sample_strict_derivative_cloud(PlqGraphSampler(g), base, opt);
    const ContainmentReport r =
        containment_check(cloud, strict_derivative_graph(g, base.x(), base.y()), kOuterTol, kCoverageTol);
    pass = pass && r.pass && static_cast<int>(cloud.points.size()) == kCloudSamples;
    if (!detail.str().empty()) detail << "; ";
    detail << name << " outer " << r.worst_outer << " coverage " << r.worst_coverage;
  }
  return {pass, detail.str()};
}

// Composite S(x) = F(x) + S0(G(x)) through x_bar = 0 with random data.
ChainRuleProblem random_composite(int index) {
  CounterRng rng(808, index);
  ChainRuleProblem p;
  const int n = 1 + static_cast<int>(rng.uniform() * 2);
  const int m = 1 + static_cast<int>(rng.uniform() * 2);
  auto coef = [&]() { return std::round(rng.uniform(-2.0, 2.0) * 4.0) / 4.0; };
  p.x_bar = Eigen::VectorXd::Zero(n);
  p.s_bar.resize(m);
  for (int j = 0; j < m; ++j) {
    const UnivariatePlq g = random_plq(rng);
    const SubgradientGraph graph(g);
    const auto& vertices = graph.vertices();
    Eigen::Vector2d base;
    if (rng.coin() || vertices.size() < 2) {
      base = vertices[static_cast<std::size_t>(rng.uniform() * vertices.size()) % vertices.size()];
    } else {
      const std::size_t s = static_cast<std::size_t>(rng.uniform() * (vertices.size() - 1)) % (vertices.size() - 1);
      base = 0.5 * (vertices[s] + vertices[s + 1]);
    }
    std::vector<Monomial> inner{{base.x(), std::vector<int>(n, 0)}};
    std::vector<Monomial> outer;
    for (int i = 0; i < n; ++i) {
      std::vector<int> e(n, 0);
      e[i] = 1;
      inner.push_back({coef(), e});
      outer.push_back({coef(), e});
      e[i] = 2;
      inner.push_back({coef(), e});
      outer.push_back({coef(), e});
    }
    p.inner_map.emplace_back(n, inner);
    p.outer_map.emplace_back(n, outer);
    p.outer.push_back(g);
    p.s_bar(j) = base.y();
  }
  return p;
}

Outcome chain_rule() {
  int forward = 0, full_rank = 0, reverse = 0;
  std::ostringstream ranks;
  for (int k = 0; k < kComposites; ++k) {
    const ChainRuleProblem p = random_composite(k);
    ChainRuleOptions opt;
    opt.seed = 100 + k;
    const ChainRuleReport r = sample_chain_rule(p, opt);
    forward += r.forward_pass;
    if (r.full_rank) {
      ++full_rank;
      reverse += r.reverse_pass.value_or(false);
    }
    ranks << (k ? "," : "") << r.rank << "/" << p.m();
  }
  return {forward == kComposites && reverse == full_rank,
          "forward " + std::to_string(forward) + "/" + std::to_string(kComposites) + ", two-sided " +
              std::to_string(reverse) + "/" + std::to_string(full_rank) + " full rank; ranks " + ranks.str()};
}

Outcome stability_suite() {
  // Convex or SSOC-certified problems, so variational sufficiency holds.
  const std::vector<std::string> suite{"p1", "p2", "quartic", "qp2", "l1", "degenerate2", "saddle_eq",
                                       "smooth_kink", "flat_penalty", "mixed_quartic"};
  ExperimentOptions opt;
  opt.rho = kSuiteRho;
  opt.delta = kSuiteDelta;
  opt.samples = kSuiteSamples;
  opt.seed = kSuiteSeed;
  int agree = 0;
  bool specific = true;
  std::ostringstream detail;
  detail.precision(4);
  for (const auto& name : suite) {
    const ProblemFile f = corpus(name);
    const KktPoint kkt = f.kkt();
    const bool criterion = check_criterion(f.problem, kkt, CriterionMode::strict, false).status == ConeStatus::only_zero;
    const LocalizationEstimate e = stability_experiment(f.problem, kkt, opt);
    const bool experiment = e.verdict == ExperimentVerdict::pass && e.single_valued && !e.diverging;
    agree += criterion == experiment;
    if (criterion != experiment) detail << name << " disagrees; ";

    StabilityOptions so;
    so.assume_sufficiency = true;
    const Overall overall = stability_verdict(f.problem, kkt, so).overall;
    if (name == "p1") {
      specific = specific && overall == Overall::stable && e.lipschitz_estimate <= kHalfLineLipschitzCap;
      detail << "p1 L " << e.lipschitz_estimate << "; ";
    } else if (name == "p2") {
      specific = specific && overall == Overall::not_stable && !e.base_multiplier_singleton;
    } else if (name == "quartic") {
      const auto& ladder = e.radius_ladder;
      const double growth = ladder.size() == 3 && ladder[0].estimate > 0 ? ladder[2].estimate / ladder[0].estimate : 0;
      specific = specific && overall == Overall::not_stable && e.diverging && growth >= kDivergenceGrowth;
      detail << "x^4 growth " << growth << "; ";
    }
  }
  detail << agree << "/" << suite.size() << " concordant";
  return {agree == static_cast<int>(suite.size()) && specific, detail.str()};
}

Outcome ssoc_ligc() {
  int classical = 0, ok = 0;
  for (const auto& name : corpus_names()) {
    const ProblemFile f = corpus(name);
    if (!f.problem.classical()) continue;
    ++classical;
    const KktPoint kkt = f.kkt();
    const StabilityReport r = stability_verdict(f.problem, kkt);
    const bool expected = r.ssoc.status == SsocStatus::holds && r.ligc.holds;
    ok += (r.overall == Overall::stable) == expected;
  }
  return {classical > 0 && ok == classical, std::to_string(ok) + "/" + std::to_string(classical) + " classical problems"};
}

Outcome mode_equivalence() {
  int ok = 0;
  const auto names = corpus_names();
  for (const auto& name : names) {
    const ProblemFile f = corpus(name);
    ok += check_criterion(f.problem, f.kkt(), CriterionMode::strict, true).status ==
          check_criterion(f.problem, f.kkt(), CriterionMode::coderivative, true).status;
  }
  return {ok == static_cast<int>(names.size()), std::to_string(ok) + "/" + std::to_string(names.size()) + " problems"};
}

Outcome kummer() {
  const std::vector<std::pair<std::string, ConeStatus>> cases{{"ge_stable", ConeStatus::only_zero},
                                                              {"ge_unstable", ConeStatus::nonzero},
                                                              {"ge_singular", ConeStatus::nonzero},
                                                              {"ge_regular", ConeStatus::only_zero}};
  int ok = 0;
  for (const auto& [name, status] : cases) ok += check_generalized_equation(corpus(name).equation).status == status;
  const GeneralizedEquation ge = corpus("ge_stable").equation;
  const GeneralizedEquationSamples s = sample_generalized_equation(ge, 0.1, 1000, 5);
  bool exact = s.failures == 0;
  for (const auto& [p, x] : s.pairs) exact = exact && std::abs(x(0) - std::min(p(0), 0.0)) <= 1e-9;
  const double lip = estimate_lipschitz(s.pairs);
  std::ostringstream detail;
  detail.precision(9);
  detail << ok << "/" << cases.size() << " verdicts (stable, unstable, singular, regular); min(p, 0) Lipschitz " << lip;
  return {ok == static_cast<int>(cases.size()) && exact && lip <= kKummerLipschitzCap, detail.str()};
}

Outcome oracle_agreement() {
  int decided = 0, agree = 0, witnesses = 0, nonzero = 0;
  for (int k = 0; k < 200 && decided < 40; ++k) {
    CounterRng rng(9001, k);
    const auto rs = testing::random_cone_system(rng);
    const auto oracle = testing::grid_oracle(rs.system);
    if (oracle == testing::OracleAnswer::ambiguous) continue;
    ++decided;
    const FeasibilityVerdict v = cone_nonzero_feasibility(rs.system);
    agree += (v.status == ConeStatus::nonzero) == (oracle == testing::OracleAnswer::nonzero);
    if (v.status == ConeStatus::nonzero) {
      ++nonzero;
      witnesses += v.witness && v.selection && verify_witness(rs.system, *v.witness, *v.selection, kWitnessTolerance);
    }
  }
  return {decided >= kOracleSystemsNeeded && agree == decided && witnesses == nonzero,
          std::to_string(agree) + "/" + std::to_string(decided) + " systems agree, " + std::to_string(witnesses) + "/" +
              std::to_string(nonzero) + " witnesses verified"};
}

std::pair<int, std::string> run_cli(const std::string& args) {
  std::string out;
  FILE* pipe = popen((std::string(PLQSTAB_CLI) + " " + args).c_str(), "r");
  if (!pipe) return {-1, out};
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), n);
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

Outcome determinism() {
  const std::string args = "verify --problem " + std::string(PLQSTAB_CORPUS) + "/p1.txt --format tsv --seed 7";
  const auto a = run_cli(args);
  const auto b = run_cli(args);
  return {a.first == 0 && a == b && !a.second.empty(),
          std::to_string(a.second.size()) + " bytes, exit " + std::to_string(a.first) + " and " + std::to_string(b.first)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> checks{
      {"constraint case table", case_table},
      {"origin fibers of strict and coderivative graphs", origin_fibers},
      {"strict graph as a Minkowski difference of rays", minkowski},
      {"sampled difference quotients inside the analytic cones", sampled_cones},
      {"chain rule on random composites", chain_rule},
      {"criterion against the localization experiment", stability_suite},
      {"STABLE exactly when SSOC and LIGC hold", ssoc_ligc},
      {"strict and coderivative modes with x' fixed", mode_equivalence},
      {"generalized equation verdicts", kummer},
      {"cone feasibility against the grid oracle", oracle_agreement},
      {"verify output is reproducible", determinism},
  };
  int failures = 0;
  for (std::size_t k = 0; k < checks.size(); ++k) {
    Outcome o;
    try {
      o = checks[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::cout << (o.pass ? "PASS " : "FAIL ") << k + 1 << " " << checks[k].first << ": " << o.detail << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
