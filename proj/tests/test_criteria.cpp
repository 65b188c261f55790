#include "plqstab/criteria.hpp"
#include "plqstab/problem_file.hpp"
#include "support.hpp"

#include <doctest.h>

#include <map>

using namespace plqstab;

namespace {

ProblemFile corpus(const std::string& name) { return load_problem_file(std::string(PLQSTAB_CORPUS) + "/" + name + ".txt"); }

}  // namespace

TEST_CASE("index classification at the corner") {
  const ProblemFile p1 = corpus("p1");
  const IndexClassification cls = classify_indices(p1.problem, p1.kkt());
  REQUIRE(cls.indices.size() == 1);
  CHECK(cls.indices[0].kind == IndexClass::degenerate);
  CHECK(cls.indices[0].boundary);
  CHECK(cls.indices[0].slopes.minus == Slope::finite(0.0));
  CHECK(cls.indices[0].slopes.plus == Slope::vertical());

  KktPoint off = p1.kkt();
  off.y(0) = -1.0;
  CHECK_THROWS_AS(classify_indices(p1.problem, off), InadmissibleKkt);
}

TEST_CASE("LIGC") {
  const ProblemFile p1 = corpus("p1");
  const LigcResult a = check_ligc(p1.problem, p1.kkt());
  CHECK(a.holds);
  CHECK(a.indices == std::vector<int>{0});

  const ProblemFile p2 = corpus("p2");
  const LigcResult b = check_ligc(p2.problem, p2.kkt());
  CHECK_FALSE(b.holds);
  REQUIRE(b.witness.has_value());
  CHECK((*b.witness - Eigen::Vector2d(1.0, -1.0)).norm() < 1e-12);
}

TEST_CASE("SSOC") {
  CHECK(check_ssoc(corpus("p1").problem, corpus("p1").kkt()).status == SsocStatus::holds);
  const SsocResult quartic = check_ssoc(corpus("quartic").problem, corpus("quartic").kkt());
  CHECK(quartic.status == SsocStatus::inconclusive);
  CHECK(check_ssoc(corpus("concave").problem, corpus("concave").kkt()).status == SsocStatus::fails);
  CHECK(check_ssoc(corpus("l1").problem, corpus("l1").kkt()).status == SsocStatus::not_applicable);
  // The equality constraint removes the negative direction.
  const SsocResult saddle = check_ssoc(corpus("saddle_eq").problem, corpus("saddle_eq").kkt());
  CHECK(saddle.status == SsocStatus::holds);
  CHECK(saddle.subspace_dimension == 1);
}

TEST_CASE("criterion witness for the repeated equality") {
  const ProblemFile p2 = corpus("p2");
  const FeasibilityVerdict v = check_criterion(p2.problem, p2.kkt(), CriterionMode::strict, false);
  REQUIRE(v.status == ConeStatus::nonzero);
  // x' = 0 and y' along the dependent combination.
  CHECK(std::abs((*v.witness)(0)) < 1e-12);
  CHECK(std::abs((*v.witness)(1) + (*v.witness)(2)) < 1e-12);
  CHECK(std::abs((*v.witness)(1)) == doctest::Approx(1.0));
  CHECK(check_criterion(p2.problem, p2.kkt(), CriterionMode::strict, true).status == ConeStatus::nonzero);
  CHECK(check_criterion(corpus("p1").problem, corpus("p1").kkt(), CriterionMode::strict, false).status ==
        ConeStatus::only_zero);
}

TEST_CASE("derivative fibers of the KKT map") {
  const ProblemFile p1 = corpus("p1");
  const DerivativeFibers d = derivative_fibers(p1.problem, p1.kkt(), Eigen::VectorXd::Ones(1),
                                               Eigen::VectorXd::Zero(1), CriterionMode::strict);
  REQUIRE(d.fibers.size() == 1);
  CHECK(d.arguments[0] == doctest::Approx(1.0));
  REQUIRE(d.fibers[0].size() == 1);
  CHECK(d.fibers[0][0] == Interval{0.0, kInf});
  CHECK(d.hessian_term(0) == doctest::Approx(1.0));

  const DerivativeFibers back = derivative_fibers(p1.problem, p1.kkt(), -Eigen::VectorXd::Ones(1),
                                                  Eigen::VectorXd::Zero(1), CriterionMode::strict);
  CHECK(back.fibers[0][0] == Interval{-kInf, 0.0});

  const DerivativeFibers co = derivative_fibers(p1.problem, p1.kkt(), -Eigen::VectorXd::Ones(1),
                                                Eigen::VectorXd::Zero(1), CriterionMode::coderivative);
  CHECK(co.fibers[0][0] == Interval{0.0, 0.0});
  CHECK_THROWS_AS(derivative_fibers(p1.problem, p1.kkt(), Eigen::VectorXd::Ones(2), Eigen::VectorXd::Zero(1),
                                    CriterionMode::strict),
                  InputError);
}

TEST_CASE("verdicts across the corpus") {
  const std::map<std::string, Overall> expected{
      {"p1", Overall::stable},          {"p2", Overall::not_stable},          {"quartic", Overall::not_stable},
      {"qp2", Overall::stable},         {"l1", Overall::conditional},         {"degenerate2", Overall::stable},
      {"saddle_eq", Overall::stable},   {"smooth_kink", Overall::conditional}, {"flat_penalty", Overall::not_stable},
      {"mixed_quartic", Overall::not_stable}, {"concave", Overall::conditional}};
  for (const auto& name : testing::corpus_names()) {
    CAPTURE(name);
    const ProblemFile f = corpus(name);
    CHECK(stability_verdict(f.problem, f.kkt()).overall == expected.at(name));
  }
  const ProblemFile l1 = corpus("l1");
  StabilityOptions assume;
  assume.assume_sufficiency = true;
  const StabilityReport r = stability_verdict(l1.problem, l1.kkt(), assume);
  CHECK(r.overall == Overall::stable);
  CHECK(r.sufficiency == Sufficiency::asserted_by_user);
}

TEST_CASE("strict and coderivative modes agree once x' is pinned") {
  for (const auto& name : testing::corpus_names()) {
    CAPTURE(name);
    const ProblemFile f = corpus(name);
    CHECK(check_criterion(f.problem, f.kkt(), CriterionMode::strict, true).status ==
          check_criterion(f.problem, f.kkt(), CriterionMode::coderivative, true).status);
  }
}

TEST_CASE("generalized equation criterion") {
  const std::map<std::string, ConeStatus> expected{{"ge_stable", ConeStatus::only_zero},
                                                   {"ge_unstable", ConeStatus::nonzero},
                                                   {"ge_singular", ConeStatus::nonzero},
                                                   {"ge_regular", ConeStatus::only_zero}};
  for (const auto& [name, status] : expected) {
    CAPTURE(name);
    const ProblemFile f = corpus(name);
    REQUIRE(f.kind == ProblemFile::Kind::generalized_equation);
    CHECK(check_generalized_equation(f.equation).status == status);
  }
  GeneralizedEquation moved = corpus("ge_stable").equation;
  moved.x_bar(0) = 1.0;
  CHECK_THROWS_AS(check_generalized_equation(moved), InputError);
}
