#include "cone_oracle.hpp"
#include "plqstab/cone_engine.hpp"
#include "plqstab/derivatives.hpp"

#include <doctest.h>

using namespace plqstab;
using namespace plqstab::testing;

namespace {

const Eigen::Vector2d kE1(1.0, 0.0);
const Eigen::Vector2d kE2(0.0, 1.0);

PlanarConeUnion quadrants() {
  return PlanarConeUnion({PlanarCone::wedge(kE1, kE2), PlanarCone::wedge(-kE1, -kE2)});
}

}  // namespace

TEST_CASE("rank and nullspace") {
  Eigen::MatrixXd a(2, 3);
  a << 1, 2, 3, 2, 4, 6;
  const RankNullspace rn = rank_and_nullspace(a, 1e-9);
  CHECK(rn.rank == 1);
  CHECK(rn.nullspace.cols() == 2);
  CHECK((a * rn.nullspace).norm() < 1e-12);
  CHECK((rn.nullspace.transpose() * rn.nullspace - Eigen::MatrixXd::Identity(2, 2)).norm() < 1e-12);
  CHECK(rank_and_nullspace(Eigen::MatrixXd::Zero(2, 2), 1e-9).nullspace.cols() == 2);
  CHECK(rank_and_nullspace(Eigen::Matrix2d::Identity(), 1e-9).nullspace.cols() == 0);
}

TEST_CASE("projected minimum eigenvalue") {
  Eigen::Matrix2d h;
  h << -1, 0, 0, 2;
  CHECK(projected_min_eigenvalue(h, Eigen::Vector2d(0, 1)) == doctest::Approx(2.0));
  CHECK(projected_min_eigenvalue(h, Eigen::Matrix2d::Identity()) == doctest::Approx(-1.0));
  CHECK(std::isinf(projected_min_eigenvalue(h, Eigen::MatrixXd::Zero(2, 0))));
}

TEST_CASE("half-line corner system admits only zero") {
  // x' + y' = 0 with (x', y') in the quadrant union.
  ConeSelectionSystem s;
  s.equality.resize(1, 2);
  s.equality << 1, 1;
  s.first.resize(1, 2);
  s.first << 1, 0;
  s.second.resize(1, 2);
  s.second << 0, 1;
  s.graphs = {quadrants()};
  const FeasibilityVerdict v = cone_nonzero_feasibility(s);
  CHECK(v.status == ConeStatus::only_zero);
  CHECK_FALSE(v.witness.has_value());
}

TEST_CASE("x' - y' = 0 in the quadrants has a witness") {
  ConeSelectionSystem s;
  s.equality.resize(1, 2);
  s.equality << 1, -1;
  s.first.resize(1, 2);
  s.first << 1, 0;
  s.second.resize(1, 2);
  s.second << 0, 1;
  s.graphs = {quadrants()};
  const FeasibilityVerdict v = cone_nonzero_feasibility(s);
  REQUIRE(v.status == ConeStatus::nonzero);
  REQUIRE(v.witness.has_value());
  CHECK(v.witness->cwiseAbs().maxCoeff() == doctest::Approx(1.0));
  CHECK(verify_witness(s, *v.witness, *v.selection));
}

TEST_CASE("pinned coordinates and empty graphs") {
  ConeSelectionSystem s;
  s.equality = Eigen::MatrixXd::Zero(0, 2);
  s.first.resize(1, 2);
  s.first << 1, 0;
  s.second.resize(1, 2);
  s.second << 0, 1;
  s.graphs = {PlanarConeUnion({PlanarCone::line(kE2)})};
  CHECK(cone_nonzero_feasibility(s).status == ConeStatus::nonzero);
  s.fixed = {1};
  CHECK(cone_nonzero_feasibility(s).status == ConeStatus::only_zero);
  s.fixed.clear();
  s.graphs = {PlanarConeUnion()};
  CHECK(cone_nonzero_feasibility(s).status == ConeStatus::only_zero);
}

TEST_CASE("shape errors are reported") {
  ConeSelectionSystem s;
  s.equality = Eigen::MatrixXd::Zero(1, 2);
  s.first = Eigen::MatrixXd::Zero(1, 3);
  s.second = Eigen::MatrixXd::Zero(1, 2);
  s.graphs = {quadrants()};
  CHECK_THROWS_AS(s.check(), std::invalid_argument);
}

TEST_CASE("engine agrees with the dense grid oracle") {
  int decided = 0, nonzero = 0;
  for (int k = 0; k < 120 && decided < 40; ++k) {
    CounterRng rng(51, k);
    const RandomConeSystem rs = random_cone_system(rng);
    const OracleAnswer oracle = grid_oracle(rs.system);
    if (oracle == OracleAnswer::ambiguous) continue;
    ++decided;
    const FeasibilityVerdict v = cone_nonzero_feasibility(rs.system);
    CHECK((v.status == ConeStatus::nonzero) == (oracle == OracleAnswer::nonzero));
    if (v.status == ConeStatus::nonzero) {
      ++nonzero;
      REQUIRE(v.witness.has_value());
      CHECK(verify_witness(rs.system, *v.witness, *v.selection, kWitnessTolerance));
    }
  }
  CHECK(decided >= 30);
  CHECK(nonzero > 0);
  CHECK(nonzero < decided);
}
