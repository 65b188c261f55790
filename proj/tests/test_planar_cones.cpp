#include "plqstab/planar_cones.hpp"
#include "plqstab/rng.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace plqstab;

namespace {

const Eigen::Vector2d kE1(1.0, 0.0);
const Eigen::Vector2d kE2(0.0, 1.0);

PlanarCone random_cone(CounterRng& rng) {
  const double a = rng.uniform(0.0, 2.0 * std::numbers::pi);
  const Eigen::Vector2d d(std::cos(a), std::sin(a));
  switch (static_cast<int>(rng.uniform() * 3)) {
    case 0: return PlanarCone::line(d);
    case 1: return PlanarCone::ray(d);
    default: {
      const double b = a + rng.uniform(0.1, std::numbers::pi - 0.1);
      return PlanarCone::wedge(d, Eigen::Vector2d(std::cos(b), std::sin(b)));
    }
  }
}

// Membership of a direction in a single cone, by angles alone.
bool cone_contains_oracle(const PlanarCone& c, const Eigen::Vector2d& p) {
  auto ang = [](const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
    return std::atan2(a.x() * b.y() - a.y() * b.x(), a.dot(b));
  };
  const double tol = 1e-9;
  switch (c.kind) {
    case PlanarCone::Kind::line: return std::abs(std::sin(ang(c.first, p))) <= tol;
    case PlanarCone::Kind::ray: return std::abs(ang(c.first, p)) <= tol;
    case PlanarCone::Kind::wedge: {
      const double total = ang(c.first, c.second);
      const double t = ang(c.first, p);
      return t >= -tol && t <= total + tol;
    }
  }
  return false;
}

}  // namespace

TEST_CASE("factories normalize and order") {
  const PlanarCone w = PlanarCone::wedge(kE2 * 3.0, kE1 * 2.0);
  CHECK(w.first == kE1);
  CHECK(w.second == kE2);
  CHECK_THROWS(PlanarCone::wedge(kE1, -kE1));
  CHECK_THROWS(PlanarCone::wedge(kE1, 2.0 * kE1));
  CHECK(PlanarCone::ray(Eigen::Vector2d(3.0, 4.0)).first.norm() == doctest::Approx(1.0));
}

TEST_CASE("quadrant union canonical form") {
  const PlanarConeUnion q({PlanarCone::wedge(kE1, kE2), PlanarCone::wedge(-kE1, -kE2)});
  REQUIRE(q.cones().size() == 2);
  CHECK(q.contains(Eigen::Vector2d(1.0, 2.0)));
  CHECK(q.contains(Eigen::Vector2d(-1.0, -0.1)));
  CHECK_FALSE(q.contains(Eigen::Vector2d(1.0, -0.1)));
  CHECK(q.describe() == "WEDGE((1, 0), (0, 1)) u WEDGE((-1, 0), (0, -1))");
}

TEST_CASE("antipodal rays pair into a line") {
  const PlanarConeUnion a({PlanarCone::ray(-kE2), PlanarCone::ray(kE2)});
  const PlanarConeUnion b({PlanarCone::line(kE2)});
  CHECK(a == b);
  REQUIRE(b.cones().size() == 1);
  CHECK(b.cones()[0].kind == PlanarCone::Kind::line);
  CHECK(b.cones()[0].first == kE2);
}

TEST_CASE("touching arcs merge, half planes split") {
  const PlanarConeUnion half({PlanarCone::wedge(kE1, kE2), PlanarCone::wedge(kE2, -kE1)});
  CHECK(half.cones().size() == 2);
  for (const auto& c : half.cones()) CHECK(c.kind == PlanarCone::Kind::wedge);
  CHECK(half.contains(Eigen::Vector2d(-1.0, 0.0)));
  CHECK_FALSE(half.contains(Eigen::Vector2d(0.3, -1.0)));
  const PlanarConeUnion full({PlanarCone::line(kE1), PlanarCone::line(kE2), PlanarCone::wedge(kE1, kE2),
                              PlanarCone::wedge(kE2, -kE1), PlanarCone::wedge(-kE1, -kE2), PlanarCone::wedge(-kE2, kE1)});
  CHECK(full.cones().size() == 3);
  CHECK(full.fiber(0.0) == std::vector<Interval>{Interval{-kInf, kInf}});
  const PlanarConeUnion merged({PlanarCone::wedge(kE1, kE2), PlanarCone::ray(kE2), PlanarCone::ray(kE1)});
  CHECK(merged == PlanarConeUnion({PlanarCone::wedge(kE1, kE2)}));
}

TEST_CASE("union construction order does not matter") {
  for (int k = 0; k < 200; ++k) {
    CounterRng rng(21, k);
    std::vector<PlanarCone> cones;
    const int count = 1 + static_cast<int>(rng.uniform() * 4);
    for (int j = 0; j < count; ++j) cones.push_back(random_cone(rng));
    std::vector<PlanarCone> reversed(cones.rbegin(), cones.rend());
    const PlanarConeUnion a(cones);
    CHECK(approx_equal(a, PlanarConeUnion(reversed), 1e-12));
    CHECK(approx_equal(a, PlanarConeUnion(a.cones()), 1e-12));
  }
}

TEST_CASE("membership agrees with the angle oracle") {
  for (int k = 0; k < 200; ++k) {
    CounterRng rng(22, k);
    std::vector<PlanarCone> cones;
    const int count = 1 + static_cast<int>(rng.uniform() * 3);
    for (int j = 0; j < count; ++j) cones.push_back(random_cone(rng));
    const PlanarConeUnion u(cones);
    for (int j = 0; j < 50; ++j) {
      const Eigen::Vector2d p = rng.unit_vector(2);
      bool expected = false;
      for (const auto& c : cones) expected = expected || cone_contains_oracle(c, p);
      CHECK(u.contains(p, 1e-9) == expected);
      if (expected) CHECK(u.distance(p) <= 1e-8);
      else CHECK(u.angular_distance(p) > 0.0);
    }
    // Generators of every input cone are members.
    for (const auto& c : cones) {
      CHECK(u.contains(c.first, 1e-12));
      if (c.kind == PlanarCone::Kind::wedge) CHECK(u.contains(c.second, 1e-12));
      if (c.kind == PlanarCone::Kind::line) CHECK(u.contains(-c.first, 1e-12));
    }
  }
}

TEST_CASE("distance and angular distance") {
  const PlanarConeUnion ray({PlanarCone::ray(kE1)});
  CHECK(ray.distance(Eigen::Vector2d(-2.0, 0.0)) == doctest::Approx(2.0));
  CHECK(ray.distance(Eigen::Vector2d(3.0, 4.0)) == doctest::Approx(4.0));
  CHECK(ray.angular_distance(Eigen::Vector2d(0.0, 1.0)) == doctest::Approx(std::numbers::pi / 2));
  CHECK(ray.angular_distance(Eigen::Vector2d(-1.0, 0.0)) == doctest::Approx(std::numbers::pi));
}

TEST_CASE("fibers of standard graphs") {
  const PlanarConeUnion q({PlanarCone::wedge(kE1, kE2), PlanarCone::wedge(-kE1, -kE2)});
  CHECK(q.fiber(1.0) == std::vector<Interval>{Interval{0.0, kInf}});
  CHECK(q.fiber(-1.0) == std::vector<Interval>{Interval{-kInf, 0.0}});
  CHECK(q.fiber(0.0) == std::vector<Interval>{Interval{-kInf, kInf}});
  const PlanarConeUnion line({PlanarCone::line(Eigen::Vector2d(1.0, 2.0))});
  const auto f = line.fiber(1.0);
  REQUIRE(f.size() == 1);
  CHECK(f[0].lo == doctest::Approx(2.0));
  CHECK(f[0].hi == doctest::Approx(2.0));
  CHECK(PlanarConeUnion({PlanarCone::line(kE2)}).fiber(1.0).empty());
}

TEST_CASE("fiber agrees with membership") {
  for (int k = 0; k < 100; ++k) {
    CounterRng rng(23, k);
    std::vector<PlanarCone> cones;
    const int count = 1 + static_cast<int>(rng.uniform() * 3);
    for (int j = 0; j < count; ++j) cones.push_back(random_cone(rng));
    const PlanarConeUnion u(cones);
    const double a = rng.uniform(-1.0, 1.0);
    const auto fiber = u.fiber(a);
    for (int j = 0; j < 40; ++j) {
      const double y = rng.uniform(-5.0, 5.0);
      bool in_fiber = false;
      double margin = kInf;
      for (const auto& iv : fiber) {
        in_fiber = in_fiber || iv.contains(y);
        margin = std::min({margin, std::abs(y - iv.lo), std::abs(y - iv.hi)});
      }
      if (margin < 1e-6) continue;
      CHECK(u.contains(Eigen::Vector2d(a, y), 1e-9) == in_fiber);
    }
  }
}

TEST_CASE("generated_by builds the convex hull cone") {
  const auto c = PlanarConeUnion::generated_by({kE1, kE2, Eigen::Vector2d(1.0, 1.0)});
  CHECK(c == PlanarConeUnion({PlanarCone::wedge(kE1, kE2)}));
  const auto plane = PlanarConeUnion::generated_by({kE1, kE2, -kE1, -kE2});
  CHECK(plane.fiber(0.0) == std::vector<Interval>{Interval{-kInf, kInf}});
  CHECK(PlanarConeUnion::generated_by({kE1, -kE1}) == PlanarConeUnion({PlanarCone::line(kE1)}));
  CHECK(PlanarConeUnion::generated_by({kE1, 2.0 * kE1}) == PlanarConeUnion({PlanarCone::ray(kE1)}));
  const auto half = PlanarConeUnion::generated_by({kE1, kE2, -kE1});
  CHECK(half.contains(Eigen::Vector2d(-0.5, 1.0)));
  CHECK_FALSE(half.contains(Eigen::Vector2d(0.0, -1.0)));
}

TEST_CASE("negation and union") {
  const PlanarConeUnion ne({PlanarCone::wedge(kE1, kE2)});
  const PlanarConeUnion both = ne.united(ne.negated());
  CHECK(both == PlanarConeUnion({PlanarCone::wedge(kE1, kE2), PlanarCone::wedge(-kE1, -kE2)}));
  CHECK(both.extreme_rays().size() == 4);
}

TEST_CASE("polar angle range") {
  CHECK(polar_angle(kE1) == 0.0);
  CHECK(polar_angle(-kE2) == doctest::Approx(1.5 * std::numbers::pi));
  CHECK(polar_angle(Eigen::Vector2d(1.0, -1e-300)) < 2.0 * std::numbers::pi);
}
