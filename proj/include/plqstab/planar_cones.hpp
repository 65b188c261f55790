#pragma once

#include "plqstab/plq.hpp"

#include <Eigen/Core>

#include <string>
#include <vector>

namespace plqstab {

/// A closed convex cone in the plane with unit generators.
///
/// WEDGE spans counterclockwise from `first` to `second` through an angle
/// strictly between 0 and pi. LINE and RAY use only `first`.
struct PlanarCone {
  enum class Kind { line, ray, wedge };
  Kind kind = Kind::ray;
  Eigen::Vector2d first = Eigen::Vector2d::UnitX();
  Eigen::Vector2d second = Eigen::Vector2d::UnitX();

  static PlanarCone line(const Eigen::Vector2d& d);
  static PlanarCone ray(const Eigen::Vector2d& d);
  /// Wedge between two directions; the order of the arguments does not matter.
  static PlanarCone wedge(const Eigen::Vector2d& a, const Eigen::Vector2d& b);

  bool contains(const Eigen::Vector2d& p, double tol = 0.0) const;
  double distance(const Eigen::Vector2d& p) const;

  friend bool operator==(const PlanarCone&, const PlanarCone&) = default;
};

/// Finite union of planar convex cones kept in canonical form.
///
/// Canonical form: the union is traced as arcs on the unit circle, touching
/// arcs are merged, arcs of angle pi or more are cut into pointed wedges,
/// antipodal isolated rays are paired into lines, and the result is sorted by
/// the angle of the first generator. Equal sets built from the same generator
/// vectors compare equal with ==.
class PlanarConeUnion {
 public:
  static constexpr double kAngleTolerance = 1e-12;

  PlanarConeUnion() = default;
  explicit PlanarConeUnion(const std::vector<PlanarCone>& cones);

  /// Convex cone generated by the given nonzero vectors.
  static PlanarConeUnion generated_by(const std::vector<Eigen::Vector2d>& generators);

  const std::vector<PlanarCone>& cones() const { return cones_; }
  bool empty() const { return cones_.empty(); }

  bool contains(const Eigen::Vector2d& p, double tol = 0.0) const;
  double distance(const Eigen::Vector2d& p) const;
  /// Angle between a nonzero direction and the nearest direction in the set.
  double angular_distance(const Eigen::Vector2d& direction) const;

  /// {y : (a, y) in the set}, as at most three disjoint closed intervals.
  std::vector<Interval> fiber(double a) const;

  PlanarConeUnion negated() const;
  PlanarConeUnion united(const PlanarConeUnion& other) const;

  /// Boundary generators of every stored cone (both directions of a line).
  std::vector<Eigen::Vector2d> extreme_rays() const;

  std::string describe() const;

  friend bool operator==(const PlanarConeUnion&, const PlanarConeUnion&) = default;

 private:
  std::vector<PlanarCone> cones_;
};

bool approx_equal(const PlanarConeUnion& a, const PlanarConeUnion& b, double tol);

/// Angle of a nonzero vector in [0, 2 pi).
double polar_angle(const Eigen::Vector2d& d);

}  // namespace plqstab
