#pragma once

#include "plqstab/polynomial.hpp"

#include <Eigen/Core>

#include <compare>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace plqstab {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Tolerance for snapping a point onto the subgradient graph.
inline constexpr double kGraphSnapTolerance = 1e-10;

/// Closed interval of the extended reals; either end may be infinite.
struct Interval {
  double lo = -kInf;
  double hi = kInf;

  bool contains(double t, double tol = 0.0) const { return t >= lo - tol && t <= hi + tol; }
  bool is_point() const { return lo == hi; }
  double clamp(double t) const { return t < lo ? lo : (t > hi ? hi : t); }
  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Raised when a point that must lie on a subgradient graph does not.
class GraphDomainError : public std::domain_error {
 public:
  GraphDomainError(const std::string& what, double distance)
      : std::domain_error(what), distance_(distance) {}
  double distance() const { return distance_; }

 private:
  double distance_;
};

/// Slope in [0, inf]; the vertical slope is a tag, never a large float.
class Slope {
 public:
  static Slope finite(double value) { return Slope(value, false); }
  static Slope vertical() { return Slope(0.0, true); }

  bool is_vertical() const { return vertical_; }
  double value() const { return vertical_ ? kInf : value_; }

  /// Unit direction pointing into the closed northeast quadrant.
  Eigen::Vector2d direction() const;

  friend bool operator==(const Slope& a, const Slope& b) {
    return a.vertical_ == b.vertical_ && (a.vertical_ || a.value_ == b.value_);
  }
  friend std::partial_ordering operator<=>(const Slope& a, const Slope& b) {
    if (a.vertical_ || b.vertical_) return a.vertical_ <=> b.vertical_;
    return a.value_ <=> b.value_;
  }

  std::string to_string() const;

 private:
  Slope(double value, bool vertical) : value_(value), vertical_(vertical) {}
  double value_;
  bool vertical_;
};

/// Slopes of the subgradient curve leaving a graph point southwest and northeast.
struct SlopePair {
  Slope minus = Slope::finite(0.0);
  Slope plus = Slope::finite(0.0);

  bool equal() const { return minus == plus; }
  friend bool operator==(const SlopePair&, const SlopePair&) = default;
};

/// One quadratic piece (quad/2) u^2 + lin u + constant on [lo, hi].
struct PlqPiece {
  double lo = -kInf;
  double hi = kInf;
  double quad = 0.0;
  double lin = 0.0;
  double constant = 0.0;

  double value(double u) const { return 0.5 * quad * u * u + lin * u + constant; }
  double derivative(double u) const { return quad * u + lin; }
  friend bool operator==(const PlqPiece&, const PlqPiece&) = default;
};

/// Convex piecewise linear-quadratic function of one real variable.
///
/// Construction does not validate; call plq_validate (or use the problem
/// loaders, which do) before relying on convexity.
class UnivariatePlq {
 public:
  UnivariatePlq() = default;
  explicit UnivariatePlq(std::vector<PlqPiece> pieces) : pieces_(std::move(pieces)) {}

  /// Indicator of (-inf, 0].
  static UnivariatePlq indicator_nonpositive();
  /// Indicator of {0}.
  static UnivariatePlq indicator_zero();
  static UnivariatePlq zero();
  static UnivariatePlq absolute_value();
  /// (q/2) u^2 on the whole line.
  static UnivariatePlq quadratic(double q);

  const std::vector<PlqPiece>& pieces() const { return pieces_; }
  Interval domain() const;
  /// +inf outside the domain.
  double value(double u) const;

  bool is_indicator_nonpositive() const;
  bool is_indicator_zero() const;
  bool is_indicator() const { return is_indicator_nonpositive() || is_indicator_zero(); }

  friend bool operator==(const UnivariatePlq&, const UnivariatePlq&) = default;

 private:
  std::vector<PlqPiece> pieces_;
};

/// Violations are data; an empty result means the function is valid.
std::vector<std::string> plq_validate(const UnivariatePlq& g);

/// Throws InputError listing the violations when g is not valid.
void require_valid(const UnivariatePlq& g, const std::string& label);

/// Subdifferential at u, or nullopt outside dom g.
std::optional<Interval> plq_subgradient(const UnivariatePlq& g, double u);

/// Legendre-Fenchel conjugate, again a convex PLQ function.
UnivariatePlq plq_conjugate(const UnivariatePlq& g);

/// Merges adjacent pieces carrying the same quadratic.
UnivariatePlq plq_canonical(const UnivariatePlq& g, double tol = 1e-12);

bool plq_approx_equal(const UnivariatePlq& a, const UnivariatePlq& b, double tol);

/// Where a point sits on a subgradient graph after snapping.
struct GraphLocation {
  enum class Kind { vertex, segment, start_ray, end_ray };
  Kind kind = Kind::vertex;
  int index = 0;  // vertex index, or segment index (segment j joins vertices j and j+1)
  Eigen::Vector2d point = Eigen::Vector2d::Zero();
  double distance = 0.0;
};

/// The monotone curve gph dg as a polyline with two unbounded end rays.
///
/// Vertices run southwest to northeast; segment j joins vertex j to j+1 with
/// slope segment_slopes[j]. The start ray leaves vertex 0 toward the southwest,
/// the end ray leaves the last vertex toward the northeast.
class SubgradientGraph {
 public:
  explicit SubgradientGraph(const UnivariatePlq& g);

  const std::vector<Eigen::Vector2d>& vertices() const { return vertices_; }
  const std::vector<Slope>& segment_slopes() const { return segment_slopes_; }
  Slope start_slope() const { return start_slope_; }
  Slope end_slope() const { return end_slope_; }

  /// Nearest point of the curve; points within `snap` of a vertex report the vertex.
  GraphLocation locate(const Eigen::Vector2d& p, double snap = kGraphSnapTolerance) const;
  double distance(const Eigen::Vector2d& p) const { return locate(p).distance; }

  /// Arc-length coordinate of a point on the curve (0 at vertex 0).
  double arc_length(const GraphLocation& loc) const;
  Eigen::Vector2d point_at(double s) const;

  SlopePair slopes_at(const GraphLocation& loc) const;

  /// u-coordinates where the subdifferential is multivalued.
  std::vector<double> vertical_abscissae() const;

  struct Prox {
    double point;       // prox_{mu g}(z)
    double subgradient; // (z - point) / mu, an element of dg(point)
    double derivative;  // d prox / dz on the active stretch
  };
  /// Proximal map of mu*g evaluated by walking the curve u + mu*y = z.
  Prox prox(double mu, double z) const;

 private:
  std::vector<Eigen::Vector2d> vertices_;
  std::vector<Slope> segment_slopes_;
  std::vector<double> cumulative_;  // arc length at each vertex
  Slope start_slope_ = Slope::finite(0.0);
  Slope end_slope_ = Slope::finite(0.0);
};

/// Slopes of gph dg at (u, y); throws GraphDomainError when the point is
/// farther than kGraphSnapTolerance from the graph.
SlopePair local_slopes(const UnivariatePlq& g, double u, double y);

}  // namespace plqstab
