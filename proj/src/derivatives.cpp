#include "plqstab/derivatives.hpp"

namespace plqstab {

namespace {

// Wedge between the northeast directions of the two slopes.
PlanarCone northeast_wedge(const SlopePair& s) { return PlanarCone::wedge(s.minus.direction(), s.plus.direction()); }

}  // namespace

PlanarConeUnion graphical_derivative_graph(const SlopePair& slopes) {
  if (slopes.equal()) return PlanarConeUnion({PlanarCone::line(slopes.plus.direction())});
  return PlanarConeUnion({PlanarCone::ray(slopes.plus.direction()), PlanarCone::ray(-slopes.minus.direction())});
}

PlanarConeUnion strict_derivative_graph(const SlopePair& slopes) {
  const PlanarCone line_plus = PlanarCone::line(slopes.plus.direction());
  if (slopes.equal()) return PlanarConeUnion({line_plus});
  const PlanarCone ne = northeast_wedge(slopes);
  const PlanarCone sw = PlanarCone::wedge(-ne.first, -ne.second);
  return PlanarConeUnion({PlanarCone::line(slopes.minus.direction()), line_plus, ne, sw});
}

PlanarConeUnion coderivative_graph(const SlopePair& slopes) {
  const PlanarCone line_plus = PlanarCone::line(slopes.plus.direction());
  if (slopes.equal()) return PlanarConeUnion({line_plus});
  PlanarCone wedge = northeast_wedge(slopes);
  if (slopes.minus > slopes.plus) wedge = PlanarCone::wedge(-wedge.first, -wedge.second);
  return PlanarConeUnion({PlanarCone::line(slopes.minus.direction()), line_plus, wedge});
}

PlanarConeUnion graphical_derivative_graph(const UnivariatePlq& g, double u, double y) {
  return graphical_derivative_graph(local_slopes(g, u, y));
}

PlanarConeUnion strict_derivative_graph(const UnivariatePlq& g, double u, double y) {
  return strict_derivative_graph(local_slopes(g, u, y));
}

PlanarConeUnion coderivative_graph(const UnivariatePlq& g, double u, double y) {
  return coderivative_graph(local_slopes(g, u, y));
}

OriginFiber origin_fiber(const PlanarConeUnion& graph) {
  for (const auto& piece : graph.fiber(0.0))
    if (piece.lo < 0.0 || piece.hi > 0.0) return OriginFiber::all_reals;
  return OriginFiber::zero;
}

const char* to_string(OriginFiber f) { return f == OriginFiber::zero ? "{0}" : "R"; }

}  // namespace plqstab
