#pragma once
// Shared generators and small oracles for the test binaries.

#include "plqstab/plq.hpp"
#include "plqstab/problem_file.hpp"
#include "plqstab/rng.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace plqstab::testing {

/// Random valid convex PLQ: a nondecreasing piecewise affine derivative with
/// optional jumps, on a domain that may be bounded on either side.
inline UnivariatePlq random_plq(CounterRng& rng) {
  const int kind = static_cast<int>(rng.uniform() * 10);
  if (kind == 0) return UnivariatePlq::indicator_nonpositive();
  if (kind == 1) return UnivariatePlq::indicator_zero();
  if (kind == 2) return UnivariatePlq::absolute_value();
  const bool bounded_below = rng.coin() && rng.coin();
  const bool bounded_above = rng.coin() && rng.coin();
  const int interior = static_cast<int>(rng.uniform() * 4);
  std::vector<double> cuts;
  for (int k = 0; k < interior + 2; ++k) cuts.push_back(std::round(rng.uniform(-2.0, 2.0) * 8.0) / 8.0);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  if (cuts.size() < 2) cuts.push_back(cuts.back() + 0.5);
  std::vector<double> ends{bounded_below ? cuts.front() : -kInf};
  for (std::size_t k = 1; k + 1 < cuts.size(); ++k) ends.push_back(cuts[k]);
  ends.push_back(bounded_above ? cuts.back() : kInf);

  std::vector<PlqPiece> pieces;
  double slope = std::round(rng.uniform(-2.0, 2.0) * 4.0) / 4.0;  // derivative at the left end of the piece
  double value = 0.0;                                               // value at the left end (finite ends only)
  for (std::size_t k = 0; k + 1 < ends.size(); ++k) {
    PlqPiece p;
    p.lo = ends[k];
    p.hi = ends[k + 1];
    p.quad = rng.coin() ? 0.0 : std::round(rng.uniform(0.0, 2.0) * 4.0) / 4.0;
    if (!std::isfinite(p.lo)) {
      // Anchor the first unbounded piece at its right end, or at 0.
      p.lin = slope - p.quad * (std::isfinite(p.hi) ? p.hi : 0.0);
      p.constant = 0.0;
    } else {
      p.lin = slope - p.quad * p.lo;
      p.constant = value - (0.5 * p.quad * p.lo * p.lo + p.lin * p.lo);
    }
    if (std::isfinite(p.hi)) {
      value = p.value(p.hi);
      slope = p.derivative(p.hi) + (rng.coin() ? 0.0 : std::round(rng.uniform(0.0, 1.0) * 4.0) / 4.0);
    }
    pieces.push_back(p);
  }
  return UnivariatePlq(pieces);
}

/// Vertices of the subgradient graph plus random points along it.
inline std::vector<Eigen::Vector2d> graph_points(const SubgradientGraph& graph, CounterRng& rng, int extra) {
  std::vector<Eigen::Vector2d> points = graph.vertices();
  GraphLocation last;
  last.kind = GraphLocation::Kind::vertex;
  last.index = static_cast<int>(graph.vertices().size()) - 1;
  const double length = graph.arc_length(last);
  for (int k = 0; k < extra; ++k) points.push_back(graph.point_at(rng.uniform(-2.0, length + 2.0)));
  return points;
}

inline std::vector<std::string> corpus_names() {
  return {"p1", "p2", "quartic", "qp2", "l1", "degenerate2", "saddle_eq", "smooth_kink", "flat_penalty",
          "mixed_quartic", "concave"};
}

}  // namespace plqstab::testing
