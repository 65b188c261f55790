#pragma once

#include "plqstab/planar_cones.hpp"
#include "plqstab/plq.hpp"

namespace plqstab {

// Cone graphs of the derivative mappings of dg at a point (u, y) of its graph.
// Each overload taking (g, u, y) snaps the point first and throws
// GraphDomainError when it is off the graph.

/// RAY(d+) u RAY(-d-), or the single LINE when both slopes agree.
PlanarConeUnion graphical_derivative_graph(const SlopePair& slopes);
PlanarConeUnion graphical_derivative_graph(const UnivariatePlq& g, double u, double y);

/// Paratingent cone: the two lines plus both wedges between them.
PlanarConeUnion strict_derivative_graph(const SlopePair& slopes);
PlanarConeUnion strict_derivative_graph(const UnivariatePlq& g, double u, double y);

/// The two lines plus the northeast wedge when gamma+ > gamma-, the southwest
/// wedge when gamma- > gamma+.
PlanarConeUnion coderivative_graph(const SlopePair& slopes);
PlanarConeUnion coderivative_graph(const UnivariatePlq& g, double u, double y);

enum class OriginFiber { zero, all_reals };

/// {y' : (0, y') in graph}; a subspace of the reals for these graphs.
OriginFiber origin_fiber(const PlanarConeUnion& graph);

const char* to_string(OriginFiber f);

}  // namespace plqstab
