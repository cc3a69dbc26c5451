#pragma once

#include <array>
#include <span>
#include <vector>

#include "newton/predicates.hpp"

namespace newton::hull {

/// Triangulated boundary of a 3D convex polytope. Facets are oriented
/// counter-clockwise when viewed from outside; `neighbors[f][e]` is the
/// facet across the edge (v[e], v[(e + 1) % 3]).
struct ConvexHull {
  std::vector<std::array<int, 3>> facets;
  std::vector<std::array<int, 3>> neighbors;

  /// Unit outward normal of facet f (floating point).
  Point3 normal(std::span<const Point3> pts, int f) const;
};

/// Quickhull with exact orientation predicates. Points on the boundary that
/// are not vertices (coplanar with a facet, on an edge, or duplicates) are
/// dropped. Throws DegenerateConfiguration when the input is not
/// full-dimensional.
ConvexHull convex_hull(std::span<const Point3> pts);

}  // namespace newton::hull
