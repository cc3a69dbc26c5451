#pragma once

#include <array>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "newton/geometry.hpp"

namespace newton {

struct Mesh {
  std::vector<Point3> vertices;
  std::vector<std::array<int, 3>> faces;  // outward orientation
  bool degenerate = false;                // flat disc (no points above the base)
};

/// Closed triangle mesh of conv(disc U pts). Point and boundary triangles are
/// copied verbatim, cones are split into arc steps of at most `max_step`
/// radians and the base disc is fanned from its centre.
Mesh build_mesh(std::span<const Point3> pts, double max_step);

struct MeshReport {
  int vertices = 0;
  int edges = 0;
  int faces = 0;
  int euler = 0;
  bool watertight = false;  // every edge shared by exactly two faces
};

MeshReport inspect_mesh(const Mesh& mesh);

void write_ply(std::ostream& os, const Mesh& mesh);
void write_obj(std::ostream& os, const Mesh& mesh);

}  // namespace newton
