#include "newton/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <ostream>

#include "newton/errors.hpp"

namespace newton {

namespace {

double wrap(double t) {
  t = std::fmod(t, kTwoPi);
  return t < 0.0 ? t + kTwoPi : t;
}

// Rim vertices keyed by wrapped angle; angles closer than the tolerance
// share a vertex.
class Rim {
 public:
  void add(double t) { angles_.push_back(wrap(t)); }

  void finish() {
    std::sort(angles_.begin(), angles_.end());
    std::vector<double> merged;
    for (double a : angles_)
      if (merged.empty() || a - merged.back() > kTol) merged.push_back(a);
    if (merged.size() > 1 && merged.front() + kTwoPi - merged.back() <= kTol) merged.pop_back();
    angles_ = std::move(merged);
  }

  int index(double t) const {
    const double a = wrap(t);
    auto it = std::lower_bound(angles_.begin(), angles_.end(), a - kTol);
    if (it != angles_.end() && *it - a <= kTol) return static_cast<int>(it - angles_.begin());
    if (!angles_.empty() && a + kTol >= kTwoPi && angles_.front() <= kTol) return 0;
    throw DegenerateConfiguration("rim angle missing from the mesh rim");
  }

  const std::vector<double>& angles() const { return angles_; }

 private:
  static constexpr double kTol = 1e-12;
  std::vector<double> angles_;
};

std::vector<double> cone_steps(const ConePiece& c, double max_step) {
  const double len = c.theta_b - c.theta_a;
  const int steps = std::max(1, static_cast<int>(std::ceil(len / max_step - 1e-9)));
  std::vector<double> t(steps + 1);
  for (int s = 0; s <= steps; ++s) t[s] = c.theta_a + len * s / steps;
  t.back() = c.theta_b;
  return t;
}

}  // namespace

Mesh build_mesh(std::span<const Point3> pts, double max_step) {
  if (!(max_step > 0.0)) throw InvalidInput("mesh resolution must be positive");
  const UpperBoundary ub = build_upper_boundary(pts);
  Mesh mesh;

  Rim rim;
  if (ub.empty()) {
    mesh.degenerate = true;
    const int m = std::max(3, static_cast<int>(std::ceil(kTwoPi / max_step)));
    for (int j = 0; j < m; ++j) rim.add(kTwoPi * j / m);
  }
  for (const auto& b : ub.boundary) rim.add(b.theta);
  for (const auto& c : ub.cones)
    if (c.theta_b > c.theta_a)
      for (double t : cone_steps(c, max_step)) rim.add(t);
  rim.finish();

  const int nr = static_cast<int>(rim.angles().size());
  for (double a : rim.angles()) mesh.vertices.emplace_back(std::cos(a), std::sin(a), 0.0);
  std::map<int, int> point_vertex;
  auto vertex = [&](int p) {
    auto [it, inserted] = point_vertex.emplace(p, static_cast<int>(mesh.vertices.size()));
    if (inserted) mesh.vertices.push_back(pts[p]);
    return it->second;
  };
  auto face_up = [&](int a, int b, int c) {
    const Point3 n = (mesh.vertices[b] - mesh.vertices[a]).cross(mesh.vertices[c] - mesh.vertices[a]);
    if (n.z() < 0.0) std::swap(b, c);
    mesh.faces.push_back({a, b, c});
  };

  for (const auto& t : ub.triangles) face_up(vertex(t.v[0]), vertex(t.v[1]), vertex(t.v[2]));
  for (const auto& b : ub.boundary) face_up(vertex(b.i), vertex(b.j), rim.index(b.theta));
  for (const auto& c : ub.cones) {
    if (!(c.theta_b > c.theta_a)) continue;
    const int apex = vertex(c.apex);
    const std::vector<double> t = cone_steps(c, max_step);
    for (std::size_t s = 0; s + 1 < t.size(); ++s) {
      const int r0 = rim.index(t[s]), r1 = rim.index(t[s + 1]);
      // Intermediate rim vertices from other pieces' angles stay in the fan.
      for (int r = r0; r != r1; r = (r + 1) % nr) face_up(apex, r, (r + 1) % nr);
    }
  }

  // Degenerate (flat) bodies get a top fan of their own.
  if (mesh.degenerate) {
    const int top = static_cast<int>(mesh.vertices.size());
    mesh.vertices.emplace_back(0.0, 0.0, 0.0);
    for (int r = 0; r < nr; ++r) mesh.faces.push_back({top, r, (r + 1) % nr});
  }
  const int centre = static_cast<int>(mesh.vertices.size());
  mesh.vertices.emplace_back(0.0, 0.0, 0.0);
  for (int r = 0; r < nr; ++r) mesh.faces.push_back({centre, (r + 1) % nr, r});
  return mesh;
}

MeshReport inspect_mesh(const Mesh& mesh) {
  MeshReport rep;
  rep.vertices = static_cast<int>(mesh.vertices.size());
  rep.faces = static_cast<int>(mesh.faces.size());
  std::map<std::pair<int, int>, int> edges;
  for (const auto& f : mesh.faces)
    for (int e = 0; e < 3; ++e) {
      const int a = f[e], b = f[(e + 1) % 3];
      ++edges[{std::min(a, b), std::max(a, b)}];
    }
  rep.edges = static_cast<int>(edges.size());
  rep.watertight = std::all_of(edges.begin(), edges.end(), [](const auto& e) { return e.second == 2; });
  rep.euler = rep.vertices - rep.edges + rep.faces;
  return rep;
}

void write_ply(std::ostream& os, const Mesh& mesh) {
  os << "ply\nformat ascii 1.0\n";
  os << "element vertex " << mesh.vertices.size() << "\nproperty double x\nproperty double y\nproperty double z\n";
  os << "element face " << mesh.faces.size() << "\nproperty list uchar int vertex_indices\nend_header\n";
  os << std::setprecision(17);
  for (const auto& v : mesh.vertices) os << v.x() << ' ' << v.y() << ' ' << v.z() << '\n';
  for (const auto& f : mesh.faces) os << "3 " << f[0] << ' ' << f[1] << ' ' << f[2] << '\n';
}

void write_obj(std::ostream& os, const Mesh& mesh) {
  os << std::setprecision(17);
  for (const auto& v : mesh.vertices) os << "v " << v.x() << ' ' << v.y() << ' ' << v.z() << '\n';
  for (const auto& f : mesh.faces) os << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << '\n';
}

}  // namespace newton
