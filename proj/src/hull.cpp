#include "newton/hull.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <utility>

#include "newton/errors.hpp"

namespace newton::hull {

namespace {

struct Face {
  std::array<int, 3> v;
  std::array<int, 3> nbr{-1, -1, -1};
  Point3 normal;  // unnormalized, for furthest-point selection only
  std::vector<int> outside;
  bool alive = true;
  int visit = 0;  // epoch tag, see add_point
};

class Quickhull {
 public:
  explicit Quickhull(std::span<const Point3> pts) : pts_(pts), start_of_(pts.size(), -1) {}

  ConvexHull run() {
    seed_simplex();
    while (!stack_.empty()) {
      const int f = stack_.back();
      stack_.pop_back();
      if (!faces_[f].alive || faces_[f].outside.empty()) continue;
      add_point(f);
    }
    return collect();
  }

 private:
  bool above(const Face& f, int p) const {
    return orient3d(pts_[f.v[0]], pts_[f.v[1]], pts_[f.v[2]], pts_[p]) > 0;
  }

  int make_face(int a, int b, int c) {
    Face f;
    f.v = {a, b, c};
    f.normal = (pts_[b] - pts_[a]).cross(pts_[c] - pts_[a]);
    faces_.push_back(std::move(f));
    return static_cast<int>(faces_.size()) - 1;
  }

  void seed_simplex() {
    const int n = static_cast<int>(pts_.size());
    if (n < 4) throw DegenerateConfiguration("convex hull needs at least 4 points");

    int i0 = 0;
    for (int i = 1; i < n; ++i)
      if (pts_[i].x() < pts_[i0].x()) i0 = i;
    int i1 = -1;
    double best = 0.0;
    for (int i = 0; i < n; ++i) {
      const double d = (pts_[i] - pts_[i0]).squaredNorm();
      if (d > best) best = d, i1 = i;
    }
    if (i1 < 0) throw DegenerateConfiguration("all hull input points coincide");
    int i2 = -1;
    best = 0.0;
    const Point3 dir = pts_[i1] - pts_[i0];
    for (int i = 0; i < n; ++i) {
      const double d = dir.cross(pts_[i] - pts_[i0]).squaredNorm();
      if (d > best) best = d, i2 = i;
    }
    if (i2 < 0) throw DegenerateConfiguration("hull input points are collinear");
    int i3 = -1;
    best = 0.0;
    for (int i = 0; i < n; ++i) {
      const double d = std::fabs(orient3d_fast(pts_[i0], pts_[i1], pts_[i2], pts_[i]));
      if (d > best && orient3d(pts_[i0], pts_[i1], pts_[i2], pts_[i]) != 0) best = d, i3 = i;
    }
    if (i3 < 0) throw DegenerateConfiguration("hull input points are coplanar");

    const std::array<int, 4> s{i0, i1, i2, i3};
    const std::array<std::array<int, 4>, 4> tri{
        {{i0, i1, i2, i3}, {i0, i3, i1, i2}, {i1, i3, i2, i0}, {i0, i2, i3, i1}}};
    std::map<std::pair<int, int>, std::pair<int, int>> edge_owner;
    for (const auto& t : tri) {
      int a = t[0], b = t[1], c = t[2];
      if (orient3d(pts_[a], pts_[b], pts_[c], pts_[t[3]]) > 0) std::swap(b, c);
      const int f = make_face(a, b, c);
      for (int e = 0; e < 3; ++e)
        edge_owner[{faces_[f].v[e], faces_[f].v[(e + 1) % 3]}] = {f, e};
    }
    for (auto& [edge, owner] : edge_owner) {
      const auto it = edge_owner.find({edge.second, edge.first});
      faces_[owner.first].nbr[owner.second] = it->second.first;
    }

    for (int i = 0; i < n; ++i) {
      if (std::find(s.begin(), s.end(), i) != s.end()) continue;
      for (int f = 0; f < 4; ++f) {
        if (above(faces_[f], i)) {
          faces_[f].outside.push_back(i);
          break;
        }
      }
    }
    for (int f = 0; f < 4; ++f)
      if (!faces_[f].outside.empty()) stack_.push_back(f);
  }

  void add_point(int f0) {
    const Face& seed = faces_[f0];
    int p = seed.outside.front();
    double best = -1.0;
    for (int q : seed.outside) {
      const double d = seed.normal.dot(pts_[q] - pts_[seed.v[0]]);
      if (d > best) best = d, p = q;
    }

    ++epoch_;
    std::vector<int> visible{f0};
    std::vector<std::pair<int, int>> horizon;  // (visible face, edge)
    faces_[f0].visit = epoch_;
    // Faces tested and found not visible are tagged with -epoch_.
    for (std::size_t k = 0; k < visible.size(); ++k) {
      const int f = visible[k];
      for (int e = 0; e < 3; ++e) {
        const int g = faces_[f].nbr[e];
        if (faces_[g].visit == epoch_) continue;
        if (faces_[g].visit == -epoch_) {
          horizon.emplace_back(f, e);
          continue;
        }
        if (above(faces_[g], p)) {
          faces_[g].visit = epoch_;
          visible.push_back(g);
        } else {
          faces_[g].visit = -epoch_;
          horizon.emplace_back(f, e);
        }
      }
    }

    std::vector<int> created;
    created.reserve(horizon.size());
    for (const auto& [f, e] : horizon) {
      const int a = faces_[f].v[e], b = faces_[f].v[(e + 1) % 3];
      const int g = faces_[f].nbr[e];
      const int nf = make_face(a, b, p);
      faces_[nf].nbr[0] = g;
      for (int ge = 0; ge < 3; ++ge)
        if (faces_[g].nbr[ge] == f && faces_[g].v[ge] == b) faces_[g].nbr[ge] = nf;
      start_of_[a] = nf;
      created.push_back(nf);
    }
    for (int nf : created) {
      Face& face = faces_[nf];
      const int a = face.v[0], b = face.v[1];
      const int next = start_of_[b];  // (b, c, p) shares edge (b, p)
      if (next < 0) throw DegenerateConfiguration("hull horizon is not a simple cycle");
      face.nbr[1] = next;
      faces_[next].nbr[2] = nf;
      (void)a;
    }
    for (int nf : created) start_of_[faces_[nf].v[0]] = -1;

    for (int f : visible) {
      Face& face = faces_[f];
      face.alive = false;
      for (int q : face.outside) {
        if (q == p) continue;
        for (int nf : created) {
          if (above(faces_[nf], q)) {
            faces_[nf].outside.push_back(q);
            break;
          }
        }
      }
      face.outside.clear();
      face.outside.shrink_to_fit();
    }
    for (int nf : created)
      if (!faces_[nf].outside.empty()) stack_.push_back(nf);
  }

  ConvexHull collect() const {
    std::vector<int> remap(faces_.size(), -1);
    ConvexHull h;
    for (std::size_t f = 0; f < faces_.size(); ++f) {
      if (!faces_[f].alive) continue;
      remap[f] = static_cast<int>(h.facets.size());
      h.facets.push_back(faces_[f].v);
    }
    h.neighbors.resize(h.facets.size());
    for (std::size_t f = 0; f < faces_.size(); ++f) {
      if (!faces_[f].alive) continue;
      for (int e = 0; e < 3; ++e) h.neighbors[remap[f]][e] = remap[faces_[f].nbr[e]];
    }
    return h;
  }

  std::span<const Point3> pts_;
  std::vector<Face> faces_;
  std::vector<int> stack_;
  std::vector<int> start_of_;
  int epoch_ = 0;
};

}  // namespace

Point3 ConvexHull::normal(std::span<const Point3> pts, int f) const {
  const auto& t = facets[f];
  return (pts[t[1]] - pts[t[0]]).cross(pts[t[2]] - pts[t[0]]).normalized();
}

ConvexHull convex_hull(std::span<const Point3> pts) { return Quickhull(pts).run(); }

}  // namespace newton::hull
