#include "newton/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "newton/errors.hpp"
#include "newton/hull.hpp"

namespace newton {

namespace {

// Three anchors strictly below every plane that supports the disc from above.
// They make the hull full-dimensional without hiding any upper facet.
const std::array<Point3, 3> kAnchors{Point3{0.1, 0.0, -1.0}, Point3{-0.05, 0.0866, -1.0},
                                     Point3{-0.05, -0.0866, -1.0}};

// Generic start angle for the rim walk; symmetric configurations put
// breakpoints on multiples of pi / k.
constexpr double kRimStart = 0.31830988618379067;

double wrap_positive(double t) {
  t = std::fmod(t, kTwoPi);
  return t < 0.0 ? t + kTwoPi : t;
}

double rim_height(const Point3& p, double t) {
  return p.z() / (1.0 - p.x() * std::cos(t) - p.y() * std::sin(t));
}

struct DisjointSets {
  std::vector<int> parent;
  explicit DisjointSets(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  }
  void unite(int a, int b) {
    a = find(a), b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

// Valid upper facets of the hull, with exactly coplanar neighbours merged
// into faces and fan-triangulated from their lowest-index vertex.
std::vector<PointTriangle> point_triangles(const hull::ConvexHull& hull,
                                           std::span<const Point3> pts) {
  const int n = static_cast<int>(pts.size());
  const int nf = static_cast<int>(hull.facets.size());
  std::vector<char> upper(nf, 0);
  for (int f = 0; f < nf; ++f) {
    const auto& t = hull.facets[f];
    if (t[0] >= n || t[1] >= n || t[2] >= n) continue;
    const Point3 nrm = (pts[t[1]] - pts[t[0]]).cross(pts[t[2]] - pts[t[0]]);
    if (nrm.z() <= 0.0) continue;
    // plane height on the circle is >= 0  <=>  n . A >= |n_xy|
    if (nrm.dot(pts[t[0]]) >= std::hypot(nrm.x(), nrm.y())) upper[f] = 1;
  }

  DisjointSets sets(nf);
  for (int f = 0; f < nf; ++f) {
    if (!upper[f]) continue;
    const auto& t = hull.facets[f];
    for (int e = 0; e < 3; ++e) {
      const int g = hull.neighbors[f][e];
      if (g < f || !upper[g]) continue;
      const auto& s = hull.facets[g];
      int opposite = -1;
      for (int v : s)
        if (v != t[e] && v != t[(e + 1) % 3]) opposite = v;
      if (orient3d(pts[t[0]], pts[t[1]], pts[t[2]], pts[opposite]) == 0) sets.unite(f, g);
    }
  }

  std::vector<std::vector<int>> groups(nf);
  for (int f = 0; f < nf; ++f)
    if (upper[f]) groups[sets.find(f)].push_back(f);

  std::vector<PointTriangle> out;
  std::vector<int> next(n, -1);
  for (int root = 0; root < nf; ++root) {
    const auto& group = groups[root];
    if (group.empty()) continue;
    if (group.size() == 1) {
      out.push_back({hull.facets[group[0]]});
      continue;
    }
    int lowest = std::numeric_limits<int>::max();
    std::vector<int> starts;
    for (int f : group) {
      const auto& t = hull.facets[f];
      for (int e = 0; e < 3; ++e) {
        const int g = hull.neighbors[f][e];
        if (upper[g] && sets.find(g) == root) continue;
        next[t[e]] = t[(e + 1) % 3];
        starts.push_back(t[e]);
        lowest = std::min(lowest, t[e]);
      }
    }
    std::vector<int> cycle{lowest};
    for (int v = next[lowest]; v != lowest; v = next[v]) {
      if (v < 0 || cycle.size() > starts.size())
        throw DegenerateConfiguration("coplanar face boundary is not a simple cycle");
      cycle.push_back(v);
    }
    for (int v : starts) next[v] = -1;
    for (std::size_t i = 1; i + 1 < cycle.size(); ++i) {
      const PointTriangle tri{{cycle[0], cycle[i], cycle[i + 1]}};
      const Point3 nrm = (pts[tri.v[1]] - pts[tri.v[0]]).cross(pts[tri.v[2]] - pts[tri.v[0]]);
      if (nrm.squaredNorm() > 1e-28) out.push_back(tri);
    }
  }
  return out;
}

constexpr double kFluxGuard = 1e-9;

struct RimArc {
  int apex;
  double theta;  // start of the arc
};

// Upper envelope of the cone heights h_i / (1 - p_i . e(t)) around the circle.
std::vector<RimArc> rim_walk(std::span<const Point3> pts, const std::vector<char>& is_vertex,
                             const std::vector<std::vector<int>>& adj) {
  const int n = static_cast<int>(pts.size());
  int start = -1;
  double best = -1.0;
  for (int i = 0; i < n; ++i) {
    if (!is_vertex[i]) continue;
    const double g = rim_height(pts[i], kRimStart);
    if (g > best) best = g, start = i;
  }
  std::vector<RimArc> rim{{start, kRimStart}};
  const double end = kRimStart + kTwoPi;
  int cur = start;
  double theta = kRimStart;
  const int guard = 4 * n + 16;
  for (int iter = 0;; ++iter) {
    if (iter > guard) throw DegenerateConfiguration("rim walk did not close");
    int next = -1;
    double next_d = std::numeric_limits<double>::infinity();
    const Point3& p = pts[cur];
    for (int j : adj[cur]) {
      const Point3& q = pts[j];
      const double vx = q.z() * p.x() - p.z() * q.x();
      const double vy = q.z() * p.y() - p.z() * q.y();
      const double nv = std::hypot(vx, vy);
      if (nv == 0.0) continue;
      const double ratio = (q.z() - p.z()) / nv;
      if (ratio <= -1.0) continue;  // q never overtakes p
      const double entry = std::atan2(vy, vx) + std::acos(std::min(ratio, 1.0));
      const double d = wrap_positive(entry - theta);
      if (next < 0 || d < next_d - 1e-12) {
        next = j, next_d = d;
      } else if (d <= next_d + 1e-12) {
        const double probe = theta + std::max(d, next_d) + 1e-7;
        if (rim_height(q, probe) > rim_height(pts[next], probe)) next = j, next_d = std::min(d, next_d);
      }
    }
    if (next < 0 || theta + next_d >= end) break;
    theta += next_d;
    cur = next;
    rim.push_back({cur, theta});
  }
  if (rim.size() > 1 && rim.back().apex != start) {
    // A vanishing final arc can be lost to rounding right before closing.
    const Point3& p = pts[rim.back().apex];
    const Point3& q = pts[start];
    const double entry = overtaking_angle(p.x(), p.y(), p.z(), q.x(), q.y(), q.z());
    const double theta_close = rim.back().theta + wrap_positive(entry - rim.back().theta);
    if (std::fabs(theta_close - end) > 1e-9)
      throw DegenerateConfiguration("rim walk ended on apex " + std::to_string(rim.back().apex) +
                                    " instead of " + std::to_string(start));
    rim.push_back({start, std::min(theta_close, end)});
  }
  return rim;
}

}  // namespace

void ProblemConfig::validate() const {
  if (!(M > 0.0)) throw InvalidInput("M must be positive");
  if (k && *k < 2) throw InvalidInput("k must be at least 2");
}

void check_point_set(std::span<const Point3> pts, double M) {
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const Point3& p = pts[i];
    if (!(p.x() * p.x() + p.y() * p.y() < 1.0))
      throw InvalidInput("point " + std::to_string(i) + " is not above the open unit disc");
    if (!(p.z() > 0.0 && p.z() <= M))
      throw InvalidInput("point " + std::to_string(i) + " has height outside (0, M]");
  }
  std::vector<Point3> sorted(pts.begin(), pts.end());
  std::sort(sorted.begin(), sorted.end(), [](const Point3& a, const Point3& b) {
    return std::tie(a.x(), a.y(), a.z()) < std::tie(b.x(), b.y(), b.z());
  });
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw InvalidInput("point set contains coincident points");
}

UpperBoundary build_upper_boundary(std::span<const Point3> pts) {
  UpperBoundary ub;
  const int n = static_cast<int>(pts.size());
  if (n == 0) return ub;

  std::vector<Point3> aug(pts.begin(), pts.end());
  aug.insert(aug.end(), kAnchors.begin(), kAnchors.end());
  const hull::ConvexHull hull = hull::convex_hull(aug);

  std::vector<char> is_vertex(n, 0);
  std::vector<std::vector<int>> adj(n);
  for (const auto& t : hull.facets) {
    for (int e = 0; e < 3; ++e) {
      const int a = t[e], b = t[(e + 1) % 3];
      if (a < n) is_vertex[a] = 1;
      if (a < n && b < n) {
        adj[a].push_back(b);
        adj[b].push_back(a);
      }
    }
  }
  for (auto& a : adj) {
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
  }

  ub.triangles = point_triangles(hull, std::span<const Point3>(pts));

  const std::vector<RimArc> rim = rim_walk(pts, is_vertex, adj);
  auto make_cone = [&](int apex, double a, double b, int prev, int next) {
    const Point3& p = pts[apex];
    ConePiece c;
    c.apex = apex;
    c.theta_a = a;
    c.theta_b = b;
    c.mu = std::hypot(p.x(), p.y());
    c.phi = std::atan2(p.y(), p.x());
    c.h = p.z();
    c.prev = prev;
    c.next = next;
    return c;
  };
  const int r = static_cast<int>(rim.size());
  if (r == 1) {
    ub.cones.push_back(make_cone(rim[0].apex, 0.0, kTwoPi, -1, -1));
  } else {
    // rim[0] and rim[r-1] are the same apex; its arc wraps through the start angle.
    for (int s = 1; s < r; ++s)
      ub.boundary.push_back({rim[s - 1].apex, rim[s].apex, wrap_positive(rim[s].theta)});
    double a = rim[r - 1].theta;
    const double shift = a - wrap_positive(a);
    ub.cones.push_back(make_cone(rim[0].apex, a - shift, rim[1].theta + kTwoPi - shift,
                                 rim[r - 2].apex, rim[1].apex));
    for (int s = 1; s + 1 < r; ++s) {
      a = rim[s].theta;
      const double sh = a - wrap_positive(a);
      ub.cones.push_back(make_cone(rim[s].apex, a - sh, rim[s + 1].theta - sh, rim[s - 1].apex,
                                   rim[s + 1].apex));
    }
  }

  std::vector<char> visible(n, 0);
  for (const auto& t : ub.triangles)
    for (int v : t.v) visible[v] = 1;
  for (const auto& c : ub.cones) visible[c.apex] = 1;
  for (int i = 0; i < n; ++i)
    if (visible[i]) ub.hull_points.push_back(i);

  // Facet classification and the rim walk are separate floating-point
  // decisions; near ties they can disagree, which shows up as lost flux.
  const double residual = validate_decomposition(ub, pts).residual;
  if (!(std::fabs(residual) <= kFluxGuard))
    throw DegenerateConfiguration("inconsistent upper boundary (flux residual " +
                                  std::to_string(residual) + ")");
  return ub;
}

double surface_height(const UpperBoundary& ub, std::span<const Point3> pts, double x, double y) {
  if (ub.empty()) return 0.0;
  double u = std::numeric_limits<double>::infinity();
  auto plane = [&](const Point3& a, const Point3& b, const Point3& c) {
    const Point3 n = (b - a).cross(c - a);
    if (n.z() <= 0.0) return;
    u = std::min(u, a.z() - (n.x() * (x - a.x()) + n.y() * (y - a.y())) / n.z());
  };
  for (const auto& t : ub.triangles) plane(pts[t.v[0]], pts[t.v[1]], pts[t.v[2]]);
  for (const auto& b : ub.boundary)
    plane(pts[b.i], pts[b.j], Point3(std::cos(b.theta), std::sin(b.theta), 0.0));
  for (const auto& c : ub.cones) {
    const Point3& p = pts[c.apex];
    const double dx = x - p.x(), dy = y - p.y();
    const double d2 = dx * dx + dy * dy;
    if (d2 == 0.0) {
      u = std::min(u, p.z());
      continue;
    }
    // Ray from the apex shadow through (x, y) leaves the disc at p + t d, t >= 1.
    const double b = p.x() * dx + p.y() * dy;
    const double cc = p.x() * p.x() + p.y() * p.y() - 1.0;
    const double t = (-b + std::sqrt(std::max(0.0, b * b - d2 * cc))) / d2;
    const double theta = std::atan2(p.y() + t * dy, p.x() + t * dx);
    if (wrap_positive(theta - c.theta_a) <= c.theta_b - c.theta_a)
      u = std::min(u, p.z() * (1.0 - 1.0 / t));
  }
  return std::max(u, 0.0);
}

std::array<double, 2> tangency_angles(const Point3& p, const Point3& q) {
  const double vx = q.z() * p.x() - p.z() * q.x();
  const double vy = q.z() * p.y() - p.z() * q.y();
  const double nv = std::hypot(vx, vy);
  const double c = q.z() - p.z();
  if (nv == 0.0 || std::fabs(c) >= nv)
    throw NoRoot("no plane through both points touches the unit circle from above");
  const double psi = std::atan2(vy, vx), beta = std::acos(c / nv);
  return {wrap_positive(psi + beta), wrap_positive(psi - beta)};
}

double refine_tangency(const Point3& p, const Point3& q, std::optional<double> seed) {
  const auto roots = tangency_angles(p, q);
  const double s =
      seed ? *seed : std::atan2(0.5 * (p.y() + q.y()), 0.5 * (p.x() + q.x()));
  auto dist = [&](double t) {
    const double d = wrap_positive(t - s);
    return std::min(d, kTwoPi - d);
  };
  return dist(roots[0]) <= dist(roots[1]) ? roots[0] : roots[1];
}

std::array<double, 2> cone_arc_endpoints(const Point3& apex, const std::optional<Point3>& left,
                                         const std::optional<Point3>& right) {
  if (!left || !right) return {0.0, kTwoPi};
  tangency_angles(*left, apex);  // throws NoRoot when there is no boundary triangle
  tangency_angles(apex, *right);
  const double a = wrap_positive(
      overtaking_angle(left->x(), left->y(), left->z(), apex.x(), apex.y(), apex.z()));
  const double b =
      overtaking_angle(apex.x(), apex.y(), apex.z(), right->x(), right->y(), right->z());
  double len = wrap_positive(b - a);
  if (len == 0.0) len = kTwoPi;
  return {a, a + len};
}

FluxReport validate_decomposition(const UpperBoundary& ub, std::span<const Point3> pts) {
  if (ub.empty()) return {kPi, 0.0};
  double total = 0.0;
  for (const auto& t : ub.triangles) {
    const Point3 nrm = (pts[t.v[1]] - pts[t.v[0]]).cross(pts[t.v[2]] - pts[t.v[0]]);
    total += 0.5 * std::fabs(nrm.z());
  }
  for (const auto& b : ub.boundary) {
    const Point3 y{std::cos(b.theta), std::sin(b.theta), 0.0};
    const Point3 nrm = (pts[b.j] - pts[b.i]).cross(y - pts[b.i]);
    total += 0.5 * std::fabs(nrm.z());
  }
  for (const auto& c : ub.cones) {
    const Point3& p = pts[c.apex];
    const double a = c.theta_a, b = c.theta_b;
    total += 0.5 * ((b - a) - p.x() * (std::sin(b) - std::sin(a)) +
                    p.y() * (std::cos(b) - std::cos(a)));
  }
  return {total, total - kPi};
}

Combinatorics discover_combinatorics(std::span<const Point3> pts, int m) {
  if (m < 64) throw InvalidInput("discover_combinatorics needs m >= 64");
  Combinatorics out;
  out.m = m;
  const int n = static_cast<int>(pts.size());
  if (n == 0) return out;
  std::vector<Point3> aug(pts.begin(), pts.end());
  for (int j = 0; j < m; ++j) aug.push_back(circle_sample(j, m));
  const hull::ConvexHull hull = hull::convex_hull(aug);

  std::vector<std::vector<int>> fan_starts(n);
  for (std::size_t f = 0; f < hull.facets.size(); ++f) {
    const auto& t = hull.facets[f];
    const Point3 nrm = (aug[t[1]] - aug[t[0]]).cross(aug[t[2]] - aug[t[0]]);
    if (nrm.z() <= 0.0) continue;
    std::vector<int> real, samples;
    for (int v : t) (v < n ? real : samples).push_back(v);
    if (samples.empty()) {
      out.triangles.push_back({t});
    } else if (samples.size() == 1) {
      out.boundary.push_back({real[0], real[1], samples[0] - n});
    } else if (samples.size() == 2) {
      int s0 = samples[0] - n, s1 = samples[1] - n;
      if ((s0 + 1) % m != s1) std::swap(s0, s1);
      fan_starts[real[0]].push_back(s0);
    }
  }
  for (int apex = 0; apex < n; ++apex) {
    auto& s = fan_starts[apex];
    if (s.empty()) continue;
    std::sort(s.begin(), s.end());
    if (static_cast<int>(s.size()) == m) {
      out.cones.push_back({apex, 0, m});
      continue;
    }
    // split into runs of consecutive samples, joining a run that wraps past m - 1
    std::vector<std::pair<int, int>> runs;  // (first, count)
    for (int v : s) {
      if (!runs.empty() && runs.back().first + runs.back().second == v)
        ++runs.back().second;
      else
        runs.push_back({v, 1});
    }
    if (runs.size() > 1 && runs.front().first == 0 &&
        runs.back().first + runs.back().second == m) {
      runs.back().second += runs.front().second;
      runs.erase(runs.begin());
    }
    for (const auto& [first, count] : runs) out.cones.push_back({apex, first, count});
  }
  return out;
}

}  // namespace newton
