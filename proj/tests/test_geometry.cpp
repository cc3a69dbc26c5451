#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "doctest.h"
#include "newton/errors.hpp"
#include "newton/geometry.hpp"
#include "newton/hull.hpp"
#include "newton/io.hpp"
#include "newton/jobs.hpp"
#include "oracles.hpp"

using namespace newton;

namespace {

std::vector<Point3> rotate(std::span<const Point3> pts, double a) {
  std::vector<Point3> out;
  for (const auto& p : pts)
    out.emplace_back(std::cos(a) * p.x() - std::sin(a) * p.y(), std::sin(a) * p.x() + std::cos(a) * p.y(), p.z());
  return out;
}

}  // namespace

TEST_CASE("orient3d signs") {
  const Point3 a(0, 0, 0), b(1, 0, 0), c(0, 1, 0);
  CHECK(orient3d(a, b, c, Point3(0, 0, 1)) == -orient3d(a, b, c, Point3(0, 0, -1)));
  CHECK(orient3d(a, b, c, Point3(0.25, 0.5, 0)) == 0);
  CHECK(orient3d(b, a, c, Point3(0, 0, 1)) == -orient3d(a, b, c, Point3(0, 0, 1)));
  // below the double filter but exactly nonzero
  CHECK(orient3d(a, b, c, Point3(0.3, 0.3, 1e-300)) == orient3d(a, b, c, Point3(0, 0, 1)));
  // on the plane z = x + y: exactly coplanar in binary
  CHECK(orient3d(Point3(0.5, 0.25, 0.75), Point3(0.125, 0.5, 0.625), Point3(1, 1, 2),
                 Point3(0.375, 0.0625, 0.4375)) == 0);
}

TEST_CASE("hull facets support all points and close up") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    auto pts = random_configuration(seed, 40, 1.0);
    pts.emplace_back(0, 0, -1);
    for (int j = 0; j < 8; ++j) pts.push_back(circle_sample(j, 8));
    const auto h = hull::convex_hull(pts);
    std::set<std::pair<int, int>> edges;
    std::set<int> verts;
    for (std::size_t f = 0; f < h.facets.size(); ++f) {
      const auto& t = h.facets[f];
      for (int e = 0; e < 3; ++e) {
        edges.insert({std::min(t[e], t[(e + 1) % 3]), std::max(t[e], t[(e + 1) % 3])});
        verts.insert(t[e]);
      }
      for (const auto& p : pts) CHECK(orient3d(pts[t[0]], pts[t[1]], pts[t[2]], p) <= 0);
    }
    CHECK(static_cast<int>(verts.size()) - static_cast<int>(edges.size()) +
              static_cast<int>(h.facets.size()) == 2);
  }
}

TEST_CASE("no point lies outside any hull facet (small sets)") {
  // the first insertion can see several seed faces
  for (std::uint64_t seed = 1; seed <= 300; ++seed) {
    auto pts = random_configuration(seed, 8, 1.0);
    pts.emplace_back(0.1, 0.0, -1.0);
    pts.emplace_back(-0.05, 0.0866, -1.0);
    pts.emplace_back(-0.05, -0.0866, -1.0);
    const auto h = hull::convex_hull(pts);
    int outside = 0;
    for (const auto& t : h.facets)
      for (const auto& p : pts) outside += orient3d(pts[t[0]], pts[t[1]], pts[t[2]], p) > 0;
    CHECK(outside == 0);
  }
}

TEST_CASE("empty set and single apex") {
  const std::vector<Point3> none;
  const auto ub0 = build_upper_boundary(none);
  CHECK(ub0.empty());
  CHECK(validate_decomposition(ub0, none).integral == doctest::Approx(kPi).epsilon(1e-15));

  const std::vector<Point3> apex{{0.0, 0.0, 0.8}};
  const auto ub = build_upper_boundary(apex);
  REQUIRE(ub.cones.size() == 1);
  CHECK(ub.triangles.empty());
  CHECK(ub.boundary.empty());
  CHECK(ub.cones[0].theta_b - ub.cones[0].theta_a == doctest::Approx(kTwoPi));
  CHECK(std::fabs(validate_decomposition(ub, apex).residual) < 1e-12);
}

TEST_CASE("flux identity on random configurations") {
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const auto pts = random_configuration(seed, 50, 0.5 + 0.01 * static_cast<double>(seed));
    const auto ub = build_upper_boundary(pts);
    CHECK(std::fabs(validate_decomposition(ub, pts).residual) <= 1e-9);
  }
}

TEST_CASE("tangency angles match a dense scan") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto pts = random_configuration(seed, 2, 1.0);
    if (pts.size() < 2) continue;
    const auto roots = oracle::tangencies(pts[0], pts[1]);
    std::array<double, 2> ours;
    try {
      ours = tangency_angles(pts[0], pts[1]);
    } catch (const NoRoot&) {
      CHECK(roots.empty());
      continue;
    }
    REQUIRE(roots.size() == 2);
    for (double t : ours) {
      double best = 10.0;
      for (double r : roots) best = std::min(best, oracle::angle_distance(t, r));
      CHECK(best < 1e-10);
    }
    const double near = refine_tangency(pts[0], pts[1], roots[0]);
    CHECK(oracle::angle_distance(near, roots[0]) < 1e-10);
  }
}

TEST_CASE("cone arcs over the full circle and between neighbours") {
  const Point3 apex(0.1, 0.0, 0.5);
  const auto full = cone_arc_endpoints(apex, std::nullopt, std::nullopt);
  CHECK(full[1] - full[0] == doctest::Approx(kTwoPi));

  const std::vector<Point3> pts{{0.1, 0.0, 0.5}, {-0.3, 0.4, 0.4}, {-0.3, -0.4, 0.4}};
  const auto ub = build_upper_boundary(pts);
  for (const auto& c : ub.cones) {
    if (c.prev < 0) continue;
    const auto arc = cone_arc_endpoints(pts[c.apex], pts[c.prev], pts[c.next]);
    CHECK(oracle::angle_distance(arc[0], c.theta_a) < 1e-12);
    CHECK(arc[1] - arc[0] == doctest::Approx(c.theta_b - c.theta_a).epsilon(1e-12));
  }
}

TEST_CASE("polygon discovery agrees with the exact decomposition") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto pts = random_configuration(seed, 12, 1.0);
    const auto ub = build_upper_boundary(pts);
    const auto comb = discover_combinatorics(pts, 4096);
    CHECK(comb.triangles.size() == ub.triangles.size());
    CHECK(comb.boundary.size() == ub.boundary.size());
    CHECK(comb.cones.size() == ub.cones.size());
    std::multiset<int> apices_exact, apices_poly;
    for (const auto& c : ub.cones) apices_exact.insert(c.apex);
    for (const auto& c : comb.cones) apices_poly.insert(c.apex);
    CHECK(apices_exact == apices_poly);
  }
}

TEST_CASE("every planar piece supports the body") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto pts = random_configuration(seed, 30, 1.0);
    const auto ub = build_upper_boundary(pts);
    const double tau = plane_tolerance(1.0);
    auto check_plane = [&](const Point3& a, const Point3& b, const Point3& c) {
      Point3 n = (b - a).cross(c - a);
      if (n.z() < 0) n = -n;
      auto above = [&](const Point3& q) { return a.z() - (n.x() * (q.x() - a.x()) + n.y() * (q.y() - a.y())) / n.z(); };
      for (const auto& p : pts) CHECK(above(p) >= p.z() - tau);
      for (int j = 0; j < 256; ++j) CHECK(above(circle_sample(j, 256)) >= -tau);
    };
    for (const auto& t : ub.triangles) check_plane(pts[t.v[0]], pts[t.v[1]], pts[t.v[2]]);
    for (const auto& b : ub.boundary)
      check_plane(pts[b.i], pts[b.j], Point3(std::cos(b.theta), std::sin(b.theta), 0.0));
  }
}

TEST_CASE("rotation moves angles and keeps pieces") {
  const double alpha = 0.7;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto pts = random_configuration(seed, 15, 1.0);
    const auto rot = rotate(pts, alpha);
    const auto a = build_upper_boundary(pts), b = build_upper_boundary(rot);
    REQUIRE(a.triangles.size() == b.triangles.size());
    REQUIRE(a.boundary.size() == b.boundary.size());
    REQUIRE(a.cones.size() == b.cones.size());
    std::set<std::array<int, 3>> ta, tb;
    for (auto t : a.triangles) {
      std::sort(t.v.begin(), t.v.end());
      ta.insert(t.v);
    }
    for (auto t : b.triangles) {
      std::sort(t.v.begin(), t.v.end());
      tb.insert(t.v);
    }
    CHECK(ta == tb);
    std::map<std::pair<int, int>, double> ba;
    for (const auto& x : a.boundary) ba[{x.i, x.j}] = x.theta;
    for (const auto& x : b.boundary) {
      REQUIRE(ba.count({x.i, x.j}) == 1);
      CHECK(oracle::angle_distance(x.theta, ba[{x.i, x.j}] + alpha) < 1e-12);
    }
    // an apex may own several disjoint rim arcs
    for (const auto& c : b.cones) {
      int matches = 0;
      for (const auto& o : a.cones)
        if (o.apex == c.apex && oracle::angle_distance(c.theta_a, o.theta_a + alpha) < 1e-12 &&
            std::fabs((c.theta_b - c.theta_a) - (o.theta_b - o.theta_a)) < 1e-12)
          ++matches;
      CHECK(matches == 1);
    }
  }
}

TEST_CASE("surface height at apex, rim and hidden points") {
  const std::vector<Point3> pts{{0.2, 0.1, 0.9}, {0.0, 0.0, 0.1}};
  const auto ub = build_upper_boundary(pts);
  CHECK(ub.hull_points == std::vector<int>{0});
  CHECK(surface_height(ub, pts, 0.2, 0.1) == doctest::Approx(0.9).epsilon(1e-12));
  CHECK(surface_height(ub, pts, 0.0, 0.0) > 0.1);
  CHECK(surface_height(ub, pts, 0.0, -0.999999) == doctest::Approx(0.0).epsilon(1e-5));
}

TEST_CASE("invalid point sets are rejected") {
  const std::vector<Point3> outside{{1.0, 0.0, 0.5}};
  CHECK_THROWS_AS(check_point_set(outside, 1.0), InvalidInput);
  const std::vector<Point3> high{{0.0, 0.0, 1.5}};
  CHECK_THROWS_AS(check_point_set(high, 1.0), InvalidInput);
  const std::vector<Point3> low{{0.0, 0.0, 0.0}};
  CHECK_THROWS_AS(check_point_set(low, 1.0), InvalidInput);
}

TEST_CASE("boundary dump tags every piece") {
  const std::vector<Point3> pts{{0.1, 0.0, 0.5}, {-0.3, 0.4, 0.4}, {-0.3, -0.4, 0.4}, {0.0, 0.0, 0.55}};
  const auto ub = build_upper_boundary(pts);
  const auto j = io::boundary_to_json(ub);
  std::map<std::string, std::size_t> counts;
  for (const auto& f : j["facets"]) counts[f["type"].get<std::string>()]++;
  CHECK(counts["triangle"] == ub.triangles.size());
  CHECK(counts["boundary"] == ub.boundary.size());
  CHECK(counts["cone"] == ub.cones.size());
  CHECK(j["hull_points"].size() == ub.hull_points.size());
}
