#include <cmath>

#include "doctest.h"
#include "newton/symmetry.hpp"
#include "oracles.hpp"

using namespace newton;

namespace {

Point3 polar(double r, double phi, double z) { return {r * std::cos(phi), r * std::sin(phi), z}; }

// Every image of `a` has a partner in `b` within tol, and the sizes agree.
bool same_set(std::span<const Point3> a, std::span<const Point3> b, double tol) {
  if (a.size() != b.size()) return false;
  for (const auto& p : a) {
    double best = 1e9;
    for (const auto& q : b) best = std::min(best, (p - q).norm());
    if (best > tol) return false;
  }
  return true;
}

std::vector<Point3> sector_points(int k, int n, std::uint64_t seed) {
  std::vector<Point3> pts;
  std::uint64_t s = seed * 2654435761u;
  auto u = [&] {
    s = s * 6364136223846793005ULL + 1442695040888963407ULL;
    return static_cast<double>(s >> 11) / 9007199254740992.0;
  };
  for (int i = 0; i < n; ++i)
    pts.push_back(polar(0.1 + 0.8 * u(), (0.05 + 0.9 * u()) * kPi / k, 0.2 + 0.7 * u()));
  return pts;
}

}  // namespace

TEST_CASE("orbit sizes") {
  const std::vector<Point3> generic{polar(0.5, kPi / 6 - 0.2, 0.4)};
  CHECK(orbit(generic, 3).points.size() == 6);
  const std::vector<Point3> on_axis{polar(0.5, 0.0, 0.4)};
  const auto o = orbit(on_axis, 3);
  REQUIRE(o.points.size() == 3);
  for (int j = 0; j < 3; ++j) {
    double best = 1e9;
    for (const auto& p : o.points) best = std::min(best, (p - polar(0.5, kTwoPi * j / 3, 0.4)).norm());
    CHECK(best < 1e-15);
  }
  const std::vector<Point3> second_axis{polar(0.5, kPi / 3, 0.4)};
  CHECK(orbit(second_axis, 3).points.size() == 3);
  const std::vector<Point3> centre{{0.0, 0.0, 0.7}};
  CHECK(orbit(centre, 5).points.size() == 1);
  const std::vector<Point3> near_axis{polar(0.5, 1e-13, 0.4)};
  CHECK(orbit(near_axis, 4).points.size() == 4);
}

TEST_CASE("group action permutes the orbit") {
  const std::vector<Point3> p{{0.3, 0.1, 0.5}};
  const auto img = orbit(p, 4).points;
  REQUIRE(img.size() == 8);
  // brute-force enumeration: rotations by multiples of pi/2 with and without y -> -y
  std::vector<Point3> expected;
  for (int j = 0; j < 4; ++j)
    for (int s : {1, -1}) {
      const double c = std::cos(j * kPi / 2), si = std::sin(j * kPi / 2);
      const double x = p[0].x(), y = s * p[0].y();
      expected.emplace_back(c * x - si * y, si * x + c * y, p[0].z());
    }
  CHECK(same_set(img, expected, 1e-15));
  for (const auto& g : dihedral_group(4)) {
    std::vector<Point3> moved;
    for (const auto& q : img) moved.push_back(g.apply(q, 4));
    CHECK(same_set(moved, img, 1e-14));
  }
  CHECK(dihedral_group(4).size() == 8);
}

TEST_CASE("projection to the sector") {
  const Point3 a = project_to_sector(polar(0.6, 3 * kPi / 4, 0.3), 2, 1.0);
  CHECK(std::atan2(a.y(), a.x()) == doctest::Approx(kPi / 4).epsilon(1e-14));
  const Point3 b = project_to_sector(polar(0.6, kPi / 3 + 0.1, 0.3), 3, 1.0);
  CHECK(std::atan2(b.y(), b.x()) == doctest::Approx(kPi / 3 - 0.1).epsilon(1e-14));
  CHECK(b.norm() == doctest::Approx(polar(0.6, 0.0, 0.3).norm()));
  CHECK(project_to_sector(polar(0.2, 0.1, 1.7), 3, 1.0).z() == 1.0);

  for (int k : {2, 3, 5}) {
    const auto src = sector_points(k, 4, 11);
    const auto orb = orbit(src, k);
    for (std::size_t i = 0; i < orb.points.size(); ++i) {
      const Point3 back = project_to_sector(orb.points[i], k, 1.0);
      CHECK((back - src[orb.source[i]]).norm() < 1e-14);
      CHECK(in_sector(back, k, 1.0));
    }
  }
}

TEST_CASE("symmetric objective") {
  for (int k : {2, 3, 7}) {
    const std::vector<Point3> apex{{0.0, 0.0, 0.8}};
    CHECK(evaluate_symmetric(apex, k).value == doctest::Approx(kPi / (1 + 0.64)).epsilon(1e-12));
  }
  for (int k : {2, 3, 4}) {
    auto pts = sector_points(k, 5, 3);
    const auto orb = orbit(pts, k).points;
    const double f = evaluate_symmetric(pts, k, DerivativeOrder::Value).value;
    CHECK(f == evaluate(orb));
    CHECK(std::fabs(f - oracle::mgon(orb, 16384)) < 1e-6);
    std::reverse(pts.begin(), pts.end());
    CHECK(evaluate_symmetric(pts, k, DerivativeOrder::Value).value == doctest::Approx(f).epsilon(1e-13));
    for (const auto& g : dihedral_group(k)) {
      std::vector<Point3> moved;
      for (const auto& q : orb) moved.push_back(g.apply(q, k));
      CHECK(std::fabs(evaluate(moved) - f) < 1e-12);
    }
  }
}

TEST_CASE("sector gradient matches central differences") {
  for (int k : {2, 3, 4}) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const auto pts = sector_points(k, 5, seed);
      const auto ev = evaluate_symmetric(pts, k, DerivativeOrder::Gradient);
      Eigen::VectorXd x(3 * pts.size());
      for (std::size_t i = 0; i < pts.size(); ++i) x.segment<3>(3 * i) = pts[i];
      const auto fd = oracle::central_fd(
          [&](const Eigen::VectorXd& y) {
            std::vector<Point3> q(pts.size());
            for (std::size_t i = 0; i < q.size(); ++i) q[i] = y.segment<3>(3 * i);
            return evaluate(orbit(q, k).points);
          },
          x, 1e-6);
      CHECK((ev.gradient - fd).norm() <= 1e-5 * std::max(1e-8, fd.norm()));
    }
  }
}
