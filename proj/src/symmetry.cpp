#include "newton/symmetry.hpp"

#include <cmath>

namespace newton {

Eigen::Matrix2d DihedralElement::matrix(int k) const {
  const double t = kTwoPi * j / k;
  Eigen::Matrix2d r;
  r << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
  if (reflect) r.col(1) *= -1.0;
  return r;
}

Point3 DihedralElement::apply(const Point3& p, int k) const {
  const Eigen::Vector2d xy = matrix(k) * p.head<2>();
  return {xy.x(), xy.y(), p.z()};
}

std::vector<DihedralElement> dihedral_group(int k) {
  std::vector<DihedralElement> g;
  for (int j = 0; j < k; ++j) g.push_back({j, false});
  for (int j = 0; j < k; ++j) g.push_back({j, true});
  return g;
}

AxisKind axis_kind(const Point3& p, int k) {
  const double r = std::hypot(p.x(), p.y());
  if (r < kAxisTol) return AxisKind::Center;
  const double phi = std::atan2(p.y(), p.x());
  if (std::fabs(phi) <= kAxisTol) return AxisKind::First;
  if (std::fabs(phi - kPi / k) <= kAxisTol) return AxisKind::Second;
  return AxisKind::None;
}

Point3 snap_to_axis(const Point3& p, int k) {
  const double r = std::hypot(p.x(), p.y());
  switch (axis_kind(p, k)) {
    case AxisKind::Center:
      return {0.0, 0.0, p.z()};
    case AxisKind::First:
      return {r, 0.0, p.z()};
    case AxisKind::Second:
      return {r * std::cos(kPi / k), r * std::sin(kPi / k), p.z()};
    case AxisKind::None:
      break;
  }
  return p;
}

Orbit orbit(std::span<const Point3> sector_pts, int k) {
  Orbit out;
  for (std::size_t s = 0; s < sector_pts.size(); ++s) {
    const Point3 p = snap_to_axis(sector_pts[s], k);
    const AxisKind kind = axis_kind(p, k);
    auto emit = [&](DihedralElement g) {
      out.points.push_back(g.apply(p, k));
      out.source.push_back(static_cast<int>(s));
      out.element.push_back(g);
    };
    if (kind == AxisKind::Center) {
      out.points.push_back(p);
      out.source.push_back(static_cast<int>(s));
      out.element.push_back({0, false});
      continue;
    }
    for (int j = 0; j < k; ++j) emit({j, false});
    if (kind == AxisKind::None)
      for (int j = 0; j < k; ++j) emit({j, true});
  }
  return out;
}

Eigen::Matrix3d lift(const Eigen::Matrix2d& g) {
  Eigen::Matrix3d m = Eigen::Matrix3d::Identity();
  m.topLeftCorner<2, 2>() = g;
  return m;
}

Point3 project_to_sector(const Point3& p, int k, double M, DihedralElement* used) {
  double phi = std::atan2(p.y(), p.x());
  if (phi < 0.0) phi += kTwoPi;
  const double wedge = kTwoPi / k;
  int j = static_cast<int>(std::floor(phi / wedge));
  double psi = phi - j * wedge;
  if (psi < 0.0) psi = 0.0;
  DihedralElement g;
  if (psi <= 0.5 * wedge) {
    g = {((k - j) % k + k) % k, false};
  } else {
    g = {(j + 1) % k, true};
  }
  Point3 q = g.apply(p, k);
  // Rounding can leave the image a hair outside the wedge.
  if (q.y() < 0.0) q.y() = 0.0;
  q.z() = std::min(q.z(), M);
  if (q.z() <= 0.0) q.z() = 1e-12 * M;
  if (used) *used = g;
  return q;
}

bool in_sector(const Point3& p, int k, double M) {
  const double r2 = p.x() * p.x() + p.y() * p.y();
  if (!(r2 < 1.0) || !(p.z() > 0.0 && p.z() <= M)) return false;
  if (p.y() < 0.0) return false;
  return -std::sin(kPi / k) * p.x() + std::cos(kPi / k) * p.y() <= 1e-15;
}

std::vector<PointMap> orbit_maps(const Orbit& orb, std::span<const PointMap> source_maps, int k) {
  std::vector<PointMap> maps(orb.points.size());
  for (std::size_t i = 0; i < orb.points.size(); ++i) {
    const PointMap& src = source_maps[orb.source[i]];
    maps[i].vars = src.vars;
    maps[i].jac = lift(orb.element[i].matrix(k)) * src.jac;
  }
  return maps;
}

ResistanceEval evaluate_symmetric(std::span<const Point3> sector_pts, int k, DerivativeOrder order) {
  const int n = static_cast<int>(sector_pts.size());
  const Orbit orb = orbit(sector_pts, k);
  const std::vector<PointMap> maps = orbit_maps(orb, identity_maps(n), k);
  return evaluate_mapped(orb.points, maps, 3 * n, order);
}

}  // namespace newton
