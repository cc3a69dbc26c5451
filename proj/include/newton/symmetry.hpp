#pragma once

// Dihedral symmetry reduction. D_k acts on the horizontal plane by the k
// rotations through 2 pi j / k, each optionally preceded by the reflection
// across the x-axis. The fundamental sector is
//   S_k = { (r cos phi, r sin phi) : 0 <= r < 1, 0 <= phi <= pi / k }.

#include <Eigen/Core>
#include <span>
#include <vector>

#include "newton/resistance.hpp"

namespace newton {

/// Tolerance below which a sector point counts as lying on a symmetry axis.
inline constexpr double kAxisTol = 1e-12;

/// Group element: rotation by 2 pi j / k after an optional reflection (x, y) -> (x, -y).
struct DihedralElement {
  int j = 0;
  bool reflect = false;

  Eigen::Matrix2d matrix(int k) const;
  Point3 apply(const Point3& p, int k) const;
};

/// All 2k elements of D_k.
std::vector<DihedralElement> dihedral_group(int k);

enum class AxisKind { None, First, Second, Center };

/// Where a sector point sits relative to the sector boundary rays
/// (phi = 0 is First, phi = pi / k is Second, r = 0 is Center).
AxisKind axis_kind(const Point3& p, int k);

/// Snaps near-axis points exactly onto their axis.
Point3 snap_to_axis(const Point3& p, int k);

struct Orbit {
  std::vector<Point3> points;
  std::vector<int> source;                // sector point each image came from
  std::vector<DihedralElement> element;   // element mapping the source onto it
};

/// Images of every sector point under D_k: 2k for generic points, k for
/// points on a symmetry axis and 1 for the centre. Axis points are detected
/// from their coordinates (after snapping), never by comparing images.
Orbit orbit(std::span<const Point3> sector_pts, int k);

/// Block matrix diag(G, 1) of a group element acting on 3D points.
Eigen::Matrix3d lift(const Eigen::Matrix2d& g);

/// Representative of the D_k orbit of p with azimuth in [0, pi / k], with
/// the height clamped to (0, M]. `used`, when given, receives the element
/// that maps p to the representative.
Point3 project_to_sector(const Point3& p, int k, double M, DihedralElement* used = nullptr);

bool in_sector(const Point3& p, int k, double M);

/// Resistance of the orbit of the sector points together with the gradient
/// (and optionally the Hessian) with respect to the sector coordinates,
/// pulled back through the orbit map.
ResistanceEval evaluate_symmetric(std::span<const Point3> sector_pts, int k,
                                  DerivativeOrder order = DerivativeOrder::Gradient);

/// Point maps of the orbit images given the maps of their sources.
std::vector<PointMap> orbit_maps(const Orbit& orb, std::span<const PointMap> source_maps, int k);

}  // namespace newton
