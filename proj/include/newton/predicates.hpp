#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace newton {

using Point3 = Eigen::Vector3d;

/// Sign of ((b - a) x (c - a)) . (d - a): +1 when d lies on the side the
/// counter-clockwise normal of (a, b, c) points to, -1 on the other side and
/// 0 when the four points are exactly coplanar. Uses a floating-point filter
/// and falls back to exact rational arithmetic when the filter is
/// inconclusive.
int orient3d(const Point3& a, const Point3& b, const Point3& c, const Point3& d);

/// Floating-point value of the same determinant (no sign guarantee).
double orient3d_fast(const Point3& a, const Point3& b, const Point3& c, const Point3& d);

}  // namespace newton
