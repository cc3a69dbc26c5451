#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <array>
#include <span>
#include <vector>

#include "newton/geometry.hpp"

namespace newton {

/// Apex height, horizontal offset mu in [0, 1) and arc limits relative to the
/// apex azimuth.
struct ConeIntegralParams {
  double h = 1.0;
  double mu = 0.0;
  double a = 0.0;
  double b = kTwoPi;

  void validate() const;
};

/// Absolute tolerance of the cone quadrature.
inline constexpr double kConeQuadTol = 1e-13;

/// nu_3^3 * area of a triangle: |n_z|^3 / (2 |n|^2) with n = (b - a) x (c - a).
template <class T>
T facet_contribution(const std::array<T, 3>& a, const std::array<T, 3>& b,
                     const std::array<T, 3>& c) {
  const T e1x = b[0] - a[0], e1y = b[1] - a[1], e1z = b[2] - a[2];
  const T e2x = c[0] - a[0], e2y = c[1] - a[1], e2z = c[2] - a[2];
  const T nx = e1y * e2z - e1z * e2y;
  const T ny = e1z * e2x - e1x * e2z;
  const T nz = e1x * e2y - e1y * e2x;
  const T n2 = nx * nx + ny * ny + nz * nz;
  if (value_of(n2) <= 1e-30) return T(0.0);
  const T r = nz * nz * nz / (2.0 * n2);
  return value_of(nz) < 0.0 ? -r : r;
}

double facet_contribution(const Point3& a, const Point3& b, const Point3& c);

/// Integrand of the cone piece at absolute angle t for an apex at (x, y, h).
template <class T>
T cone_integrand(const T& x, const T& y, const T& h, const T& t) {
  using std::cos;
  using std::sin;
  const T q = 1.0 - x * cos(t) - y * sin(t);
  const T q2 = q * q;
  return q2 * q / (h * h + q2);
}

/// 1/2 * integral over [a, b] of (1 - mu cos t)^3 / (h^2 + (1 - mu cos t)^2).
double cone_contribution(const ConeIntegralParams& p);

/// Cone term for an apex at (x, y, h) over the absolute arc [a, b].
double cone_contribution(double x, double y, double h, double a, double b);

/// Resistance of the body spanned by the points: sum over all pieces of the
/// upper boundary of nu_3^3 dH^2.
double evaluate(std::span<const Point3> pts);
double evaluate(const UpperBoundary& ub, std::span<const Point3> pts);

/// Linear dependence of one point on the optimisation variables:
/// point = current position, d point / d vars[c] = jac.col(c). Unused slots
/// carry vars[c] = -1.
struct PointMap {
  std::array<int, 3> vars{-1, -1, -1};
  Eigen::Matrix3d jac = Eigen::Matrix3d::Zero();
};

enum class DerivativeOrder { Value = 0, Gradient = 1, Hessian = 2 };

struct ResistanceEval {
  double value = 0.0;
  Eigen::VectorXd gradient;
  Eigen::SparseMatrix<double> hessian;  // empty unless requested
};

/// Value and derivatives with respect to `num_vars` variables on which the
/// points depend through `maps` (one per point).
ResistanceEval evaluate_mapped(std::span<const Point3> pts, std::span<const PointMap> maps,
                               int num_vars, DerivativeOrder order);

/// Identity maps: variable 3 i + c is coordinate c of point i.
std::vector<PointMap> identity_maps(int n);

/// Value and gradient with respect to every point coordinate (length 3 n).
ResistanceEval evaluate_with_gradient(std::span<const Point3> pts);

/// Dense symmetric Hessian with respect to every point coordinate.
Eigen::MatrixXd hessian(std::span<const Point3> pts);

}  // namespace newton
