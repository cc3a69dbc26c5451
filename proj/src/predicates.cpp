#include "newton/predicates.hpp"

#include <cmath>
#include <gmpxx.h>

namespace newton {

namespace {

// (7 + 56 eps) eps with eps = 2^-53, the static bound for the determinant
// evaluated from differences against d.
constexpr double kOrientErrBound = 7.7715611723761027e-16;

int orient3d_exact(const Point3& a, const Point3& b, const Point3& c, const Point3& d) {
  const mpq_class adx = mpq_class(a.x()) - d.x(), ady = mpq_class(a.y()) - d.y(),
                  adz = mpq_class(a.z()) - d.z();
  const mpq_class bdx = mpq_class(b.x()) - d.x(), bdy = mpq_class(b.y()) - d.y(),
                  bdz = mpq_class(b.z()) - d.z();
  const mpq_class cdx = mpq_class(c.x()) - d.x(), cdy = mpq_class(c.y()) - d.y(),
                  cdz = mpq_class(c.z()) - d.z();
  const mpq_class det = adx * (bdy * cdz - bdz * cdy) + bdx * (cdy * adz - cdz * ady) +
                        cdx * (ady * bdz - adz * bdy);
  // det[a-d; b-d; c-d] has the opposite sign of our convention.
  return -sgn(det);
}

}  // namespace

double orient3d_fast(const Point3& a, const Point3& b, const Point3& c, const Point3& d) {
  return (b - a).cross(c - a).dot(d - a);
}

int orient3d(const Point3& a, const Point3& b, const Point3& c, const Point3& d) {
  const double adx = a.x() - d.x(), ady = a.y() - d.y(), adz = a.z() - d.z();
  const double bdx = b.x() - d.x(), bdy = b.y() - d.y(), bdz = b.z() - d.z();
  const double cdx = c.x() - d.x(), cdy = c.y() - d.y(), cdz = c.z() - d.z();

  const double bdxcdy = bdx * cdy, cdxbdy = cdx * bdy;
  const double cdxady = cdx * ady, adxcdy = adx * cdy;
  const double adxbdy = adx * bdy, bdxady = bdx * ady;

  const double det = adz * (bdxcdy - cdxbdy) + bdz * (cdxady - adxcdy) + cdz * (adxbdy - bdxady);
  const double permanent = (std::fabs(bdxcdy) + std::fabs(cdxbdy)) * std::fabs(adz) +
                           (std::fabs(cdxady) + std::fabs(adxcdy)) * std::fabs(bdz) +
                           (std::fabs(adxbdy) + std::fabs(bdxady)) * std::fabs(cdz);
  if (permanent == 0.0) return 0;  // every product vanishes exactly
  const double bound = kOrientErrBound * permanent;
  if (det > bound) return -1;
  if (-det > bound) return 1;
  return orient3d_exact(a, b, c, d);
}

}  // namespace newton
