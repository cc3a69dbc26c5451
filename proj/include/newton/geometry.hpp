#pragma once

// Upper boundary of the body conv(closed unit disc x {0} U {x_i}).
//
// The boundary splits into three kinds of pieces: planar triangles spanned by
// three points, triangles through two points touching the unit circle at one
// angle, and cones joining one apex point to an arc of the circle.

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "newton/jet.hpp"
#include "newton/predicates.hpp"

namespace newton {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Body height M and optional dihedral symmetry order k.
struct ProblemConfig {
  double M = 1.0;
  std::optional<int> k;

  void validate() const;
};

/// Scale-aware coplanarity tolerance.
inline double plane_tolerance(double M) { return 1e-10 * (1.0 + M); }

/// Checks x1^2 + x2^2 < 1 and 0 < x3 <= M for every point and that no two
/// points coincide. Throws InvalidInput otherwise.
void check_point_set(std::span<const Point3> pts, double M);

struct PointTriangle {
  std::array<int, 3> v;  // counter-clockwise seen from above
};

/// Triangle through points i and j and the circle point (cos theta, sin theta, 0).
/// Moving counter-clockwise along the rim, the cone of i ends and the cone of
/// j begins at theta.
struct BoundaryTriangle {
  int i = -1;
  int j = -1;
  double theta = 0.0;
};

/// Cone from point `apex` over the arc [theta_a, theta_b] of the unit circle.
/// `prev`/`next` are the rim apices whose tangency with this apex fixes
/// theta_a/theta_b (-1 for a cone over the full circle).
struct ConePiece {
  int apex = -1;
  double theta_a = 0.0;
  double theta_b = 0.0;
  double mu = 0.0;   // |horizontal projection of apex|
  double phi = 0.0;  // azimuth of that projection
  double h = 0.0;    // apex height
  int prev = -1;
  int next = -1;
};

struct UpperBoundary {
  std::vector<PointTriangle> triangles;
  std::vector<BoundaryTriangle> boundary;
  std::vector<ConePiece> cones;
  std::vector<int> hull_points;  // sorted indices of visible points

  bool empty() const { return triangles.empty() && boundary.empty() && cones.empty(); }
};

/// Exact decomposition of the upper boundary. Points strictly below the
/// body spanned by the others appear in no piece. Coplanar point triangles
/// are merged into faces and re-triangulated as a fan from the face's
/// lowest-index vertex.
UpperBoundary build_upper_boundary(std::span<const Point3> pts);

/// Angle (counter-clockwise entry) at which the cone of q overtakes the cone
/// of p, i.e. the tangency angle of the plane through p and q that supports
/// the disc, on the side where p's cone precedes q's. Result lies in (-pi, 2pi].
template <class T>
T overtaking_angle(const T& px, const T& py, const T& ph, const T& qx, const T& qy, const T& qh) {
  using std::acos;
  using std::atan2;
  using std::sqrt;
  const T vx = qh * px - ph * qx;
  const T vy = qh * py - ph * qy;
  const T c = qh - ph;
  const T nv = sqrt(vx * vx + vy * vy);
  return atan2(vy, vx) + acos(c / nv);
}

/// Height of the upper boundary above (x, y), a point of the closed disc.
double surface_height(const UpperBoundary& ub, std::span<const Point3> pts, double x, double y);

/// Both tangency angles of planes through p and q touching the unit circle.
/// Throws NoRoot if one point dominates the other over the whole circle.
std::array<double, 2> tangency_angles(const Point3& p, const Point3& q);

/// Tangency angle nearest to `seed` (or to the azimuth of the midpoint of p
/// and q when no seed is given), normalized to [0, 2pi).
double refine_tangency(const Point3& p, const Point3& q, std::optional<double> seed = {});

/// Arc of the unit circle covered by the cone of `apex`, bounded by its
/// tangencies with the neighbouring rim apices. With no neighbours the cone
/// covers the full circle. Returns theta_a < theta_b <= theta_a + 2pi.
std::array<double, 2> cone_arc_endpoints(const Point3& apex, const std::optional<Point3>& left,
                                         const std::optional<Point3>& right);

struct FluxReport {
  double integral = 0.0;
  double residual = 0.0;  // integral - pi
};

/// Integral of the upward normal component over the upper boundary. Equals
/// pi (the base area) for every valid decomposition.
FluxReport validate_decomposition(const UpperBoundary& ub, std::span<const Point3> pts);

// ---------------------------------------------------------------------------
// Combinatorics discovery on a polygonal approximation of the disc.

struct ProvisionalBoundary {
  int i, j;     // real points
  int sample;   // index of the circle sample
};

struct ProvisionalCone {
  int apex;
  int first_sample;  // fan covers samples first, first+1, ..., first+count (mod m)
  int count;
};

struct Combinatorics {
  int m = 0;
  std::vector<PointTriangle> triangles;
  std::vector<ProvisionalBoundary> boundary;
  std::vector<ProvisionalCone> cones;
};

/// Hull of the points plus m equally spaced circle samples at height 0.
/// Upper facets are classified by how many of their vertices are samples;
/// fan facets sharing an apex over contiguous samples are merged.
Combinatorics discover_combinatorics(std::span<const Point3> pts, int m);

/// Circle sample j of an m-gon discretisation.
inline Point3 circle_sample(int j, int m) {
  const double t = kTwoPi * j / m;
  return {std::cos(t), std::sin(t), 0.0};
}

}  // namespace newton
