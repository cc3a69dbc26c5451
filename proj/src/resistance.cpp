#include "newton/resistance.hpp"

#include <cmath>

#include "newton/errors.hpp"
#include "newton/quadrature.hpp"

namespace newton {

namespace {

using J9 = Jet<9>;
using J4 = Jet<4>;
using Triplet = Eigen::Triplet<double>;

// Maps global variable indices to the (at most nine) local jet slots of a term.
struct LocalVars {
  std::array<int, 9> global{};
  int count = 0;

  int slot(int g) {
    for (int s = 0; s < count; ++s)
      if (global[s] == g) return s;
    if (count == 9) throw DegenerateConfiguration("term depends on more than nine variables");
    global[count] = g;
    return count++;
  }
};

std::array<J9, 3> point_jet(const Point3& p, const PointMap& m, LocalVars& lv) {
  std::array<J9, 3> out{J9(p.x()), J9(p.y()), J9(p.z())};
  for (int col = 0; col < 3; ++col) {
    if (m.vars[col] < 0) continue;
    const int s = lv.slot(m.vars[col]);
    for (int c = 0; c < 3; ++c) out[c].g[s] += m.jac(c, col);
  }
  return out;
}

std::array<double, 3> as_array(const Point3& p) { return {p.x(), p.y(), p.z()}; }

double unwrap_offset(double stored, double raw) {
  return kTwoPi * std::round((stored - raw) / kTwoPi);
}

template <class T>
T tangency(const std::array<T, 3>& p, const std::array<T, 3>& q) {
  return overtaking_angle(p[0], p[1], p[2], q[0], q[1], q[2]);
}

// Cone term value with its gradient and Hessian in the local variables
// (x, y, h, theta_a, theta_b).
struct ConeLocal {
  double value = 0.0;
  std::array<double, 5> g{};
  std::array<double, 25> h{};
};

ConeLocal cone_local(double x, double y, double h, double a, double b) {
  ConeLocal out;
  const auto scalar = [&](double t) { return cone_integrand(x, y, h, t); };
  const quad::AdaptiveResult res = quad::integrate(scalar, a, b, 2.0 * kConeQuadTol);
  out.value = 0.5 * res.value;

  const J4 X = J4::variable(x, 0), Y = J4::variable(y, 1), H = J4::variable(h, 2);
  const auto jet_integrand = [&](double t) { return cone_integrand(X, Y, H, J4(t)); };
  const J4 integral = quad::integrate_on<J4>(jet_integrand, res.panels);
  const J4 wa = cone_integrand(X, Y, H, J4::variable(a, 3));
  const J4 wb = cone_integrand(X, Y, H, J4::variable(b, 3));

  auto at = [&](int r, int c) -> double& { return out.h[r * 5 + c]; };
  for (int p = 0; p < 3; ++p) {
    out.g[p] = 0.5 * integral.g[p];
    for (int q = 0; q < 3; ++q) at(p, q) = 0.5 * integral.hess(p, q);
    at(3, p) = at(p, 3) = -0.5 * wa.g[p];
    at(4, p) = at(p, 4) = 0.5 * wb.g[p];
  }
  out.g[3] = -0.5 * wa.v;
  out.g[4] = 0.5 * wb.v;
  at(3, 3) = -0.5 * wa.g[3];
  at(4, 4) = 0.5 * wb.g[3];
  return out;
}

J9 compose(const ConeLocal& c, const std::array<J9, 5>& u) {
  J9 r(c.value);
  for (int a = 0; a < 5; ++a) {
    if (c.g[a] == 0.0) continue;
    for (int i = 0; i < 9; ++i) r.g[i] += c.g[a] * u[a].g[i];
    for (int i = 0; i < 81; ++i) r.h[i] += c.g[a] * u[a].h[i];
  }
  for (int a = 0; a < 5; ++a)
    for (int b = 0; b < 5; ++b) {
      const double w = c.h[a * 5 + b];
      if (w == 0.0) continue;
      for (int i = 0; i < 9; ++i)
        for (int k = 0; k < 9; ++k) r.h[i * 9 + k] += w * u[a].g[i] * u[b].g[k];
    }
  return r;
}

class Accumulator {
 public:
  Accumulator(int num_vars, DerivativeOrder order) : order_(order) {
    out_.gradient = Eigen::VectorXd::Zero(num_vars);
    out_.hessian.resize(num_vars, num_vars);
  }

  void add(const J9& term, const LocalVars& lv) {
    out_.value += term.v;
    for (int s = 0; s < lv.count; ++s) out_.gradient[lv.global[s]] += term.g[s];
    if (order_ != DerivativeOrder::Hessian) return;
    for (int s = 0; s < lv.count; ++s)
      for (int t = 0; t < lv.count; ++t) {
        const double v = term.h[s * 9 + t];
        if (v != 0.0) triplets_.emplace_back(lv.global[s], lv.global[t], v);
      }
  }

  ResistanceEval finish() {
    if (order_ == DerivativeOrder::Hessian)
      out_.hessian.setFromTriplets(triplets_.begin(), triplets_.end());
    return std::move(out_);
  }

 private:
  DerivativeOrder order_;
  ResistanceEval out_;
  std::vector<Triplet> triplets_;
};

}  // namespace

void ConeIntegralParams::validate() const {
  if (!(h > 0.0)) throw InvalidInput("cone apex height must be positive");
  if (!(mu >= 0.0 && mu < 1.0)) throw InvalidInput("cone offset mu must lie in [0, 1)");
  if (!(a <= b && b - a <= kTwoPi + 1e-12)) throw InvalidInput("cone arc must satisfy a <= b <= a + 2pi");
}

double facet_contribution(const Point3& a, const Point3& b, const Point3& c) {
  return facet_contribution(as_array(a), as_array(b), as_array(c));
}

double cone_contribution(double x, double y, double h, double a, double b) {
  if (!(b > a)) return 0.0;
  const auto f = [&](double t) { return cone_integrand(x, y, h, t); };
  return 0.5 * quad::integrate(f, a, b, 2.0 * kConeQuadTol).value;
}

double cone_contribution(const ConeIntegralParams& p) {
  p.validate();
  return cone_contribution(p.mu, 0.0, p.h, p.a, p.b);
}

double evaluate(const UpperBoundary& ub, std::span<const Point3> pts) {
  if (ub.empty()) return kPi;
  double total = 0.0;
  for (const auto& t : ub.triangles)
    total += facet_contribution(pts[t.v[0]], pts[t.v[1]], pts[t.v[2]]);
  for (const auto& b : ub.boundary)
    total += facet_contribution(pts[b.i], pts[b.j],
                                Point3{std::cos(b.theta), std::sin(b.theta), 0.0});
  for (const auto& c : ub.cones) {
    const Point3& p = pts[c.apex];
    total += cone_contribution(p.x(), p.y(), p.z(), c.theta_a, c.theta_b);
  }
  return total;
}

double evaluate(std::span<const Point3> pts) { return evaluate(build_upper_boundary(pts), pts); }

ResistanceEval evaluate_mapped(std::span<const Point3> pts, std::span<const PointMap> maps,
                               int num_vars, DerivativeOrder order) {
  const UpperBoundary ub = build_upper_boundary(pts);
  if (order == DerivativeOrder::Value) {
    ResistanceEval r;
    r.value = evaluate(ub, pts);
    return r;
  }
  Accumulator acc(num_vars, order);
  if (ub.empty()) {
    ResistanceEval r = acc.finish();
    r.value = kPi;
    return r;
  }

  for (const auto& t : ub.triangles) {
    LocalVars lv;
    const auto a = point_jet(pts[t.v[0]], maps[t.v[0]], lv);
    const auto b = point_jet(pts[t.v[1]], maps[t.v[1]], lv);
    const auto c = point_jet(pts[t.v[2]], maps[t.v[2]], lv);
    acc.add(facet_contribution(a, b, c), lv);
  }

  for (const auto& bt : ub.boundary) {
    LocalVars lv;
    const auto p = point_jet(pts[bt.i], maps[bt.i], lv);
    const auto q = point_jet(pts[bt.j], maps[bt.j], lv);
    J9 theta = tangency(p, q);
    theta.v += unwrap_offset(bt.theta, theta.v);
    const std::array<J9, 3> y{cos(theta), sin(theta), J9(0.0)};
    acc.add(facet_contribution(p, q, y), lv);
  }

  for (const auto& c : ub.cones) {
    LocalVars lv;
    const auto apex = point_jet(pts[c.apex], maps[c.apex], lv);
    J9 ta(c.theta_a), tb(c.theta_b);
    if (c.prev >= 0) {
      const auto prev = point_jet(pts[c.prev], maps[c.prev], lv);
      const auto next = point_jet(pts[c.next], maps[c.next], lv);
      ta = tangency(prev, apex);
      ta.v += unwrap_offset(c.theta_a, ta.v);
      tb = tangency(apex, next);
      tb.v += unwrap_offset(c.theta_b, tb.v);
    }
    const ConeLocal local = cone_local(apex[0].v, apex[1].v, apex[2].v, ta.v, tb.v);
    acc.add(compose(local, {apex[0], apex[1], apex[2], ta, tb}), lv);
  }
  return acc.finish();
}

std::vector<PointMap> identity_maps(int n) {
  std::vector<PointMap> maps(n);
  for (int i = 0; i < n; ++i) {
    maps[i].vars = {3 * i, 3 * i + 1, 3 * i + 2};
    maps[i].jac = Eigen::Matrix3d::Identity();
  }
  return maps;
}

ResistanceEval evaluate_with_gradient(std::span<const Point3> pts) {
  const int n = static_cast<int>(pts.size());
  return evaluate_mapped(pts, identity_maps(n), 3 * n, DerivativeOrder::Gradient);
}

Eigen::MatrixXd hessian(std::span<const Point3> pts) {
  const int n = static_cast<int>(pts.size());
  const ResistanceEval r = evaluate_mapped(pts, identity_maps(n), 3 * n, DerivativeOrder::Hessian);
  Eigen::MatrixXd h = Eigen::MatrixXd(r.hessian);
  return 0.5 * (h + h.transpose());
}

}  // namespace newton
