#include "newton/restricted.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "newton/errors.hpp"
#include "newton/symmetry.hpp"

namespace newton {

namespace {

constexpr double kArcTol = 1e-6;
constexpr double kNudge = 1e-6;

const Eigen::Matrix3d& frame_rotation() {
  static const Eigen::Matrix3d r = (Eigen::Matrix3d() << 0, 1, 0, -1, 0, 0, 0, 0, 1).finished();
  return r;
}

std::vector<PointMap> restricted_maps(const RestrictedVars& v, const ProblemConfig& cfg,
                                      std::vector<Point3>& pts) {
  const int k = *cfg.k;
  const int n1 = static_cast<int>(v.Y.size());
  std::vector<PointMap> maps;
  pts.clear();

  PointMap top;
  top.vars = {0, -1, -1};
  top.jac(0, 0) = 1.0;
  pts.emplace_back(v.z, 0.0, cfg.M);
  maps.push_back(top);

  for (int i = 0; i < n1; ++i) {
    PointMap m;
    m.vars = {1 + 2 * i, 2 + 2 * i, -1};
    m.jac(0, 0) = 1.0;
    m.jac(2, 1) = 1.0;
    pts.emplace_back(v.Y[i].x(), 0.0, v.Y[i].y());
    maps.push_back(m);
  }

  const int base = 1 + 2 * n1;
  for (std::size_t j = 0; j < v.X.size(); ++j) {
    DihedralElement g;
    const Point3 q = project_to_sector(to_sector_frame(v.X[j]), k, std::numeric_limits<double>::max(), &g);
    PointMap m;
    const int b = base + 3 * static_cast<int>(j);
    m.vars = {b, b + 1, b + 2};
    m.jac = lift(g.matrix(k)) * frame_rotation();
    pts.push_back(q);
    maps.push_back(m);
  }
  return maps;
}

class RestrictedProblem : public NewtonProblem {
 public:
  RestrictedProblem(int n1, int n2, const ProblemConfig& cfg) : n1_(n1), n2_(n2), cfg_(cfg) {}

  int num_vars() const override { return 1 + 2 * n1_ + 3 * n2_; }

  ResistanceEval evaluate(const Eigen::VectorXd& x, DerivativeOrder order) const override {
    return evaluate_restricted(RestrictedVars::unpack(x, n1_, n2_), cfg_, order);
  }

  Eigen::SparseMatrix<double> free_basis(const Eigen::VectorXd& x,
                                         const Eigen::VectorXd&) const override {
    Eigen::SparseMatrix<double> I(x.size(), x.size());
    I.setIdentity();
    return I;
  }

  double boundary_distance(const Eigen::VectorXd& x, const Eigen::VectorXd& p) const override {
    double t = std::numeric_limits<double>::infinity();
    auto interval = [&](double v, double d, double lo, double hi) {
      if (d > 0.0) t = std::min(t, (hi - v) / d);
      if (d < 0.0) t = std::min(t, (lo - v) / d);
    };
    interval(x[0], p[0], 0.0, 1.0);
    for (int i = 0; i < n1_; ++i) {
      interval(x[1 + 2 * i], p[1 + 2 * i], 0.0, 1.0);
      interval(x[2 + 2 * i], p[2 + 2 * i], 0.0, cfg_.M);
    }
    const int base = 1 + 2 * n1_;
    for (int j = 0; j < n2_; ++j) {
      const int b = base + 3 * j;
      t = std::min(t, disc_exit(x[b], x[b + 1], p[b], p[b + 1]));
      interval(x[b + 2], p[b + 2], 0.0, cfg_.M);
    }
    return t;
  }

  bool after_step(Eigen::VectorXd& x) const override {
    std::vector<Eigen::Vector2d> y(n1_);
    for (int i = 0; i < n1_; ++i) y[i] = x.segment<2>(1 + 2 * i);
    if (std::is_sorted(y.begin(), y.end(), by_first)) return false;
    std::stable_sort(y.begin(), y.end(), by_first);
    for (int i = 0; i < n1_; ++i) x.segment<2>(1 + 2 * i) = y[i];
    return true;
  }

 private:
  static bool by_first(const Eigen::Vector2d& a, const Eigen::Vector2d& b) { return a.x() < b.x(); }

  int n1_, n2_;
  ProblemConfig cfg_;
};

void require_k(const ProblemConfig& cfg) {
  cfg.validate();
  if (!cfg.k) throw InvalidInput("the restricted problem needs a symmetry order k");
}

}  // namespace

Eigen::VectorXd RestrictedVars::pack() const {
  Eigen::VectorXd x(num_vars());
  x[0] = z;
  for (std::size_t i = 0; i < Y.size(); ++i) x.segment<2>(1 + 2 * i) = Y[i];
  const std::size_t base = 1 + 2 * Y.size();
  for (std::size_t j = 0; j < X.size(); ++j) x.segment<3>(base + 3 * j) = X[j];
  return x;
}

RestrictedVars RestrictedVars::unpack(const Eigen::VectorXd& x, int n1, int n2) {
  RestrictedVars v;
  v.z = x[0];
  v.Y.resize(n1);
  for (int i = 0; i < n1; ++i) v.Y[i] = x.segment<2>(1 + 2 * i);
  v.X.resize(n2);
  for (int j = 0; j < n2; ++j) v.X[j] = x.segment<3>(1 + 2 * n1 + 3 * j);
  return v;
}

void RestrictedVars::validate(double M) const {
  if (!(z > 0.0 && z < 1.0)) throw InvalidInput("z must lie in (0, 1)");
  for (const auto& y : Y)
    if (!(y.x() > 0.0 && y.x() < 1.0 && y.y() > 0.0 && y.y() < M))
      throw InvalidInput("Y points must lie in (0, 1) x (0, M)");
  for (const auto& p : X)
    if (!(p.head<2>().squaredNorm() < 1.0 && p.z() > 0.0 && p.z() < M))
      throw InvalidInput("X points must lie in the open cylinder of height M");
}

Point3 to_sector_frame(const Eigen::Vector3d& p) { return frame_rotation() * p; }

Eigen::Vector3d from_sector_frame(const Point3& p) { return frame_rotation().transpose() * p; }

std::vector<Point3> assemble_points(const RestrictedVars& v, const ProblemConfig& config) {
  require_k(config);
  std::vector<Point3> pts;
  restricted_maps(v, config, pts);
  return pts;
}

ResistanceEval evaluate_restricted(const RestrictedVars& v, const ProblemConfig& config,
                                   DerivativeOrder order) {
  require_k(config);
  std::vector<Point3> sector;
  const std::vector<PointMap> maps = restricted_maps(v, config, sector);
  const Orbit orb = orbit(sector, *config.k);
  return evaluate_mapped(orb.points, orbit_maps(orb, maps, *config.k), v.num_vars(), order);
}

RestrictedResult solve_restricted(const RestrictedVars& v0, const ProblemConfig& config,
                                  const OptimizerOptions& opts) {
  require_k(config);
  v0.validate(config.M);
  const auto start = std::chrono::steady_clock::now();
  const int n1 = static_cast<int>(v0.Y.size()), n2 = static_cast<int>(v0.X.size());
  RestrictedProblem problem(n1, n2, config);

  RestrictedVars sorted = v0;
  std::stable_sort(sorted.Y.begin(), sorted.Y.end(),
                   [](const auto& a, const auto& b) { return a.x() < b.x(); });
  const MinimizeResult r = minimize(problem, sorted.pack(), opts);

  RestrictedResult out;
  out.vars = RestrictedVars::unpack(r.x, n1, n2);
  RunManifest& m = out.manifest;
  m.config = config;
  m.options = opts;
  m.solver = "restricted";
  m.n = n1;
  m.n2 = n2;
  m.iterations = r.iterations;
  m.history = r.history;
  m.final_value = r.value;
  m.grad_norm = r.grad_norm;
  m.termination = r.termination;
  m.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

RestrictedVars refine_Y(const RestrictedVars& v, double M, double eps) {
  RestrictedVars out = v;
  out.Y.clear();
  auto push = [&](double a, double b) {
    if (!(b < M)) throw InvalidLift("refined Y point reaches the top height; shrink eps");
    out.Y.emplace_back(a, b);
  };
  if (v.Y.empty()) {
    push(0.5 * (v.z + 1.0), 0.5 * M + eps);
    return out;
  }
  push(0.5 * (v.z + v.Y.front().x()), 0.5 * (M + v.Y.front().y()) + eps);
  for (std::size_t i = 0; i < v.Y.size(); ++i) {
    out.Y.push_back(v.Y[i]);
    if (i + 1 < v.Y.size())
      push(0.5 * (v.Y[i].x() + v.Y[i + 1].x()), 0.5 * (v.Y[i].y() + v.Y[i + 1].y()) + eps);
  }
  push(0.5 * (v.Y.back().x() + 1.0), 0.5 * v.Y.back().y() + eps);
  return out;
}

RestrictedVars refine_X(const RestrictedVars& v, double M, double eps) {
  if (v.X.empty()) throw InvalidInput("refine_X needs at least one X point");
  // Chain start: the point closest to the first arc (or its top endpoint).
  std::vector<Eigen::Vector3d> arc{Eigen::Vector3d(0.0, v.z, M)};
  for (const auto& y : v.Y) arc.emplace_back(0.0, y.x(), y.y());
  auto dist_to_arc = [&](const Eigen::Vector3d& p) {
    double d = std::numeric_limits<double>::infinity();
    for (const auto& a : arc) d = std::min(d, (p - a).norm());
    return d;
  };
  std::vector<Eigen::Vector3d> rest = v.X;
  std::vector<Eigen::Vector3d> chain;
  auto take = [&](std::size_t i) {
    chain.push_back(rest[i]);
    rest.erase(rest.begin() + static_cast<long>(i));
  };
  std::size_t first = 0;
  for (std::size_t i = 1; i < rest.size(); ++i)
    if (dist_to_arc(rest[i]) < dist_to_arc(rest[first])) first = i;
  take(first);
  while (!rest.empty()) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < rest.size(); ++i)
      if ((rest[i] - chain.back()).norm() < (rest[best] - chain.back()).norm()) best = i;
    take(best);
  }

  RestrictedVars out = v;
  out.X.clear();
  for (std::size_t i = 0; i < chain.size(); ++i) {
    out.X.push_back(chain[i]);
    if (i + 1 == chain.size()) break;
    Eigen::Vector3d mid = 0.5 * (chain[i] + chain[i + 1]);
    mid.z() += eps;
    if (!(mid.z() < M)) throw InvalidLift("refined X point reaches the top height; shrink eps");
    out.X.push_back(mid);
  }
  return out;
}

RestrictedVars init_restricted_from_free(std::span<const Point3> pts, const ProblemConfig& config) {
  require_k(config);
  const int k = *config.k;
  const double M = config.M;
  const Orbit orb = orbit(pts, k);
  const UpperBoundary ub = build_upper_boundary(orb.points);
  std::vector<char> visible(pts.size(), 0);
  for (int h : ub.hull_points) visible[orb.source[h]] = 1;

  enum Where { Interior, First, Second };
  std::vector<Point3> vis;
  std::vector<Where> where;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (!visible[i]) continue;
    const Point3 p = project_to_sector(pts[i], k, M);
    const double r = std::hypot(p.x(), p.y());
    const double phi = std::atan2(p.y(), p.x());
    Where w = Interior;
    if (r < kArcTol || phi <= kArcTol) w = First;
    else if (std::fabs(phi - kPi / k) <= kArcTol) w = Second;
    vis.push_back(p);
    where.push_back(w);
  }

  // The arc holding the top-face corner becomes the first arc; a reflection
  // across phi = pi / 2k swaps the two sector walls when needed.
  auto corner_r = [&](Where w) {
    double best = -1.0;
    for (std::size_t i = 0; i < vis.size(); ++i)
      if (where[i] == w && vis[i].z() >= M - kArcTol) best = std::max(best, std::hypot(vis[i].x(), vis[i].y()));
    return best;
  };
  auto count = [&](Where w) { return std::count(where.begin(), where.end(), w); };
  const double c1 = corner_r(First), c2 = corner_r(Second);
  const bool swap = c2 > c1 || (c1 < 0.0 && c2 < 0.0 && count(Second) > count(First));
  if (swap) {
    const double a = kPi / k;
    const Eigen::Matrix2d refl = (Eigen::Matrix2d() << std::cos(a), std::sin(a), std::sin(a), -std::cos(a)).finished();
    for (std::size_t i = 0; i < vis.size(); ++i) {
      vis[i].head<2>() = refl * vis[i].head<2>();
      if (where[i] == First && std::hypot(vis[i].x(), vis[i].y()) >= kArcTol) where[i] = Second;
      else if (where[i] == Second) where[i] = First;
    }
  }
  if (count(First) == 0) throw EmptyArc("no visible point lies on a symmetry axis");

  RestrictedVars v;
  double z = -1.0;
  for (std::size_t i = 0; i < vis.size(); ++i) {
    const Point3& p = vis[i];
    const double r = std::hypot(p.x(), p.y());
    if (where[i] == First) {
      if (p.z() >= M - kArcTol) {
        z = std::max(z, r);
      } else {
        v.Y.emplace_back(std::clamp(r, kNudge, 1.0 - kNudge), std::clamp(p.z(), kNudge, M - kNudge));
      }
    } else {
      Eigen::Vector3d q = from_sector_frame(p);
      q.z() = std::clamp(q.z(), kNudge, M - kNudge);
      v.X.push_back(q);
    }
  }
  std::sort(v.Y.begin(), v.Y.end(), [](const auto& a, const auto& b) { return a.x() < b.x(); });
  if (z < 0.0) z = v.Y.empty() ? 0.5 : 0.5 * v.Y.front().x();
  v.z = std::clamp(z, kNudge, 1.0 - kNudge);
  return v;
}

RestrictedResult solve_restricted_refined(const RestrictedVars& v0, const ProblemConfig& config,
                                          const OptimizerOptions& opts, const RestrictedPlan& plan) {
  const auto start = std::chrono::steady_clock::now();
  const double eps0 = opts.refine_eps > 0.0 ? opts.refine_eps : 1e-3 * config.M;
  RestrictedResult best = solve_restricted(v0, config, opts);
  int rounds = 0;
  for (int round = 0; round < plan.rounds; ++round) {
    const double eps = eps0 * std::ldexp(1.0, -round);
    RestrictedVars next = best.vars;
    // Y points pressed against the top height belong to the top face.
    std::erase_if(next.Y, [&](const Eigen::Vector2d& y) {
      if (y.y() + 2.0 * eps < config.M) return false;
      next.z = std::clamp(std::max(next.z, y.x()), kNudge, 1.0 - kNudge);
      return true;
    });
    bool grew = false;
    try {
      if (2 * static_cast<int>(next.Y.size()) + 1 <= plan.max_n1) {
        next = refine_Y(next, config.M, eps);
        grew = true;
      }
      if (!next.X.empty() && 2 * static_cast<int>(next.X.size()) - 1 <= plan.max_n2 &&
          next.X.size() > 1) {
        next = refine_X(next, config.M, eps);
        grew = true;
      }
    } catch (const InvalidLift&) {
      continue;
    }
    if (!grew) break;
    RestrictedResult r = solve_restricted(next, config, opts);
    ++rounds;
    if (r.manifest.final_value <= best.manifest.final_value) best = std::move(r);
  }
  best.manifest.rounds = rounds;
  best.manifest.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return best;
}

}  // namespace newton
