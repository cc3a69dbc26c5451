#include "newton/free_solver.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <thread>

#include "newton/errors.hpp"
#include "newton/symmetry.hpp"

namespace newton {

namespace {

constexpr double kActiveTol = 1e-10;
constexpr int kMaxRecycles = 8;

using Triplet = Eigen::Triplet<double>;

std::vector<Point3> unpack(const Eigen::VectorXd& x) {
  std::vector<Point3> pts(x.size() / 3);
  for (std::size_t i = 0; i < pts.size(); ++i) pts[i] = x.segment<3>(3 * i);
  return pts;
}

Eigen::VectorXd pack(std::span<const Point3> pts) {
  Eigen::VectorXd x(3 * pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) x.segment<3>(3 * i) = pts[i];
  return x;
}

class FreeProblem : public NewtonProblem {
 public:
  FreeProblem(int n, const ProblemConfig& cfg) : n_(n), cfg_(cfg) {
    if (cfg_.k) {
      c_ = std::cos(kPi / *cfg_.k);
      s_ = std::sin(kPi / *cfg_.k);
    }
  }

  int num_vars() const override { return 3 * n_; }

  ResistanceEval evaluate(const Eigen::VectorXd& x, DerivativeOrder order) const override {
    const std::vector<Point3> pts = unpack(x);
    if (cfg_.k) return evaluate_symmetric(pts, *cfg_.k, order);
    return evaluate_mapped(pts, identity_maps(n_), 3 * n_, order);
  }

  // Distances to the two wedge walls y >= 0 and s x - c y >= 0.
  std::array<double, 2> wall_distance(double x, double y) const { return {y, s_ * x - c_ * y}; }

  Eigen::SparseMatrix<double> free_basis(const Eigen::VectorXd& x,
                                         const Eigen::VectorXd& g) const override {
    std::vector<Triplet> t;
    int col = 0;
    for (int i = 0; i < n_; ++i) {
      const int r = 3 * i;
      if (!cfg_.k) {
        t.emplace_back(r, col++, 1.0);
        t.emplace_back(r + 1, col++, 1.0);
      } else {
        // A point on a wall keeps to it: its derivative across the wall is
        // structurally zero, so the gradient sign cannot tell whether
        // leaving pays off (see release_axis_points).
        const auto d = wall_distance(x[r], x[r + 1]);
        const bool on0 = d[0] <= kActiveTol, on1 = d[1] <= kActiveTol;
        if (on0 && on1) {
        } else if (on0) {
          t.emplace_back(r, col++, 1.0);
        } else if (on1) {
          t.emplace_back(r, col, c_);
          t.emplace_back(r + 1, col++, s_);
        } else {
          t.emplace_back(r, col++, 1.0);
          t.emplace_back(r + 1, col++, 1.0);
        }
      }
      const bool top = cfg_.M - x[r + 2] <= kActiveTol && g[r + 2] < 0.0;
      if (!top) t.emplace_back(r + 2, col++, 1.0);
    }
    Eigen::SparseMatrix<double> B(3 * n_, col);
    B.setFromTriplets(t.begin(), t.end());
    return B;
  }

  Eigen::VectorXd project(const Eigen::VectorXd& x) const override {
    Eigen::VectorXd y = x;
    for (int i = 0; i < n_; ++i) {
      const int r = 3 * i;
      y[r + 2] = std::min(y[r + 2], cfg_.M);
      if (cfg_.k) project_wedge(y[r], y[r + 1]);
    }
    return y;
  }

  double boundary_distance(const Eigen::VectorXd& x, const Eigen::VectorXd& p) const override {
    double t = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n_; ++i) {
      const int r = 3 * i;
      t = std::min(t, disc_exit(x[r], x[r + 1], p[r], p[r + 1]));
      if (p[r + 2] < 0.0) t = std::min(t, -x[r + 2] / p[r + 2]);
    }
    return t;
  }

 private:
  void project_wedge(double& x, double& y) const {
    const auto d = wall_distance(x, y);
    if (d[0] >= 0.0 && d[1] >= 0.0) return;
    // Nearest point on either boundary ray.
    const double t0 = std::max(0.0, x);
    const double t1 = std::max(0.0, c_ * x + s_ * y);
    const double e0 = (x - t0) * (x - t0) + y * y;
    const double e1 = std::pow(x - t1 * c_, 2) + std::pow(y - t1 * s_, 2);
    if (e0 <= e1) {
      x = t0;
      y = 0.0;
    } else {
      x = t1 * c_;
      y = t1 * s_;
    }
  }

  int n_;
  ProblemConfig cfg_;
  double c_ = 1.0, s_ = 0.0;
};

// Tries to move each wall point a little into the sector interior; returns
// true and updates pts when that lowers the objective.
bool release_axis_points(std::vector<Point3>& pts, const ProblemConfig& cfg, double& value) {
  if (!cfg.k) return false;
  const int k = *cfg.k;
  const double c = std::cos(kPi / k), s = std::sin(kPi / k);
  bool moved = false;
  for (auto& p : pts) {
    const AxisKind kind = axis_kind(p, k);
    if (kind == AxisKind::None || kind == AxisKind::Center) continue;
    const double r = std::hypot(p.x(), p.y());
    Eigen::Vector2d inward = kind == AxisKind::First ? Eigen::Vector2d(0.0, 1.0)
                                                     : Eigen::Vector2d(s, -c);
    for (double delta : {1e-3, 1e-4}) {
      const double step = delta * std::max(r, 1e-3);
      Point3 q = p;
      q.head<2>() += step * inward;
      if (q.head<2>().squaredNorm() >= 1.0) continue;
      std::vector<Point3> trial = pts;
      trial[&p - pts.data()] = q;
      double v;
      try {
        v = free_objective(trial, cfg);
      } catch (const std::runtime_error&) {
        continue;
      }
      if (v < value - 1e-13) {
        p = q;
        value = v;
        moved = true;
        break;
      }
    }
  }
  return moved;
}

struct Body {
  std::vector<Point3> points;
  std::vector<int> source;
  UpperBoundary ub;
};

Body make_body(std::span<const Point3> pts, const ProblemConfig& config) {
  Body b;
  if (config.k) {
    Orbit orb = orbit(pts, *config.k);
    b.points = std::move(orb.points);
    b.source = std::move(orb.source);
  } else {
    b.points.assign(pts.begin(), pts.end());
    b.source.resize(pts.size());
    std::iota(b.source.begin(), b.source.end(), 0);
  }
  b.ub = build_upper_boundary(b.points);
  return b;
}

// Hidden points carry no gradient; put them back just above the surface.
// Points whose lift would exceed M are dropped when `drop` is set and left
// alone otherwise. Returns the number of lifted points.
int lift_hidden(std::vector<Point3>& pts, const Body& body, double M, double eps, bool drop) {
  std::vector<char> visible(pts.size(), 0);
  for (int h : body.ub.hull_points) visible[body.source[h]] = 1;
  std::vector<Point3> out;
  int lifted = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    Point3 q = pts[i];
    if (!visible[i]) {
      const double z = surface_height(body.ub, body.points, q.x(), q.y()) + eps;
      if (z <= M) {
        q.z() = z;
        ++lifted;
      } else if (drop) {
        continue;
      }
    }
    out.push_back(q);
  }
  pts = std::move(out);
  return lifted;
}

}  // namespace

std::vector<Point3> init_points(int n, std::optional<int> k, double M, std::uint64_t seed) {
  if (n < 1) throw InvalidInput("n must be at least 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double wedge = k ? kPi / *k : kTwoPi;
  std::vector<Point3> pts;
  pts.reserve(n);
  for (int i = 0; i < n; ++i) {
    const double r = 0.9 * u(rng);
    const double phi = wedge * u(rng);
    const double z = M * (1.0 - r) * (0.5 + 0.5 * u(rng));
    pts.emplace_back(r * std::cos(phi), r * std::sin(phi), z);
  }
  return pts;
}

double free_objective(std::span<const Point3> pts, const ProblemConfig& config) {
  if (config.k) return evaluate_symmetric(pts, *config.k, DerivativeOrder::Value).value;
  return evaluate(pts);
}

FreeResult solve_free(std::span<const Point3> pts0, const ProblemConfig& config,
                      const OptimizerOptions& opts) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  const int n = static_cast<int>(pts0.size());
  FreeProblem problem(n, config);

  std::vector<Point3> pts(pts0.begin(), pts0.end());
  if (config.k)
    for (auto& p : pts) p = snap_to_axis(project_to_sector(p, *config.k, config.M), *config.k);

  FreeResult out;
  RunManifest& m = out.manifest;
  m.config = config;
  m.options = opts;
  m.solver = config.k ? "free" : "free-nonsymmetric";
  m.n = n;

  const double eps = opts.refine_eps > 0.0 ? opts.refine_eps : 1e-3 * config.M;
  int recycles = 0;
  Eigen::VectorXd x = pack(pts);
  Eigen::VectorXd best_x = x;
  double best_value = std::numeric_limits<double>::infinity();
  std::optional<double> reference;
  for (int cycle = 0;; ++cycle) {
    OptimizerOptions o = opts;
    o.max_iter = std::max(0, opts.max_iter - m.iterations);
    MinimizeResult r = minimize(problem, x, o, reference);
    reference.reset();
    m.iterations += r.iterations;
    m.history.insert(m.history.end(), r.history.begin(), r.history.end());
    m.final_value = r.value;
    m.grad_norm = r.grad_norm;
    m.termination = r.termination;
    x = r.x;
    if (r.termination != Termination::Converged || cycle >= 40) break;
    std::vector<Point3> cur = unpack(x);
    double v = r.value;
    if (r.value < best_value) {
      best_value = r.value;
      best_x = r.x;
    }
    if (release_axis_points(cur, config, v)) {
      m.history.push_back(v);
      reference = v;
      x = pack(cur);
      continue;
    }
    if (recycles >= kMaxRecycles) break;
    const Body bd = make_body(cur, config);
    if (lift_hidden(cur, bd, config.M, eps, false) == 0) break;
    ++recycles;
    m.restarts.push_back(static_cast<int>(m.history.size()));
    x = pack(cur);
  }
  if (m.final_value > best_value) {
    x = best_x;
    m.final_value = best_value;
  }
  out.points = unpack(x);
  m.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

FreeResult solve_free_nonsymmetric(std::span<const Point3> pts0, double M,
                                   const OptimizerOptions& opts) {
  return solve_free(pts0, ProblemConfig{M, std::nullopt}, opts);
}

std::vector<Point3> refine_free(std::span<const Point3> pts, const ProblemConfig& config,
                                double eps) {
  if (!(eps > 0.0)) throw InvalidInput("refine_eps must be positive");
  const Body bd = make_body(pts, config);
  const std::vector<Point3>& body = bd.points;
  const UpperBoundary& ub = bd.ub;
  std::vector<char> visible(pts.size(), 0);
  for (int h : ub.hull_points) visible[bd.source[h]] = 1;
  std::vector<Point3> out(pts.begin(), pts.end());
  lift_hidden(out, bd, config.M, eps, true);

  struct Candidate {
    Point3 centroid;
    double area;
  };
  std::vector<Candidate> cands;
  auto add = [&](const Point3& a, const Point3& b, const Point3& c) {
    cands.push_back({(a + b + c) / 3.0, 0.5 * (b - a).cross(c - a).norm()});
  };
  for (const auto& t : ub.triangles) add(body[t.v[0]], body[t.v[1]], body[t.v[2]]);
  for (const auto& b : ub.boundary)
    add(body[b.i], body[b.j], Point3(std::cos(b.theta), std::sin(b.theta), 0.0));
  if (cands.empty()) return out;

  std::vector<double> areas;
  for (const auto& c : cands) areas.push_back(c.area);
  std::nth_element(areas.begin(), areas.begin() + areas.size() / 2, areas.end());
  const double median = areas[areas.size() / 2];

  std::vector<Point3> inserted;
  auto insert = [&](Point3 q) {
    q.z() = surface_height(ub, body, q.x(), q.y()) + eps;
    if (q.z() > config.M) return;
    if (config.k) q = snap_to_axis(project_to_sector(q, *config.k, config.M), *config.k);
    for (const auto& p : out)
      if ((p - q).norm() < 1e-9) return;
    for (const auto& p : inserted)
      if ((p - q).norm() < 1e-9) return;
    inserted.push_back(q);
  };
  for (const auto& c : cands)
    if (c.area > median) insert(c.centroid);

  // Points on a symmetry axis can only be added on the axis itself: walk
  // each axis outwards and insert between neighbours and towards the rim.
  if (config.k) {
    const int k = *config.k;
    for (AxisKind kind : {AxisKind::First, AxisKind::Second}) {
      std::vector<Point3> ray;
      for (std::size_t i = 0; i < pts.size(); ++i)
        if (visible[i] && axis_kind(pts[i], k) == kind) ray.push_back(pts[i]);
      if (ray.empty()) continue;
      std::sort(ray.begin(), ray.end(), [](const Point3& a, const Point3& b) {
        return a.head<2>().squaredNorm() < b.head<2>().squaredNorm();
      });
      const Point3 rim(ray.back().head<2>().normalized().x(), ray.back().head<2>().normalized().y(),
                       0.0);
      ray.push_back(rim);
      for (std::size_t i = 0; i + 1 < ray.size(); ++i) insert(0.5 * (ray[i] + ray[i + 1]));
    }
  }
  out.insert(out.end(), inserted.begin(), inserted.end());
  return out;
}

FreeResult solve_free_multistart(const MultiStartSpec& spec, const ProblemConfig& config,
                                 const OptimizerOptions& opts) {
  if (spec.seeds.empty()) throw InvalidInput("at least one seed is required");
  const auto start = std::chrono::steady_clock::now();
  const double eps0 = opts.refine_eps > 0.0 ? opts.refine_eps : 1e-3 * config.M;

  std::vector<FreeResult> results(spec.seeds.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t s; (s = next++) < spec.seeds.size();) {
      OptimizerOptions o = opts;
      o.rng_seed = spec.seeds[s];
      const auto pts0 = init_points(spec.n, config.k, config.M, spec.seeds[s]);
      FreeResult best = solve_free(pts0, config, o);
      FreeResult cur = best;
      for (int round = 0; round < spec.rounds; ++round) {
        const double eps = eps0 * std::ldexp(1.0, -round);
        const auto refined = refine_free(cur.points, config, eps);
        cur = solve_free(refined, config, o);
        cur.manifest.rounds = round + 1;
        if (cur.manifest.final_value <= best.manifest.final_value) best = cur;
      }
      results[s] = std::move(best);
    }
  };
  const int nthreads = std::min<int>(worker_count(), static_cast<int>(spec.seeds.size()));
  std::vector<std::thread> pool;
  for (int t = 1; t < nthreads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::size_t best = 0;
  for (std::size_t s = 1; s < results.size(); ++s)
    if (results[s].manifest.final_value < results[best].manifest.final_value) best = s;
  FreeResult out = results[best];
  out.manifest.seeds = static_cast<int>(spec.seeds.size());
  out.manifest.rounds = spec.rounds;
  out.manifest.seed_list = spec.seeds;
  for (const auto& r : results) out.manifest.seed_values.push_back(r.manifest.final_value);
  out.manifest.options.rng_seed = spec.seeds[best];
  out.manifest.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

}  // namespace newton
