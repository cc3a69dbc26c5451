// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "newton/free_solver.hpp"
#include "newton/jobs.hpp"
#include "newton/mesh.hpp"
#include "newton/restricted.hpp"
#include "newton/symmetry.hpp"
#include "oracles.hpp"

using namespace newton;

namespace {

int failures = 0;

void verdict(bool ok, const std::string& name, const std::string& detail) {
  std::printf("%s  %-22s %s\n", ok ? "PASS" : "FAIL", name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

Eigen::VectorXd flatten(std::span<const Point3> pts) {
  Eigen::VectorXd x(3 * pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) x.segment<3>(3 * i) = pts[i];
  return x;
}

std::vector<Point3> unflatten(const Eigen::VectorXd& x) {
  std::vector<Point3> pts(x.size() / 3);
  for (std::size_t i = 0; i < pts.size(); ++i) pts[i] = x.segment<3>(3 * i);
  return pts;
}

void analytic() {
  std::ostringstream d;
  bool ok = true;
  const std::vector<Point3> none;
  const double e0 = std::fabs(evaluate(none) - kPi);
  ok &= e0 <= 1e-12;
  double worst = 0.0;
  for (double M : {0.5, 0.7, 1.0, 1.5}) {
    const std::vector<Point3> apex{{0.0, 0.0, M}};
    worst = std::max(worst, std::fabs(evaluate(apex) - kPi / (1 + M * M)));
  }
  ok &= worst <= 1e-10;
  const double limit = kPi / 4 + 0.75 * kPi / 5;
  double prev = 1e9, err = 0.0;
  bool monotone = true;
  for (int n : {8, 16, 32, 64, 128, 256}) {
    std::vector<Point3> pts;
    for (int i = 0; i < n; ++i) {
      const double t = kTwoPi * (i + 0.5) / n;
      pts.emplace_back(0.5 * std::cos(t), 0.5 * std::sin(t), 1.0);
    }
    err = std::fabs(evaluate(pts) - limit);
    monotone &= err < prev;
    prev = err;
  }
  ok &= monotone && err <= 1e-3;
  d << "empty " << e0 << ", apex " << worst << ", frustum n=256 " << err << (monotone ? " monotone" : " NOT monotone");
  verdict(ok, "analytic-bodies", d.str());
}

void flux() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  int bad = 0;
  for (std::uint64_t s = 1; s <= 100; ++s) {
    const auto pts = random_configuration(s, 50, 1.0);
    double r;
    try {
      r = std::fabs(validate_decomposition(build_upper_boundary(pts), pts).residual);
    } catch (const std::exception&) {
      r = INFINITY;
    }
    worst = std::max(worst, r);
    bad += !(r <= 1e-9);
  }
  const double secs = seconds_since(t0);
  verdict(bad == 0 && secs < 30.0, "flux-identity",
          "100 configurations, worst residual " + fmt("%.2e", worst) + ", " + fmt("%.2fs", secs));
}

void oracle_order() {
  std::vector<int> ms;
  for (int m = 128; m <= 16384; m *= 2) ms.push_back(m);
  double min_order = 1e9, worst_final = 0.0;
  for (std::uint64_t s = 1; s <= 10; ++s) {
    const auto pts = random_configuration(s, 50, 1.0);
    const double f = evaluate(pts);
    // least-squares slope of log error against log m
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int m : ms) {
      const double e = std::fabs(f - oracle::mgon(pts, m));
      const double x = std::log(m), y = std::log(std::max(e, 1e-300));
      sx += x, sy += y, sxx += x * x, sxy += x * y;
      if (m == ms.back()) worst_final = std::max(worst_final, e);
    }
    const double n = ms.size();
    min_order = std::min(min_order, -(n * sxy - sx * sy) / (n * sxx - sx * sx));
  }
  verdict(min_order >= 1.9 && worst_final <= 1e-6, "oracle-equivalence",
          "min order " + fmt("%.3f", min_order) + ", worst error at m=16384 " + fmt("%.2e", worst_final));
}

void derivatives() {
  double worst_fd = 0.0, worst_sym = 0.0;
  for (std::uint64_t s = 1; s <= 100; ++s) {
    const auto pts = random_configuration(s, 20, 1.0);
    const auto ev = evaluate_with_gradient(pts);
    const auto fd = oracle::central_fd([](const Eigen::VectorXd& x) { return evaluate(unflatten(x)); },
                                       flatten(pts), 2e-5);
    worst_fd = std::max(worst_fd, (ev.gradient - fd).norm() / std::max(1e-8, fd.norm()));
    const Eigen::MatrixXd H = hessian(pts);
    worst_sym = std::max(worst_sym, (H - H.transpose()).norm() / std::max(1e-300, H.norm()));
  }
  verdict(worst_fd <= 1e-5 && worst_sym <= 1e-6, "derivatives",
          "100 configurations, gradient vs FD " + fmt("%.2e", worst_fd) + ", Hessian asymmetry " +
              fmt("%.2e", worst_sym));
}

struct FreeRow {
  double M;
  int k, n;
  double target;
};

std::map<std::pair<double, int>, FreeResult> table1() {
  const std::vector<FreeRow> rows{{0.7, 4, 17, 1.5456}, {0.9, 3, 25, 1.2622}, {1.0, 3, 34, 1.1379}, {1.5, 2, 29, 0.7001}};
  std::map<std::pair<double, int>, FreeResult> out;
  std::ostringstream d;
  bool ok = true;
  for (const auto& row : rows) {
    MultiStartSpec ms;
    ms.n = row.n;
    ms.seeds = {1, 2, 3, 4, 5};
    ms.rounds = 3;
    const auto t0 = std::chrono::steady_clock::now();
    FreeResult r = solve_free_multistart(ms, ProblemConfig{row.M, row.k}, {});
    const double secs = seconds_since(t0);
    const bool row_ok = r.manifest.final_value <= row.target && secs <= 300.0;
    ok &= row_ok;
    d << " M=" << row.M << ",k=" << row.k << ": " << fmt("%.7f", r.manifest.final_value) << " (<= " << row.target
      << ", " << fmt("%.0fs", secs) << ")" << (row_ok ? "" : " !");
    out[{row.M, row.k}] = std::move(r);
  }
  verdict(ok, "table1-free", d.str().substr(1));
  return out;
}

void table2() {
  struct Row {
    double M;
    int k, n;
    double target;
  };
  std::ostringstream d;
  bool ok = true;
  for (const Row& row : {Row{0.7, 4, 17, 1.545510}, Row{1.5, 2, 29, 0.699932}}) {
    const RestrictedPlan plan{1000, 300, 6};
    const auto t0 = std::chrono::steady_clock::now();
    const auto r = restricted_pipeline(ProblemConfig{row.M, row.k}, row.n, 5, 3, plan, {});
    const double secs = seconds_since(t0);
    const bool row_ok = r.manifest.final_value <= row.target && secs <= 600.0 && r.vars.Y.size() <= 1000 &&
                        r.vars.X.size() <= 300;
    ok &= row_ok;
    d << " M=" << row.M << ",k=" << row.k << ": " << fmt("%.7f", r.manifest.final_value) << " (<= " << row.target
      << ", n1=" << r.vars.Y.size() << ", n2=" << r.vars.X.size() << ", " << fmt("%.0fs", secs) << ")"
      << (row_ok ? "" : " !");
  }
  verdict(ok, "table2-restricted", d.str().substr(1));
}

void table3() {
  std::ostringstream d;
  bool ok = true;
  double at_one = INFINITY;
  for (auto [M, paper] : std::vector<std::pair<double, double>>{{0.95, 1.1979691}, {1.00, 1.1377293}, {1.10, 1.0277294}}) {
    const RestrictedPlan plan{1000, 300, 6};
    const auto r = restricted_pipeline(ProblemConfig{M, 3}, 34, 5, 3, plan, {});
    const bool row_ok = r.manifest.final_value <= paper + 1e-4;
    ok &= row_ok;
    if (M == 1.00) at_one = r.manifest.final_value;
    d << " M=" << M << ": " << fmt("%.7f", r.manifest.final_value) << (row_ok ? "" : " !");
  }
  ok &= at_one < 1.1401510;
  d << "; M=1 below the k=4 value 1.1401510: " << (at_one < 1.1401510 ? "yes" : "no");
  verdict(ok, "table3-spot-checks", d.str().substr(1));
}

// Sector points whose removal changes the body. Refinement leaves points
// a few 1e-9 above existing facets; the hull lists them as vertices but the
// objective does not notice them, so they are not counted.
std::vector<Point3> extremal_points(const FreeResult& r) {
  const ProblemConfig& config = r.manifest.config;
  const double f = free_objective(r.points, config);
  std::vector<Point3> out;
  for (std::size_t i = 0; i < r.points.size(); ++i) {
    std::vector<Point3> rest = r.points;
    rest.erase(rest.begin() + static_cast<long>(i));
    if (std::fabs(free_objective(rest, config) - f) > 1e-10) out.push_back(r.points[i]);
  }
  return out;
}

// Angular distance to the nearest symmetry axis; 0 for the centre.
double axis_distance(const Point3& p, int k) {
  if (p.head<2>().norm() < 1e-12) return 0.0;
  const double phi = std::atan2(p.y(), p.x());
  return std::min(std::fabs(phi), std::fabs(kPi / k - phi));
}

void structure(const std::map<std::pair<double, int>, FreeResult>& t1) {
  const auto a = extremal_points(t1.at({0.7, 4}));
  double off = 0.0;
  for (const auto& p : a) off = std::max(off, axis_distance(p, 4));
  const auto b = extremal_points(t1.at({1.5, 2}));
  int interior = 0;
  for (const auto& p : b) interior += axis_distance(p, 2) > 1e-6;
  verdict(off <= 1e-6 && interior >= 1, "structure",
          "M=0.7,k=4: max angle off an axis " + fmt("%.1e", off) + " over " + std::to_string(a.size()) +
              " extremal points; M=1.5,k=2: " + std::to_string(interior) + " interior of " +
              std::to_string(b.size()) + " extremal points");
}

// Reads back an ASCII PLY written by write_ply.
Mesh read_ply(const std::string& text) {
  std::istringstream in(text);
  std::string word, line;
  std::size_t nv = 0, nf = 0;
  while (std::getline(in, line) && line != "end_header") {
    std::istringstream ls(line);
    std::size_t count = 0;
    ls >> word;
    if (word == "element" && ls >> word >> count) (word == "vertex" ? nv : nf) = count;
  }
  Mesh m;
  m.vertices.resize(nv);
  m.faces.resize(nf);
  for (auto& v : m.vertices) in >> v.x() >> v.y() >> v.z();
  for (auto& f : m.faces) {
    int c;
    in >> c >> f[0] >> f[1] >> f[2];
  }
  return m;
}

void meshes(const std::map<std::pair<double, int>, FreeResult>& t1) {
  std::ostringstream d;
  bool ok = true;
  double worst = 0.0;
  for (const auto& [key, r] : t1) {
    const auto pts = orbit(r.points, key.second).points;
    std::ostringstream ply;
    write_ply(ply, build_mesh(pts, kTwoPi / 1024));
    const Mesh m = read_ply(ply.str());
    const MeshReport rep = inspect_mesh(m);
    double f = 0.0;
    for (const auto& t : m.faces) {
      const Point3 n = (m.vertices[t[1]] - m.vertices[t[0]]).cross(m.vertices[t[2]] - m.vertices[t[0]]);
      if (n.z() > 0.0) f += oracle::triangle_term(m.vertices[t[0]], m.vertices[t[1]], m.vertices[t[2]]);
    }
    const double err = std::fabs(f - r.manifest.final_value);
    worst = std::max(worst, err);
    ok &= rep.watertight && rep.euler == 2 && err <= 1e-4;
    d << " M=" << key.first << ",k=" << key.second << ": chi=" << rep.euler
      << (rep.watertight ? " watertight" : " OPEN") << ";";
  }
  d << " worst objective gap " << fmt("%.2e", worst);
  verdict(ok, "mesh-export", d.str().substr(1));
}

}  // namespace

int main() {
  const auto t0 = std::chrono::steady_clock::now();
  analytic();
  flux();
  oracle_order();
  derivatives();
  const auto t1 = table1();
  table2();
  table3();
  structure(t1);
  meshes(t1);
  std::printf("%d criteria failed, %.0fs total\n", failures, seconds_since(t0));
  return failures ? 1 : 0;
}
