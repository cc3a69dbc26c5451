#include "newton/io.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>

#include "newton/errors.hpp"

namespace newton::io {

namespace {

std::string fmt13(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.13g", v);
  return buf;
}

json vec3(const Point3& p) { return json::array({p.x(), p.y(), p.z()}); }

template <class T>
T field(const json& j, const char* name) {
  if (!j.contains(name)) throw InvalidInput(std::string("missing field '") + name + "'");
  try {
    return j.at(name).get<T>();
  } catch (const json::exception&) {
    throw InvalidInput(std::string("field '") + name + "' has the wrong type");
  }
}

template <class T>
void optional_field(const json& j, const char* name, T& out) {
  if (!j.contains(name)) return;
  try {
    out = j.at(name).get<T>();
  } catch (const json::exception&) {
    throw InvalidInput(std::string("field '") + name + "' has the wrong type");
  }
}

Termination termination_from_string(const std::string& s) {
  if (s == "converged") return Termination::Converged;
  if (s == "max_iter") return Termination::MaxIter;
  if (s == "stall") return Termination::Stall;
  throw InvalidInput("unknown termination '" + s + "'");
}

}  // namespace

json to_json(const ProblemConfig& c) {
  json j{{"M", c.M}};
  j["k"] = c.k ? json(*c.k) : json(nullptr);
  return j;
}

json to_json(const OptimizerOptions& o) {
  return {{"grad_tol", o.grad_tol},     {"max_iter", o.max_iter},
          {"newton_reg", o.newton_reg}, {"step_cap_fraction", o.step_cap_fraction},
          {"armijo_c1", o.armijo_c1},   {"backtrack", o.backtrack},
          {"refine_eps", o.refine_eps}, {"rng_seed", o.rng_seed}};
}

json to_json(const RunManifest& m) {
  return {{"config", to_json(m.config)},
          {"options", to_json(m.options)},
          {"solver", m.solver},
          {"n", m.n},
          {"n2", m.n2},
          {"iterations", m.iterations},
          {"history", m.history},
          {"restarts", m.restarts},
          {"final_value", m.final_value},
          {"grad_norm", m.grad_norm},
          {"wall_seconds", m.wall_seconds},
          {"termination", to_string(m.termination)},
          {"seeds", m.seeds},
          {"rounds", m.rounds},
          {"seed_list", m.seed_list},
          {"seed_values", m.seed_values}};
}

json to_json(const RestrictedVars& v) {
  json Y = json::array(), X = json::array();
  for (const auto& y : v.Y) Y.push_back({y[0], y[1]});
  for (const auto& x : v.X) X.push_back({x[0], x[1], x[2]});
  return {{"z", v.z}, {"Y", Y}, {"X", X}};
}

json points_to_json(std::span<const Point3> pts) {
  json a = json::array();
  for (const auto& p : pts) a.push_back(vec3(p));
  return a;
}

ProblemConfig config_from_json(const json& j) {
  ProblemConfig c;
  c.M = field<double>(j, "M");
  if (j.contains("k") && !j.at("k").is_null()) c.k = field<int>(j, "k");
  c.validate();
  return c;
}

OptimizerOptions options_from_json(const json& j) {
  OptimizerOptions o;
  optional_field(j, "grad_tol", o.grad_tol);
  optional_field(j, "max_iter", o.max_iter);
  optional_field(j, "newton_reg", o.newton_reg);
  optional_field(j, "step_cap_fraction", o.step_cap_fraction);
  optional_field(j, "armijo_c1", o.armijo_c1);
  optional_field(j, "backtrack", o.backtrack);
  optional_field(j, "refine_eps", o.refine_eps);
  optional_field(j, "rng_seed", o.rng_seed);
  o.validate();
  return o;
}

RunManifest manifest_from_json(const json& j) {
  RunManifest m;
  m.config = config_from_json(field<json>(j, "config"));
  m.options = options_from_json(field<json>(j, "options"));
  m.solver = field<std::string>(j, "solver");
  m.n = field<int>(j, "n");
  optional_field(j, "n2", m.n2);
  optional_field(j, "iterations", m.iterations);
  optional_field(j, "history", m.history);
  optional_field(j, "restarts", m.restarts);
  m.final_value = field<double>(j, "final_value");
  optional_field(j, "grad_norm", m.grad_norm);
  optional_field(j, "wall_seconds", m.wall_seconds);
  m.termination = termination_from_string(field<std::string>(j, "termination"));
  optional_field(j, "seeds", m.seeds);
  optional_field(j, "rounds", m.rounds);
  optional_field(j, "seed_list", m.seed_list);
  optional_field(j, "seed_values", m.seed_values);
  return m;
}

RestrictedVars restricted_from_json(const json& j) {
  RestrictedVars v;
  v.z = field<double>(j, "z");
  for (const auto& y : field<std::vector<std::array<double, 2>>>(j, "Y")) v.Y.emplace_back(y[0], y[1]);
  for (const auto& x : field<std::vector<std::array<double, 3>>>(j, "X")) v.X.emplace_back(x[0], x[1], x[2]);
  return v;
}

std::vector<Point3> points_from_json(const json& j) {
  std::vector<Point3> pts;
  try {
    for (const auto& p : j.get<std::vector<std::array<double, 3>>>()) pts.emplace_back(p[0], p[1], p[2]);
  } catch (const json::exception&) {
    throw InvalidInput("points must be an array of [x, y, z] triples");
  }
  return pts;
}

json free_solution(std::span<const Point3> pts, const ProblemConfig& config, double objective) {
  return {{"kind", "free"}, {"config", to_json(config)}, {"points", points_to_json(pts)},
          {"objective", objective}};
}

json restricted_solution(const RestrictedVars& v, const ProblemConfig& config, double objective) {
  return {{"kind", "restricted"}, {"config", to_json(config)}, {"vars", to_json(v)},
          {"objective", objective}};
}

json boundary_to_json(const UpperBoundary& ub) {
  json facets = json::array();
  for (const auto& t : ub.triangles) facets.push_back({{"type", "triangle"}, {"vertices", t.v}});
  for (const auto& b : ub.boundary)
    facets.push_back({{"type", "boundary"}, {"vertices", {b.i, b.j}}, {"theta", b.theta}});
  for (const auto& c : ub.cones)
    facets.push_back({{"type", "cone"},
                      {"apex", c.apex},
                      {"theta_a", c.theta_a},
                      {"theta_b", c.theta_b},
                      {"mu", c.mu},
                      {"phi", c.phi},
                      {"h", c.h}});
  return {{"hull_points", ub.hull_points}, {"facets", facets}};
}

void emit_table(std::ostream& os, std::span<const RunManifest> manifests) {
  os << "solver,M,k,n,n2,objective,runtime_s,seeds,rounds\n";
  for (const auto& m : manifests) {
    os << m.solver << ',' << fmt13(m.config.M) << ',';
    if (m.config.k) os << *m.config.k;
    os << ',' << m.n << ',' << m.n2 << ',' << fmt13(m.final_value) << ',' << fmt13(m.wall_seconds)
       << ',' << m.seeds << ',' << m.rounds << '\n';
  }
}

void emit_history(std::ostream& os, const RunManifest& m) {
  os << "iter,value\n";
  for (std::size_t i = 0; i < m.history.size(); ++i) os << i << ',' << fmt13(m.history[i]) << '\n';
}

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InvalidInput("'" + path + "' is not valid JSON: " + e.what());
  }
}

void write_json(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << j.dump(2) << '\n';
}

}  // namespace newton::io
