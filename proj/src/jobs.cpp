#include "newton/jobs.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <limits>

#include "newton/errors.hpp"
#include "newton/io.hpp"
#include "newton/mesh.hpp"
#include "newton/symmetry.hpp"

namespace newton {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::pair<JobMode, const char*> kModes[] = {
    {JobMode::Free, "free"},
    {JobMode::FreeNonsymmetric, "free-nonsymmetric"},
    {JobMode::Restricted, "restricted"},
    {JobMode::Sweep, "sweep"},
    {JobMode::Validate, "validate"},
    {JobMode::ExportMesh, "export-mesh"},
};

template <class T>
void take(const json& j, const char* name, T& out) {
  if (!j.contains(name)) return;
  try {
    out = j.at(name).get<T>();
  } catch (const json::exception&) {
    throw InvalidInput(std::string("field '") + name + "' has the wrong type");
  }
}

std::vector<std::uint64_t> seed_range(int seeds) {
  std::vector<std::uint64_t> s(seeds);
  std::iota(s.begin(), s.end(), std::uint64_t{1});
  return s;
}

void write_table(const fs::path& path, const std::vector<RunManifest>& ms) {
  std::ofstream out(path);
  io::emit_table(out, ms);
}

int exit_for(const RunManifest& m) {
  return m.termination == Termination::Stall ? kExitStall : kExitOk;
}

void report(std::ostream& log, const RunManifest& m) {
  log << m.solver << " M=" << m.config.M;
  if (m.config.k) log << " k=" << *m.config.k;
  log << " n=" << m.n;
  if (m.n2) log << " n2=" << m.n2;
  log << std::setprecision(13) << " value=" << m.final_value << std::setprecision(3)
      << " termination=" << to_string(m.termination) << " time=" << m.wall_seconds << "s\n"
      << std::setprecision(6);
}

int run_free(const JobSpec& spec, std::ostream& log, const fs::path& dir) {
  ProblemConfig config{spec.M, spec.k};
  if (spec.mode == JobMode::FreeNonsymmetric) config.k.reset();
  MultiStartSpec ms;
  ms.n = spec.n;
  ms.seeds = seed_range(spec.seeds);
  ms.rounds = spec.rounds;
  const FreeResult r = solve_free_multistart(ms, config, spec.options);
  io::write_json((dir / "manifest.json").string(), io::to_json(r.manifest));
  io::write_json((dir / "solution.json").string(),
                 io::free_solution(r.points, config, r.manifest.final_value));
  write_table(dir / "results.csv", {r.manifest});
  report(log, r.manifest);
  return exit_for(r.manifest);
}

int run_restricted(const JobSpec& spec, std::ostream& log, const fs::path& dir) {
  if (!spec.k) throw InvalidInput("field 'k' is required for restricted mode");
  const ProblemConfig config{spec.M, spec.k};
  const RestrictedPlan plan{spec.n1, spec.n2, 6};
  const RestrictedResult r = restricted_pipeline(config, spec.n, spec.seeds, spec.rounds, plan, spec.options);
  io::write_json((dir / "manifest.json").string(), io::to_json(r.manifest));
  io::write_json((dir / "solution.json").string(),
                 io::restricted_solution(r.vars, config, r.manifest.final_value));
  write_table(dir / "results.csv", {r.manifest});
  report(log, r.manifest);
  return exit_for(r.manifest);
}

int run_sweep(const JobSpec& spec, std::ostream& log, const fs::path& dir) {
  if (!spec.k) throw InvalidInput("field 'k' is required for sweep mode");
  const int count = static_cast<int>(std::floor((spec.M_to - spec.M_from) / spec.M_step + 1e-9)) + 1;
  std::vector<RunManifest> ms;
  int code = kExitOk;
  for (int i = 0; i < count; ++i) {
    const double M = std::round((spec.M_from + i * spec.M_step) * 1e12) / 1e12;
    const ProblemConfig config{M, spec.k};
    const RestrictedPlan plan{spec.n1, spec.n2, 6};
    const RestrictedResult r = restricted_pipeline(config, spec.n, spec.seeds, spec.rounds, plan, spec.options);
    std::ostringstream tag;
    tag << std::fixed << std::setprecision(4) << M;
    io::write_json((dir / ("manifest_M" + tag.str() + ".json")).string(), io::to_json(r.manifest));
    io::write_json((dir / ("solution_M" + tag.str() + ".json")).string(),
                   io::restricted_solution(r.vars, config, r.manifest.final_value));
    report(log, r.manifest);
    if (r.manifest.termination == Termination::Stall) code = kExitStall;
    ms.push_back(r.manifest);
    write_table(dir / "results.csv", ms);
  }
  return code;
}

int run_validate(const JobSpec& spec, std::ostream& log, const fs::path& dir) {
  const auto start = std::chrono::steady_clock::now();
  std::ofstream csv(dir / "flux.csv");
  csv << "seed,points,visible,residual\n" << std::setprecision(6);
  double worst = 0.0;
  int failures = 0;
  for (int s = 1; s <= spec.configs; ++s) {
    const auto pts = random_configuration(static_cast<std::uint64_t>(s), spec.max_points, spec.M);
    double residual;
    std::size_t visible = 0;
    try {
      const UpperBoundary ub = build_upper_boundary(pts);
      visible = ub.hull_points.size();
      residual = validate_decomposition(ub, pts).residual;
    } catch (const DegenerateConfiguration& e) {
      residual = std::numeric_limits<double>::infinity();
      log << "seed " << s << ": " << e.what() << '\n';
    }
    csv << s << ',' << pts.size() << ',' << visible << ',' << residual << '\n';
    worst = std::max(worst, std::fabs(residual));
    if (!(std::fabs(residual) <= 1e-9)) ++failures;
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  log << "validated " << spec.configs << " configurations, worst flux residual " << worst << ", "
      << failures << " failures, " << secs << "s\n";
  return failures ? kExitValidation : kExitOk;
}

int run_export(const JobSpec& spec, std::ostream& log, const fs::path& dir) {
  if (spec.input.empty()) throw InvalidInput("field 'input' is required for export-mesh mode");
  const json sol = io::read_json(spec.input);
  const auto pts = solution_points(sol);
  const Mesh mesh = build_mesh(pts, spec.mesh_resolution);
  if (mesh.degenerate) log << "warning: flat body, the mesh is two coincident discs\n";
  {
    std::ofstream ply(dir / "mesh.ply");
    write_ply(ply, mesh);
    std::ofstream obj(dir / "mesh.obj");
    write_obj(obj, mesh);
  }
  const MeshReport rep = inspect_mesh(mesh);
  log << "V=" << rep.vertices << " E=" << rep.edges << " F=" << rep.faces << " chi=" << rep.euler
      << (rep.watertight ? " watertight\n" : " NOT watertight\n");
  return rep.watertight && rep.euler == 2 ? kExitOk : kExitValidation;
}

}  // namespace

JobMode parse_mode(const std::string& s) {
  for (const auto& [m, name] : kModes)
    if (s == name) return m;
  if (s == "free-nonsym") return JobMode::FreeNonsymmetric;
  throw InvalidInput("field 'mode' has unknown value '" + s + "'");
}

std::string to_string(JobMode m) {
  for (const auto& [mode, name] : kModes)
    if (mode == m) return name;
  return "?";
}

void JobSpec::validate() const {
  if (!(M > 0.0)) throw InvalidInput("field 'M' must be positive");
  if (k && *k < 2) throw InvalidInput("field 'k' must be at least 2");
  if (n < 1) throw InvalidInput("field 'n' must be at least 1");
  if (n1 < 1) throw InvalidInput("field 'n1' must be at least 1");
  if (n2 < 0) throw InvalidInput("field 'n2' must be non-negative");
  if (seeds < 1) throw InvalidInput("field 'seeds' must be at least 1");
  if (rounds < 0) throw InvalidInput("field 'rounds' must be non-negative");
  if (!(options.grad_tol > 0.0)) throw InvalidInput("field 'grad_tol' must be positive");
  if (options.max_iter < 0) throw InvalidInput("field 'max_iter' must be non-negative");
  if (!(mesh_resolution > 0.0)) throw InvalidInput("field 'mesh_resolution' must be positive");
  if (mode == JobMode::Sweep) {
    if (!(M_from > 0.0)) throw InvalidInput("field 'M_from' must be positive");
    if (!(M_to >= M_from)) throw InvalidInput("field 'M_to' must not be below 'M_from'");
    if (!(M_step > 0.0)) throw InvalidInput("field 'M_step' must be positive");
  }
  if (mode == JobMode::Validate && (configs < 1 || max_points < 1))
    throw InvalidInput("field 'configs' and 'max_points' must be at least 1");
  if (out.empty()) throw InvalidInput("field 'out' must not be empty");
  options.validate();
}

JobSpec merge_job_spec(JobSpec s, const json& j) {
  if (!j.is_object()) throw InvalidInput("job spec must be a JSON object");
  if (j.contains("mode")) {
    std::string mode;
    take(j, "mode", mode);
    s.mode = parse_mode(mode);
  }
  take(j, "M", s.M);
  if (j.contains("k")) {
    if (j.at("k").is_null()) {
      s.k.reset();
    } else {
      int k = 0;
      take(j, "k", k);
      s.k = k;
    }
  }
  take(j, "n", s.n);
  take(j, "n1", s.n1);
  take(j, "n2", s.n2);
  take(j, "seeds", s.seeds);
  take(j, "rounds", s.rounds);
  take(j, "grad_tol", s.options.grad_tol);
  take(j, "max_iter", s.options.max_iter);
  take(j, "refine_eps", s.options.refine_eps);
  take(j, "M_from", s.M_from);
  take(j, "M_to", s.M_to);
  take(j, "M_step", s.M_step);
  take(j, "configs", s.configs);
  take(j, "max_points", s.max_points);
  take(j, "input", s.input);
  take(j, "mesh_resolution", s.mesh_resolution);
  take(j, "out", s.out);
  return s;
}

int run_job(const JobSpec& spec, std::ostream& log) {
  try {
    spec.validate();
  } catch (const InvalidInput& e) {
    log << "malformed job: " << e.what() << '\n';
    return kExitMalformed;
  }
  const fs::path dir(spec.out);
  fs::create_directories(dir);
  try {
    switch (spec.mode) {
      case JobMode::Free:
      case JobMode::FreeNonsymmetric:
        return run_free(spec, log, dir);
      case JobMode::Restricted:
        return run_restricted(spec, log, dir);
      case JobMode::Sweep:
        return run_sweep(spec, log, dir);
      case JobMode::Validate:
        return run_validate(spec, log, dir);
      case JobMode::ExportMesh:
        return run_export(spec, log, dir);
    }
  } catch (const InvalidInput& e) {
    log << "malformed job: " << e.what() << '\n';
    return kExitMalformed;
  }
  return kExitMalformed;
}

RestrictedResult restricted_pipeline(const ProblemConfig& config, int n, int seeds, int rounds,
                                     const RestrictedPlan& plan, const OptimizerOptions& opts) {
  const auto start = std::chrono::steady_clock::now();
  MultiStartSpec ms;
  ms.n = n;
  ms.seeds = seed_range(seeds);
  ms.rounds = rounds;
  const FreeResult free = solve_free_multistart(ms, config, opts);
  const RestrictedVars v0 = init_restricted_from_free(free.points, config);
  const RestrictedResult first = solve_restricted(v0, config, opts);
  RestrictedResult r = solve_restricted_refined(first.vars, config, opts, plan);
  if (first.manifest.final_value < r.manifest.final_value) r = first;
  r.manifest.seeds = seeds;
  r.manifest.seed_list = ms.seeds;
  r.manifest.seed_values = free.manifest.seed_values;
  r.manifest.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

std::vector<Point3> random_configuration(std::uint64_t seed, int max_points, double M) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> count(1, max_points);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int n = count(rng);
  std::vector<Point3> pts;
  for (int i = 0; i < n; ++i) {
    const double r = 0.95 * std::sqrt(u(rng));
    const double t = kTwoPi * u(rng);
    const double z = M * (1.0 - u(rng));  // in (0, M]
    pts.emplace_back(r * std::cos(t), r * std::sin(t), z);
  }
  return pts;
}

std::vector<Point3> solution_points(const json& solution, ProblemConfig* config_out) {
  std::string kind;
  take(solution, "kind", kind);
  if (!solution.contains("config")) throw InvalidInput("missing field 'config'");
  const ProblemConfig config = io::config_from_json(solution.at("config"));
  if (config_out) *config_out = config;
  std::vector<Point3> sector;
  if (kind == "free") {
    if (!solution.contains("points")) throw InvalidInput("missing field 'points'");
    sector = io::points_from_json(solution.at("points"));
  } else if (kind == "restricted") {
    if (!solution.contains("vars")) throw InvalidInput("missing field 'vars'");
    sector = assemble_points(io::restricted_from_json(solution.at("vars")), config);
  } else {
    throw InvalidInput("field 'kind' must be 'free' or 'restricted'");
  }
  if (!config.k) return sector;
  return orbit(sector, *config.k).points;
}

}  // namespace newton
