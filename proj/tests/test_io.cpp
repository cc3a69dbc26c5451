#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "newton/errors.hpp"
#include "newton/io.hpp"
#include "newton/jobs.hpp"
#include "newton/symmetry.hpp"

using namespace newton;
namespace fs = std::filesystem;

namespace {

RunManifest sample_manifest() {
  RunManifest m;
  m.config = {0.7, 4};
  m.solver = "free";
  m.n = 17;
  m.iterations = 3;
  m.history = {1.6, 1.55, 1.5454863290500};
  m.restarts = {2};
  m.final_value = 1.5454863290500;
  m.grad_norm = 3.1e-10;
  m.wall_seconds = 0.125;
  m.termination = Termination::Converged;
  m.seeds = 2;
  m.rounds = 3;
  m.seed_list = {1, 2};
  m.seed_values = {1.5454863290500, 1.546};
  return m;
}

std::size_t count_lines(const std::string& s) { return std::count(s.begin(), s.end(), '\n'); }

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("newton_test_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("manifest round trip") {
  const RunManifest m = sample_manifest();
  const auto j = io::to_json(m);
  const RunManifest back = io::manifest_from_json(nlohmann::json::parse(j.dump()));
  CHECK(back.config.M == m.config.M);
  CHECK(back.config.k == m.config.k);
  CHECK(back.solver == m.solver);
  CHECK(back.history == m.history);
  CHECK(back.restarts == m.restarts);
  CHECK(back.final_value == m.final_value);
  CHECK(back.termination == m.termination);
  CHECK(back.seed_list == m.seed_list);
  CHECK(back.seed_values == m.seed_values);
  CHECK(back.options.grad_tol == m.options.grad_tol);

  RunManifest plain = m;
  plain.config.k.reset();
  CHECK(io::to_json(plain)["config"]["k"].is_null());
  CHECK_FALSE(io::manifest_from_json(io::to_json(plain)).config.k.has_value());

  auto broken = j;
  broken["config"]["M"] = "high";
  CHECK_THROWS_WITH_AS(io::manifest_from_json(broken), doctest::Contains("M"), InvalidInput);
}

TEST_CASE("solution files reproduce the objective") {
  const ProblemConfig config{0.9, 3};
  const auto pts = random_configuration(7, 12, 0.9);
  std::vector<Point3> sector;
  for (const auto& p : pts) sector.push_back(project_to_sector(p, 3, 0.9));
  const double f = evaluate(orbit(sector, 3).points);
  const auto j = nlohmann::json::parse(io::free_solution(sector, config, f).dump());
  ProblemConfig read;
  const auto full = solution_points(j, &read);
  CHECK(read.k == 3);
  CHECK(std::fabs(evaluate(full) - f) <= 1e-12);
  CHECK(j["objective"].get<double>() == f);

  RestrictedVars v;
  v.z = 0.3;
  v.Y = {{0.45, 0.76}, {0.7, 0.46}};
  v.X = {{-0.2397, 0.4388, 0.74}, {-0.4235, 0.6190, 0.45}};
  const double g = evaluate_restricted(v, config, DerivativeOrder::Value).value;
  const auto jr = nlohmann::json::parse(io::restricted_solution(v, config, g).dump());
  CHECK(std::fabs(evaluate(solution_points(jr)) - g) <= 1e-12);
  const RestrictedVars w = io::restricted_from_json(jr["vars"]);
  CHECK(w.Y == v.Y);
  CHECK(w.X == v.X);
}

TEST_CASE("result tables") {
  std::ostringstream empty;
  io::emit_table(empty, {});
  CHECK(empty.str() == "solver,M,k,n,n2,objective,runtime_s,seeds,rounds\n");

  const std::vector<RunManifest> one{sample_manifest()};
  std::ostringstream os;
  io::emit_table(os, one);
  CHECK(count_lines(os.str()) == 2);
  CHECK(os.str().find("\nfree,0.7,4,17,0,1.54548632905,0.125,2,3\n") != std::string::npos);

  std::ostringstream hist;
  io::emit_history(hist, one[0]);
  CHECK(count_lines(hist.str()) == 4);
  CHECK(hist.str().rfind("iter,value\n0,1.6\n", 0) == 0);
}

TEST_CASE("boundary dump tags every piece") {
  const auto pts = random_configuration(3, 10, 1.0);
  const auto ub = build_upper_boundary(pts);
  const auto j = io::boundary_to_json(ub);
  std::size_t tri = 0, bnd = 0, cone = 0;
  for (const auto& f : j["facets"]) {
    const auto t = f["type"].get<std::string>();
    tri += t == "triangle";
    bnd += t == "boundary";
    cone += t == "cone";
  }
  CHECK(tri == ub.triangles.size());
  CHECK(bnd == ub.boundary.size());
  CHECK(cone == ub.cones.size());
}

TEST_CASE("job specs") {
  JobSpec s = merge_job_spec({}, nlohmann::json::parse(R"({"mode": "restricted", "M": 1.5, "k": 2, "n2": 40})"));
  CHECK(s.mode == JobMode::Restricted);
  CHECK(s.M == 1.5);
  CHECK(s.k == 2);
  CHECK(s.n2 == 40);
  CHECK(s.seeds == 5);
  CHECK_FALSE(merge_job_spec(s, nlohmann::json::parse(R"({"k": null})")).k.has_value());

  CHECK_THROWS_WITH_AS(merge_job_spec({}, nlohmann::json::parse(R"({"seeds": "five"})")),
                       doctest::Contains("seeds"), InvalidInput);
  CHECK_THROWS_AS(merge_job_spec({}, nlohmann::json::parse(R"({"mode": "fast"})")), InvalidInput);

  JobSpec bad;
  bad.out = scratch("bad").string();
  bad.M = -1.0;
  std::ostringstream log;
  CHECK(run_job(bad, log) == kExitMalformed);
  CHECK(log.str().find("'M'") != std::string::npos);
}

TEST_CASE("validate and export jobs") {
  JobSpec v;
  v.mode = JobMode::Validate;
  v.configs = 10;
  v.max_points = 20;
  v.out = scratch("validate").string();
  std::ostringstream log;
  CHECK(run_job(v, log) == kExitOk);
  std::ifstream flux(fs::path(v.out) / "flux.csv");
  std::string line;
  int rows = -1;
  while (std::getline(flux, line)) ++rows;
  CHECK(rows == 10);

  const fs::path dir = scratch("export");
  fs::create_directories(dir);
  const std::vector<Point3> pts{{0.1, 0.2, 0.8}, {-0.3, 0.1, 0.6}};
  io::write_json((dir / "solution.json").string(), io::free_solution(pts, {1.0, std::nullopt}, evaluate(pts)));
  JobSpec e;
  e.mode = JobMode::ExportMesh;
  e.input = (dir / "solution.json").string();
  e.out = dir.string();
  CHECK(run_job(e, log) == kExitOk);
  CHECK(fs::exists(dir / "mesh.ply"));
  CHECK(fs::exists(dir / "mesh.obj"));

  e.input = (dir / "missing.json").string();
  CHECK(run_job(e, log) == kExitMalformed);
}
