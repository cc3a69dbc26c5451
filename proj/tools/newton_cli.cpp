// newton-body: command-line driver for the least-resistance solvers.

#include <iostream>

#include "CLI11.hpp"
#include "newton/errors.hpp"
#include "newton/io.hpp"
#include "newton/jobs.hpp"

using namespace newton;

namespace {

struct Flags {
  double M = 0.0;
  int k = 0;
  int n = 0, n1 = 0, n2 = 0, seeds = 0, rounds = 0, max_iter = 0, configs = 0;
  double grad_tol = 0.0, mesh_resolution = 0.0, M_from = 0.0, M_to = 0.0, M_step = 0.0;
  std::string out, config, input;
};

void add_flags(CLI::App* sub, Flags& f) {
  sub->add_option("--M", f.M, "Body height");
  sub->add_option("--k", f.k, "Dihedral symmetry order (0 for none)");
  sub->add_option("--n", f.n, "Points per free start");
  sub->add_option("--n1", f.n1, "Cap on first-arc points");
  sub->add_option("--n2", f.n2, "Cap on second-arc points");
  sub->add_option("--seeds", f.seeds, "Number of seeded starts");
  sub->add_option("--rounds", f.rounds, "Refinement rounds");
  sub->add_option("--grad-tol", f.grad_tol, "Projected gradient tolerance");
  sub->add_option("--max-iter", f.max_iter, "Iteration limit per solve");
  sub->add_option("--out", f.out, "Output directory");
  sub->add_option("--mesh-resolution", f.mesh_resolution, "Cone tessellation step in radians");
  sub->add_option("--config", f.config, "JobSpec JSON file");
  sub->add_option("--input", f.input, "Solution JSON to mesh");
  sub->add_option("--M-from", f.M_from, "First sweep height");
  sub->add_option("--M-to", f.M_to, "Last sweep height");
  sub->add_option("--M-step", f.M_step, "Sweep increment");
  sub->add_option("--configs", f.configs, "Random configurations to validate");
}

// Flags given on the command line replace the config file's values.
nlohmann::json overrides(const CLI::App* sub, const Flags& f) {
  nlohmann::json j = nlohmann::json::object();
  auto given = [&](const char* name) { return sub->count(name) > 0; };
  if (given("--M")) j["M"] = f.M;
  if (given("--k")) j["k"] = f.k > 0 ? nlohmann::json(f.k) : nlohmann::json(nullptr);
  if (given("--n")) j["n"] = f.n;
  if (given("--n1")) j["n1"] = f.n1;
  if (given("--n2")) j["n2"] = f.n2;
  if (given("--seeds")) j["seeds"] = f.seeds;
  if (given("--rounds")) j["rounds"] = f.rounds;
  if (given("--grad-tol")) j["grad_tol"] = f.grad_tol;
  if (given("--max-iter")) j["max_iter"] = f.max_iter;
  if (given("--out")) j["out"] = f.out;
  if (given("--mesh-resolution")) j["mesh_resolution"] = f.mesh_resolution;
  if (given("--input")) j["input"] = f.input;
  if (given("--M-from")) j["M_from"] = f.M_from;
  if (given("--M-to")) j["M_to"] = f.M_to;
  if (given("--M-step")) j["M_step"] = f.M_step;
  if (given("--configs")) j["configs"] = f.configs;
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Newton's least-resistance problem via convex hulls"};
  app.require_subcommand(1);
  Flags flags;
  const std::pair<const char*, const char*> subs[] = {
      {"free", "Symmetric free problem, multi-start with refinement"},
      {"free-nonsym", "Free problem without symmetry"},
      {"restricted", "Two-arc problem warm-started from a free solution"},
      {"sweep", "Restricted problem over a range of heights"},
      {"validate", "Flux identity on random configurations"},
      {"export-mesh", "Triangle mesh (PLY and OBJ) of a saved solution"},
  };
  for (const auto& [name, help] : subs) add_flags(app.add_subcommand(name, help), flags);
  CLI11_PARSE(app, argc, argv);

  const CLI::App* sub = app.get_subcommands().front();
  try {
    JobSpec spec;
    spec.mode = parse_mode(sub->get_name());
    if (spec.mode == JobMode::Free || spec.mode == JobMode::Restricted || spec.mode == JobMode::Sweep)
      spec.k = 3;
    if (!flags.config.empty()) spec = merge_job_spec(spec, io::read_json(flags.config));
    spec = merge_job_spec(spec, overrides(sub, flags));
    spec.mode = parse_mode(sub->get_name());
    return run_job(spec, std::cerr);
  } catch (const InvalidInput& e) {
    std::cerr << "malformed job: " << e.what() << '\n';
    return kExitMalformed;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitMalformed;
  }
}
