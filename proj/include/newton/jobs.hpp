#pragma once

// Job descriptions shared by the command-line tool and the acceptance
// harness. A JobSpec is read from JSON; every field may be overridden.
//
//   {
//     "mode": "free" | "free-nonsymmetric" | "restricted" | "sweep" | "validate" | "export-mesh",
//     "M": 0.7, "k": 4,                 // k omitted or null: no symmetry
//     "n": 17,                          // free: points per start; restricted: free warm start size
//     "n1": 1000, "n2": 300,            // restricted: size caps
//     "seeds": 5, "rounds": 3,
//     "grad_tol": 1e-9, "max_iter": 400,
//     "M_from": 0.9, "M_to": 1.1, "M_step": 0.01,   // sweep
//     "configs": 100, "max_points": 50,            // validate
//     "input": "solution.json",                    // export-mesh
//     "mesh_resolution": 0.0981747704,             // radians per cone step
//     "out": "out"
//   }

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "newton/free_solver.hpp"
#include "newton/restricted.hpp"

namespace newton {

enum class JobMode { Free, FreeNonsymmetric, Restricted, Sweep, Validate, ExportMesh };

JobMode parse_mode(const std::string& s);
std::string to_string(JobMode m);

struct JobSpec {
  JobMode mode = JobMode::Free;
  double M = 1.0;
  std::optional<int> k;
  int n = 20;
  int n1 = 1000;
  int n2 = 300;
  int seeds = 5;
  int rounds = 3;
  OptimizerOptions options;
  double M_from = 0.9;
  double M_to = 1.1;
  double M_step = 0.01;
  int configs = 100;
  int max_points = 50;
  std::string input;
  double mesh_resolution = kTwoPi / 64;
  std::string out = "out";

  /// Throws InvalidInput naming the offending field.
  void validate() const;
};

/// Fields present in `j` replace those of `base`.
JobSpec merge_job_spec(JobSpec base, const nlohmann::json& j);

enum ExitCode { kExitOk = 0, kExitMalformed = 1, kExitStall = 2, kExitValidation = 3 };

/// Runs the job, writes its artifacts under spec.out and returns the exit code.
/// Progress and diagnostics go to `log`.
int run_job(const JobSpec& spec, std::ostream& log);

/// Free multi-start, split into arcs, restricted solve with refinement.
RestrictedResult restricted_pipeline(const ProblemConfig& config, int n, int seeds, int rounds,
                                     const RestrictedPlan& plan, const OptimizerOptions& opts);

/// Random valid point set: 1..max_points points with r < 0.95 and heights in (0, M].
std::vector<Point3> random_configuration(std::uint64_t seed, int max_points, double M);

/// Full point set of a saved solution (orbit expanded when k is set).
std::vector<Point3> solution_points(const nlohmann::json& solution, ProblemConfig* config = nullptr);

}  // namespace newton
