#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "newton/optimizer.hpp"

namespace newton {

/// Random start: radii uniform in [0, 0.9], azimuths uniform in [0, pi / k]
/// (or [0, 2 pi) without symmetry), heights M (1 - r) (0.5 + 0.5 u).
std::vector<Point3> init_points(int n, std::optional<int> k, double M, std::uint64_t seed);

struct FreeResult {
  std::vector<Point3> points;
  RunManifest manifest;
};

/// Minimizes f_k over sector points (config.k set) or f over points of the
/// cylinder (config.k empty), starting from pts0.
FreeResult solve_free(std::span<const Point3> pts0, const ProblemConfig& config,
                      const OptimizerOptions& opts);

/// solve_free with the symmetry dropped.
FreeResult solve_free_nonsymmetric(std::span<const Point3> pts0, double M,
                                   const OptimizerOptions& opts);

/// Inserts the centroids of the upper-boundary triangles larger than the
/// median, lifted vertically by eps. Lifted points above M are skipped.
std::vector<Point3> refine_free(std::span<const Point3> pts, const ProblemConfig& config,
                                double eps);

struct MultiStartSpec {
  int n = 10;
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  int rounds = 0;
};

/// Runs every seed (concurrently, see worker_count) with `rounds` refine and
/// re-solve cycles and returns the best final body.
FreeResult solve_free_multistart(const MultiStartSpec& spec, const ProblemConfig& config,
                                 const OptimizerOptions& opts);

/// Objective of a configuration in the given problem.
double free_objective(std::span<const Point3> pts, const ProblemConfig& config);

}  // namespace newton
