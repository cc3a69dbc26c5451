#pragma once

// Projected-gradient / regularized-Newton driver shared by the free and the
// restricted solvers. The problem supplies the objective, a basis of the
// inactive directions, the projection onto its closed constraints and the
// largest step that stays inside its open constraints.

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "newton/geometry.hpp"
#include "newton/resistance.hpp"

namespace newton {

struct OptimizerOptions {
  double grad_tol = 1e-9;
  int max_iter = 400;
  double newton_reg = 1e-6;
  double step_cap_fraction = 0.9;
  double armijo_c1 = 1e-4;
  double backtrack = 0.5;
  double refine_eps = 0.0;  // <= 0 selects 1e-3 * M
  std::uint64_t rng_seed = 1;

  void validate() const;
};

enum class Termination { Converged, MaxIter, Stall };

std::string to_string(Termination t);

/// Reproducibility record of one run (or of the best of several).
struct RunManifest {
  ProblemConfig config;
  OptimizerOptions options;
  std::string solver;
  int n = 0;  // free: sector points; restricted: n1
  int n2 = 0;
  int iterations = 0;
  std::vector<double> history;  // objective after each accepted step
  std::vector<int> restarts;    // history positions where hidden points were re-lifted
  double final_value = 0.0;
  double grad_norm = 0.0;
  double wall_seconds = 0.0;
  Termination termination = Termination::MaxIter;
  int seeds = 1;
  int rounds = 0;
  std::vector<std::uint64_t> seed_list;
  std::vector<double> seed_values;
};

class NewtonProblem {
 public:
  virtual ~NewtonProblem() = default;

  virtual int num_vars() const = 0;
  virtual ResistanceEval evaluate(const Eigen::VectorXd& x, DerivativeOrder order) const = 0;

  /// Orthonormal basis (num_vars x m) of the directions left free by the
  /// constraints active at x for gradient g.
  virtual Eigen::SparseMatrix<double> free_basis(const Eigen::VectorXd& x,
                                                 const Eigen::VectorXd& g) const = 0;

  /// Projection onto the closed constraints.
  virtual Eigen::VectorXd project(const Eigen::VectorXd& x) const { return x; }

  /// Largest t such that x + s p stays strictly feasible for s < t (may be inf).
  virtual double boundary_distance(const Eigen::VectorXd& x, const Eigen::VectorXd& p) const = 0;

  /// Hook after an accepted step; returns true when the variable layout
  /// changed in a way that should reset the regularization.
  virtual bool after_step(Eigen::VectorXd& /*x*/) const { return false; }
};

struct MinimizeResult {
  Eigen::VectorXd x;
  double value = 0.0;
  double grad_norm = 0.0;
  int iterations = 0;
  std::vector<double> history;
  Termination termination = Termination::MaxIter;
};

/// `reference`, when given, is a previously recorded value at x0 that the
/// first accepted step must not exceed.
MinimizeResult minimize(const NewtonProblem& problem, Eigen::VectorXd x0,
                        const OptimizerOptions& opts, std::optional<double> reference = {});

/// Largest t >= 0 with |(x, y) + t (dx, dy)| < 1 (infinity when the
/// direction vanishes).
double disc_exit(double x, double y, double dx, double dy);

/// Worker count from NEWTON_THREADS, defaulting to the logical core count.
int worker_count();

}  // namespace newton
