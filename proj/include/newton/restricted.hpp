#pragma once

// Two-arc parameterization. The first arc lies in the symmetry plane
// {x1 = 0} and ends at (0, z, M) on the top face; the second arc X is free.
// Coordinates are stored as in that description; assemble_points rotates
// them by -pi/2 about the vertical axis so the symmetry plane becomes the
// sector axis phi = 0:  (x1, x2, x3) -> (x2, -x1, x3).

#include <Eigen/Core>
#include <span>
#include <vector>

#include "newton/optimizer.hpp"

namespace newton {

struct RestrictedVars {
  double z = 0.5;
  std::vector<Eigen::Vector2d> Y;  // (Y_1, Y_2) <-> (0, Y_1, Y_2)
  std::vector<Eigen::Vector3d> X;

  int num_vars() const { return 1 + 2 * static_cast<int>(Y.size()) + 3 * static_cast<int>(X.size()); }
  Eigen::VectorXd pack() const;
  static RestrictedVars unpack(const Eigen::VectorXd& x, int n1, int n2);

  /// Throws InvalidInput unless every open bound holds strictly.
  void validate(double M) const;
};

/// Paper-frame point -> sector frame, before folding into the sector.
Point3 to_sector_frame(const Eigen::Vector3d& p);
/// Inverse of to_sector_frame.
Eigen::Vector3d from_sector_frame(const Point3& p);

/// Sector points (0, z, M), (0, Y_i1, Y_i2), X_j in the sector frame, in
/// that order. X points are folded into the sector.
std::vector<Point3> assemble_points(const RestrictedVars& v, const ProblemConfig& config);

/// Value and derivatives with respect to (z, Y, X) in pack() order.
ResistanceEval evaluate_restricted(const RestrictedVars& v, const ProblemConfig& config,
                                   DerivativeOrder order = DerivativeOrder::Gradient);

struct RestrictedResult {
  RestrictedVars vars;
  RunManifest manifest;
};

/// Regularized Newton over the open feasible set with capped steps.
RestrictedResult solve_restricted(const RestrictedVars& v0, const ProblemConfig& config,
                                  const OptimizerOptions& opts);

/// Inserts lifted interpolations between the top-face endpoint, the Y
/// points and the rim: n1 -> 2 n1 + 1. Throws InvalidLift when a lifted
/// height reaches M.
RestrictedVars refine_Y(const RestrictedVars& v, double M, double eps);

/// Orders X into a chain starting next to the first arc and inserts
/// vertically lifted midpoints: n2 -> 2 n2 - 1.
RestrictedVars refine_X(const RestrictedVars& v, double M, double eps);

/// Splits a converged free solution into the two arcs. Throws EmptyArc when
/// no visible point lies on a symmetry axis.
RestrictedVars init_restricted_from_free(std::span<const Point3> pts, const ProblemConfig& config);

struct RestrictedPlan {
  int max_n1 = 1000;
  int max_n2 = 300;
  int rounds = 6;
};

/// Solve, then alternate refinement and re-solving while the sizes allow.
/// Rounds that end worse than their start are discarded.
RestrictedResult solve_restricted_refined(const RestrictedVars& v0, const ProblemConfig& config,
                                          const OptimizerOptions& opts, const RestrictedPlan& plan);

}  // namespace newton
