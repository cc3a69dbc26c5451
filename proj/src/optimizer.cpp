#include "newton/optimizer.hpp"

#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <thread>

#include "newton/errors.hpp"

namespace newton {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kMaxReg = 1e10;

struct Trial {
  bool ok = false;
  Eigen::VectorXd x;
  double value = 0.0;
};

// Backtracking Armijo search along x + t p (projected), t starting at t0.
Trial line_search(const NewtonProblem& problem, const Eigen::VectorXd& x, double f,
                  const Eigen::VectorXd& g, const Eigen::VectorXd& p, double t0,
                  const OptimizerOptions& opts, int max_halvings) {
  double t = t0;
  const double xnorm = 1.0 + x.norm();
  for (int it = 0; it <= max_halvings; ++it, t *= opts.backtrack) {
    if (t * p.norm() < 1e-16 * xnorm) break;
    Trial trial;
    trial.x = problem.project(x + t * p);
    const double decrease = g.dot(trial.x - x);
    if (!(decrease < 0.0)) continue;
    try {
      trial.value = problem.evaluate(trial.x, DerivativeOrder::Value).value;
    } catch (const std::runtime_error&) {
      continue;
    }
    if (std::isfinite(trial.value) && trial.value <= f + opts.armijo_c1 * decrease) {
      trial.ok = true;
      return trial;
    }
  }
  return {};
}

double capped_step(const NewtonProblem& problem, const Eigen::VectorXd& x,
                   const Eigen::VectorXd& p, const OptimizerOptions& opts) {
  const double dist = problem.boundary_distance(x, p);
  return std::min(1.0, opts.step_cap_fraction * dist);
}

}  // namespace

void OptimizerOptions::validate() const {
  if (!(grad_tol > 0.0)) throw InvalidInput("grad_tol must be positive");
  if (max_iter < 0) throw InvalidInput("max_iter must be non-negative");
  if (!(newton_reg > 0.0)) throw InvalidInput("newton_reg must be positive");
  if (!(step_cap_fraction > 0.0 && step_cap_fraction < 1.0))
    throw InvalidInput("step_cap_fraction must lie in (0, 1)");
  if (!(armijo_c1 > 0.0 && armijo_c1 < 1.0)) throw InvalidInput("armijo_c1 must lie in (0, 1)");
  if (!(backtrack > 0.0 && backtrack < 1.0)) throw InvalidInput("backtrack must lie in (0, 1)");
}

std::string to_string(Termination t) {
  switch (t) {
    case Termination::Converged:
      return "converged";
    case Termination::MaxIter:
      return "max_iter";
    case Termination::Stall:
      return "stall";
  }
  return "unknown";
}

double disc_exit(double x, double y, double dx, double dy) {
  const double a = dx * dx + dy * dy;
  if (a == 0.0) return kInf;
  const double b = x * dx + y * dy;
  const double c = x * x + y * y - 1.0;
  const double disc = std::max(0.0, b * b - a * c);
  // Positive root of a t^2 + 2 b t + c = 0, c < 0.
  const double q = -b - std::copysign(std::sqrt(disc), b);
  return q > 0.0 ? q / a : c / q;
}

int worker_count() {
  if (const char* env = std::getenv("NEWTON_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

MinimizeResult minimize(const NewtonProblem& problem, Eigen::VectorXd x0,
                        const OptimizerOptions& opts, std::optional<double> reference) {
  opts.validate();
  MinimizeResult res;
  res.x = problem.project(x0);
  double lambda = opts.newton_reg;

  for (;;) {
    const ResistanceEval ev = problem.evaluate(res.x, DerivativeOrder::Hessian);
    res.value = ev.value;
    // Armijo reference: the last accepted value, so that rounding differences
    // between evaluation paths cannot make the recorded sequence increase.
    const double f_ref = !res.history.empty() ? std::min(ev.value, res.history.back())
                         : reference              ? std::min(ev.value, *reference)
                                                  : ev.value;
    const Eigen::SparseMatrix<double> B = problem.free_basis(res.x, ev.gradient);
    const Eigen::VectorXd rg = B.transpose() * ev.gradient;
    res.grad_norm = rg.norm();
    if (res.grad_norm <= opts.grad_tol) {
      res.termination = Termination::Converged;
      break;
    }
    if (res.iterations >= opts.max_iter) {
      res.termination = Termination::MaxIter;
      break;
    }

    const Eigen::SparseMatrix<double> H = ev.hessian;
    Eigen::SparseMatrix<double> RH = B.transpose() * H * B;
    RH = 0.5 * (RH + Eigen::SparseMatrix<double>(RH.transpose()));
    Eigen::SparseMatrix<double> I(RH.rows(), RH.cols());
    I.setIdentity();

    Trial accepted;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
    ldlt.analyzePattern(RH + I);
    while (lambda <= kMaxReg) {
      ldlt.factorize(RH + lambda * I);
      if (ldlt.info() != Eigen::Success || (ldlt.vectorD().array() <= 0.0).any()) {
        lambda *= 10.0;
        continue;
      }
      const Eigen::VectorXd d = ldlt.solve(-rg);
      const Eigen::VectorXd p = B * d;
      if (!(ev.gradient.dot(p) < 0.0)) {
        lambda *= 10.0;
        continue;
      }
      accepted = line_search(problem, res.x, f_ref, ev.gradient, p,
                             capped_step(problem, res.x, p, opts), opts, 6);
      if (accepted.ok) break;
      lambda *= 10.0;
    }

    if (accepted.ok) {
      lambda = std::max(lambda * 0.5, 1e-14);
    } else {
      // Projected gradient fallback.
      const Eigen::VectorXd p = -(B * rg);
      const double t0 =
          std::min(1e3, opts.step_cap_fraction * problem.boundary_distance(res.x, p));
      accepted = line_search(problem, res.x, f_ref, ev.gradient, p, t0, opts, 200);
      lambda = opts.newton_reg;
      if (!accepted.ok) {
        res.termination = Termination::Stall;
        break;
      }
    }

    res.x = accepted.x;
    if (problem.after_step(res.x)) lambda = opts.newton_reg;
    res.history.push_back(accepted.value);
    ++res.iterations;
  }
  return res;
}

}  // namespace newton
