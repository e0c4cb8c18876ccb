#pragma once

#include "mprk/system.hpp"

#include <span>
#include <vector>

namespace mprk {

enum class JacobianMode {
  UserProvided,      ///< use SplitSystem::jacobian_g; falls back to differences if absent
  FiniteDifference,  ///< forward differences, step sqrt(eps) * (1 + |y_k|)
};

struct SolverConfig {
  double tolerance = 1e-10;  // on ||Y - coeff g(Y) - r||_inf, scaled by max(1, ||Y||_inf)
  int max_iterations = 50;
  JacobianMode jacobian = JacobianMode::UserProvided;
};

struct NewtonStats {
  long solves = 0;
  long iterations = 0;
  double last_residual = 0.0;
  double max_residual = 0.0;

  NewtonStats& operator+=(const NewtonStats& other);
};

struct StageSolution {
  std::vector<double> y;
  int iterations = 0;
  double residual = 0.0;
};

/// Solves Y - coeff * g(Y) = r by Newton's method with a dense LU factorisation
/// of I - coeff * dg/dy per iteration, starting from guess.
///
/// Throws NonConvergenceError after cfg.max_iterations and FactorizationError
/// when the iteration matrix is singular.
StageSolution solve_stage(const SplitSystem& sys, std::span<const double> r, double coeff,
                          std::span<const double> guess, const SolverConfig& cfg = {});

/// Forward-difference Jacobian of g.
void finite_difference_jacobian(const SplitSystem& sys, std::span<const double> y, Eigen::MatrixXd& jac);

}  // namespace mprk
