#include "mprk/stage_solver.hpp"

#include "mprk/error.hpp"

#include <fmt/format.h>

#include <cmath>
#include <limits>

namespace mprk {

NewtonStats& NewtonStats::operator+=(const NewtonStats& other) {
  solves += other.solves;
  iterations += other.iterations;
  last_residual = other.last_residual;
  max_residual = std::max(max_residual, other.max_residual);
  return *this;
}

void finite_difference_jacobian(const SplitSystem& sys, std::span<const double> y, Eigen::MatrixXd& jac) {
  const std::size_t n = sys.dimension();
  const double root_eps = std::sqrt(std::numeric_limits<double>::epsilon());
  std::vector<double> base(n), shifted(n), probe(y.begin(), y.end());
  sys.eval_g(y, base);
  jac.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t k = 0; k < n; ++k) {
    const double h = root_eps * (1.0 + std::abs(y[k]));
    probe[k] = y[k] + h;
    sys.eval_g(probe, shifted);
    probe[k] = y[k];
    const double step = (y[k] + h) - y[k];
    for (std::size_t i = 0; i < n; ++i) {
      jac(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = (shifted[i] - base[i]) / step;
    }
  }
}

namespace {

double residual_norm(const SplitSystem& sys, std::span<const double> y, std::span<const double> r,
                     double coeff, std::vector<double>& g, std::vector<double>& res) {
  sys.eval_g(y, g);
  double norm = 0.0;
  for (std::size_t k = 0; k < y.size(); ++k) {
    res[k] = y[k] - coeff * g[k] - r[k];
    norm = std::max(norm, std::abs(res[k]));
  }
  if (std::isnan(norm)) return std::numeric_limits<double>::infinity();
  return norm;
}

double scale_of(std::span<const double> y) {
  double m = 1.0;
  for (double v : y) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace

StageSolution solve_stage(const SplitSystem& sys, std::span<const double> r, double coeff,
                          std::span<const double> guess, const SolverConfig& cfg) {
  if (cfg.tolerance <= 0.0) throw ArgumentError("solver tolerance must be positive");
  if (cfg.max_iterations < 1) throw ArgumentError("solver needs max_iterations >= 1");
  if (!std::isfinite(coeff)) throw ArgumentError("stage coefficient is not finite");
  const std::size_t n = sys.dimension();
  if (r.size() != n || guess.size() != n) throw ArgumentError("stage vectors do not match system size");

  StageSolution sol;
  sol.y.assign(guess.begin(), guess.end());
  if (coeff == 0.0 || !sys.has_g()) {
    sol.y.assign(r.begin(), r.end());
    return sol;
  }

  std::vector<double> g(n), res(n);
  const auto ni = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd jac(ni, ni);
  const bool analytic = cfg.jacobian == JacobianMode::UserProvided && sys.has_jacobian_g();

  sol.residual = residual_norm(sys, sol.y, r, coeff, g, res);
  while (sol.residual > cfg.tolerance * scale_of(sol.y)) {
    if (sol.iterations >= cfg.max_iterations) {
      throw NonConvergenceError(fmt::format("stage solve did not converge in {} iterations (residual {:.3e})",
                                            sol.iterations, sol.residual),
                                sol.residual, sol.iterations);
    }
    if (analytic) {
      sys.jacobian_g(sol.y, jac);
    } else {
      finite_difference_jacobian(sys, sol.y, jac);
    }
    Eigen::MatrixXd iteration = -coeff * jac;
    iteration.diagonal().array() += 1.0;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(iteration);
    if (!lu.isInvertible()) throw FactorizationError("stage iteration matrix I - coeff*J is singular");
    const Eigen::VectorXd update = lu.solve(Eigen::Map<const Eigen::VectorXd>(res.data(), ni));
    Eigen::Map<Eigen::VectorXd>(sol.y.data(), ni) -= update;
    ++sol.iterations;
    sol.residual = residual_norm(sys, sol.y, r, coeff, g, res);
    if (!std::isfinite(sol.residual)) {
      throw NonConvergenceError("stage solve produced a non-finite iterate", sol.residual, sol.iterations);
    }
  }
  return sol;
}

}  // namespace mprk
