#pragma once

// Test-only reference computations. These work from tableau coefficients and
// Eigen algebra alone and never call the stepper, so they can check it.

#include "mprk/stepper.hpp"
#include "mprk/tableau.hpp"

#include <Eigen/Dense>

#include <random>
#include <vector>

namespace mprk::oracle {

/// One-step matrix of a multirate scheme on f(y) = L y (component k advanced
/// with the fast coefficients when fast[k], slow otherwise) and g(y) = G y,
/// from the full stage system
///   (I - dt (A_F (x) P_F L + A_S (x) P_S L + A~ (x) G)) Y = 1 (x) y0,
///   y1 = y0 + dt (b^T (x) (L + G)) Y.
inline Eigen::MatrixXd one_step_matrix(const MultirateScheme& scheme, const Eigen::MatrixXd& L,
                                       const Eigen::MatrixXd& G, const std::vector<bool>& fast, double dt) {
  const Eigen::Index n = L.rows();
  const Eigen::Index s = scheme.stages();
  Eigen::MatrixXd pf = Eigen::MatrixXd::Zero(n, n), ps = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index k = 0; k < n; ++k) (fast[static_cast<std::size_t>(k)] ? pf : ps)(k, k) = 1.0;
  const Eigen::MatrixXd lf = pf * L, ls = ps * L;
  const bool use_g = scheme.implicit.has_value();
  const Eigen::MatrixXd stiff = use_g ? G : Eigen::MatrixXd::Zero(n, n);

  Eigen::MatrixXd K = Eigen::MatrixXd::Identity(s * n, s * n);
  for (Eigen::Index i = 0; i < s; ++i) {
    for (Eigen::Index j = 0; j < s; ++j) {
      Eigen::MatrixXd block = scheme.fast.a(i, j) * lf + scheme.slow.a(i, j) * ls;
      if (use_g) block += scheme.implicit->a_tilde(i, j) * stiff;
      K.block(i * n, j * n, n, n) -= dt * block;
    }
  }
  Eigen::MatrixXd rhs(s * n, n);
  for (Eigen::Index i = 0; i < s; ++i) rhs.block(i * n, 0, n, n) = Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd Y = K.partialPivLu().solve(rhs);

  Eigen::MatrixXd out = Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd total = L + stiff;
  for (Eigen::Index i = 0; i < s; ++i) out += dt * scheme.fast.b(i) * total * Y.block(i * n, 0, n, n);
  return out;
}

/// m steps of size h / m of an explicit RK method on y' = L y, computed
/// stage by stage.
inline Eigen::VectorXd explicit_rk_substeps(const Tableau& t, const Eigen::MatrixXd& L, Eigen::VectorXd y, double h,
                                            int m) {
  const double sub = h / m;
  const auto s = t.stages();
  for (int step = 0; step < m; ++step) {
    std::vector<Eigen::VectorXd> k(static_cast<std::size_t>(s));
    for (Eigen::Index i = 0; i < s; ++i) {
      Eigen::VectorXd stage = y;
      for (Eigen::Index j = 0; j < i; ++j) stage += sub * t.a(i, j) * k[static_cast<std::size_t>(j)];
      k[static_cast<std::size_t>(i)] = L * stage;
    }
    for (Eigen::Index i = 0; i < s; ++i) y += sub * t.b(i) * k[static_cast<std::size_t>(i)];
  }
  return y;
}

/// Columns are the stepper's images of the unit vectors.
template <class StepFn>
Eigen::MatrixXd matrix_of(Eigen::Index n, StepFn&& step_fn) {
  Eigen::MatrixXd out(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    std::vector<double> e(static_cast<std::size_t>(n), 0.0);
    e[static_cast<std::size_t>(k)] = 1.0;
    const std::vector<double> y = step_fn(e);
    for (Eigen::Index i = 0; i < n; ++i) out(i, k) = y[static_cast<std::size_t>(i)];
  }
  return out;
}

inline Eigen::MatrixXd random_matrix(std::mt19937_64& rng, Eigen::Index n, double scale) {
  std::uniform_real_distribution<double> dist(-scale, scale);
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = dist(rng);
  return m;
}

/// Random explicit tableau with c = row sums and weights summing to one.
inline Tableau random_explicit_tableau(std::mt19937_64& rng, Eigen::Index s) {
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(s, s);
  for (Eigen::Index i = 1; i < s; ++i)
    for (Eigen::Index j = 0; j < i; ++j) a(i, j) = dist(rng);
  Eigen::VectorXd b(s);
  for (Eigen::Index i = 0; i < s; ++i) b(i) = dist(rng) + 0.1;
  b /= b.sum();
  b(s - 1) = 1.0 - (b.sum() - b(s - 1));
  return Tableau::from_coefficients(a, b);
}

}  // namespace mprk::oracle
