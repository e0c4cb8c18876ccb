#include "mprk/kernels.hpp"

namespace mprk::kernels {

namespace {

// Shared element formulas; both the serial and OpenMP loops call these so
// their results are bitwise identical.

inline double stage_element(std::size_t k, double yk, double dt, std::span<const StageRow> rows,
                            std::span<const std::uint8_t> part, std::span<const double* const> derivs,
                            std::span<const double> implicit_coeffs, std::span<const double* const> stiff) {
  const auto& coeffs = rows[part[k]].coeffs;
  double acc = 0.0;
  for (std::size_t j = 0; j < coeffs.size(); ++j) {
    if (coeffs[j] != 0.0) acc += coeffs[j] * derivs[j][k];
  }
  for (std::size_t j = 0; j < implicit_coeffs.size(); ++j) {
    if (implicit_coeffs[j] != 0.0) acc += implicit_coeffs[j] * stiff[j][k];
  }
  return yk + dt * acc;
}

inline double completion_element(std::size_t k, double yk, double dt, std::span<const double> weights,
                                 std::span<const double* const> derivs,
                                 std::span<const double* const> stiff) {
  double acc = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double rate = stiff.empty() ? derivs[i][k] : derivs[i][k] + stiff[i][k];
    acc += weights[i] * rate;
  }
  return yk + dt * acc;
}

inline double interface_flux(double q_left2, double q_left, double q_right) {
  // F[k+1/2] from q[k-1], q[k], q[k+1]
  return (2.0 * q_right + 5.0 * q_left - q_left2) / 6.0;
}

inline double upwind3_element(std::size_t k, std::size_t n, std::span<const double> u,
                              std::span<const double> speed, double dx) {
  auto q = [&](std::size_t i) { return speed[i] * u[i]; };
  const std::size_t km2 = (k + n - 2) % n;
  const std::size_t km1 = (k + n - 1) % n;
  const std::size_t kp1 = (k + 1) % n;
  const double right = interface_flux(q(km1), q(k), q(kp1));
  const double left = interface_flux(q(km2), q(km1), q(k));
  return -(right - left) / dx;
}

inline double diffusion_element(std::size_t k, std::size_t n, std::span<const double> u, double delta,
                                double dx) {
  const std::size_t km1 = (k + n - 1) % n;
  const std::size_t kp1 = (k + 1) % n;
  return delta * (u[km1] - 2.0 * u[k] + u[kp1]) / (dx * dx);
}

inline bool selected(std::span<const std::uint8_t> mask, std::size_t k) { return mask.empty() || mask[k]; }

}  // namespace

void stage_combine(std::span<const double> y, double dt, std::span<const StageRow> rows,
                   std::span<const std::uint8_t> part, std::span<const double* const> derivs,
                   std::span<const double> implicit_coeffs, std::span<const double* const> stiff,
                   std::span<double> out) {
  const long n = static_cast<long>(y.size());
#pragma omp parallel for schedule(static) if (y.size() >= kParallelThreshold)
  for (long k = 0; k < n; ++k) {
    const auto i = static_cast<std::size_t>(k);
    out[i] = stage_element(i, y[i], dt, rows, part, derivs, implicit_coeffs, stiff);
  }
}

void complete_step(std::span<const double> y, double dt, std::span<const double> weights,
                   std::span<const double* const> derivs, std::span<const double* const> stiff,
                   std::span<double> out) {
  const long n = static_cast<long>(y.size());
#pragma omp parallel for schedule(static) if (y.size() >= kParallelThreshold)
  for (long k = 0; k < n; ++k) {
    const auto i = static_cast<std::size_t>(k);
    out[i] = completion_element(i, y[i], dt, weights, derivs, stiff);
  }
}

void upwind3_flux_divergence(std::span<const double> u, std::span<const double> speed, double dx,
                             std::span<const std::uint8_t> mask, std::span<double> out) {
  const std::size_t n = u.size();
  const long nl = static_cast<long>(n);
#pragma omp parallel for schedule(static) if (n >= kParallelThreshold)
  for (long k = 0; k < nl; ++k) {
    const auto i = static_cast<std::size_t>(k);
    out[i] = selected(mask, i) ? upwind3_element(i, n, u, speed, dx) : 0.0;
  }
}

void central_diffusion(std::span<const double> u, double delta, double dx,
                       std::span<const std::uint8_t> mask, std::span<double> out) {
  const std::size_t n = u.size();
  const long nl = static_cast<long>(n);
#pragma omp parallel for schedule(static) if (n >= kParallelThreshold)
  for (long k = 0; k < nl; ++k) {
    const auto i = static_cast<std::size_t>(k);
    out[i] = selected(mask, i) ? diffusion_element(i, n, u, delta, dx) : 0.0;
  }
}

namespace serial {

void stage_combine(std::span<const double> y, double dt, std::span<const StageRow> rows,
                   std::span<const std::uint8_t> part, std::span<const double* const> derivs,
                   std::span<const double> implicit_coeffs, std::span<const double* const> stiff,
                   std::span<double> out) {
  for (std::size_t k = 0; k < y.size(); ++k) {
    out[k] = stage_element(k, y[k], dt, rows, part, derivs, implicit_coeffs, stiff);
  }
}

void complete_step(std::span<const double> y, double dt, std::span<const double> weights,
                   std::span<const double* const> derivs, std::span<const double* const> stiff,
                   std::span<double> out) {
  for (std::size_t k = 0; k < y.size(); ++k) {
    out[k] = completion_element(k, y[k], dt, weights, derivs, stiff);
  }
}

void upwind3_flux_divergence(std::span<const double> u, std::span<const double> speed, double dx,
                             std::span<const std::uint8_t> mask, std::span<double> out) {
  const std::size_t n = u.size();
  for (std::size_t k = 0; k < n; ++k) out[k] = selected(mask, k) ? upwind3_element(k, n, u, speed, dx) : 0.0;
}

void central_diffusion(std::span<const double> u, double delta, double dx,
                       std::span<const std::uint8_t> mask, std::span<double> out) {
  const std::size_t n = u.size();
  for (std::size_t k = 0; k < n; ++k) out[k] = selected(mask, k) ? diffusion_element(k, n, u, delta, dx) : 0.0;
}

}  // namespace serial

}  // namespace mprk::kernels
