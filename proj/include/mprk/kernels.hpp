#pragma once

// Data-parallel inner loops used by the stepper and the advection-diffusion
// operators. Each kernel has a serial reference in mprk::kernels::serial with
// identical per-element arithmetic, so the two paths agree bitwise; the
// OpenMP versions only engage above kParallelThreshold elements.

#include <cstddef>
#include <cstdint>
#include <span>

namespace mprk::kernels {

inline constexpr std::size_t kParallelThreshold = 4096;

/// Per-row stage coefficients for one explicit partition: coeffs[j] is the
/// coefficient applied to stage derivative j.
struct StageRow {
  std::span<const double> coeffs;
};

/// out[k] = y[k] + dt * (sum_j rows[part[k]].coeffs[j] * derivs[j][k]
///                       + sum_j implicit_coeffs[j] * stiff[j][k])
///
/// derivs and stiff hold pointers to stage vectors of length n; only the
/// first rows[..].coeffs.size() / implicit_coeffs.size() are read.
void stage_combine(std::span<const double> y, double dt, std::span<const StageRow> rows,
                   std::span<const std::uint8_t> part, std::span<const double* const> derivs,
                   std::span<const double> implicit_coeffs, std::span<const double* const> stiff,
                   std::span<double> out);

/// out[k] = y[k] + dt * sum_i weights[i] * (derivs[i][k] + stiff[i][k]);
/// stiff may be empty.
void complete_step(std::span<const double> y, double dt, std::span<const double> weights,
                   std::span<const double* const> derivs, std::span<const double* const> stiff,
                   std::span<double> out);

/// Third-order upwind-biased flux divergence for positive speed, periodic:
/// out[k] = -(F[k+1/2] - F[k-1/2]) / dx with
/// F[k+1/2] = (2 q[k+1] + 5 q[k] - q[k-1]) / 6 and q = speed * u.
/// Components with mask[k] == 0 are set to zero; an empty mask means all.
void upwind3_flux_divergence(std::span<const double> u, std::span<const double> speed, double dx,
                             std::span<const std::uint8_t> mask, std::span<double> out);

/// out[k] = delta * (u[k-1] - 2 u[k] + u[k+1]) / dx^2, periodic. Same mask rule.
void central_diffusion(std::span<const double> u, double delta, double dx,
                       std::span<const std::uint8_t> mask, std::span<double> out);

namespace serial {

void stage_combine(std::span<const double> y, double dt, std::span<const StageRow> rows,
                   std::span<const std::uint8_t> part, std::span<const double* const> derivs,
                   std::span<const double> implicit_coeffs, std::span<const double* const> stiff,
                   std::span<double> out);

void complete_step(std::span<const double> y, double dt, std::span<const double> weights,
                   std::span<const double* const> derivs, std::span<const double* const> stiff,
                   std::span<double> out);

void upwind3_flux_divergence(std::span<const double> u, std::span<const double> speed, double dx,
                             std::span<const std::uint8_t> mask, std::span<double> out);

void central_diffusion(std::span<const double> u, double delta, double dx,
                       std::span<const std::uint8_t> mask, std::span<double> out);

}  // namespace serial

}  // namespace mprk::kernels
