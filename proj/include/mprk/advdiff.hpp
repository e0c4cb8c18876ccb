#pragma once

// Periodic 1D advection-diffusion  u_t + (omega(x) u)_x = delta u_xx  on [0, 1),
// split as f = -(omega u)_x (explicit, multirate) and g = delta u_xx
// (implicit, single rate).

#include "mprk/stepper.hpp"
#include "mprk/system.hpp"

#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace mprk::advdiff {

/// Cells of width dx = 1/M with centres x_k = (k + 1/2) dx.
struct Grid1D {
  int cells = 81;

  explicit Grid1D(int m);

  double dx() const { return 1.0 / cells; }
  double length() const { return 1.0; }
  double x(int k) const { return (k + 0.5) * dx(); }
  std::vector<double> centers() const;
};

/// Piecewise-constant speed, raised by `ratio` on [fast_lo, fast_hi] with a
/// half-cosine ramp of ramp_cells cells on each side (outside the interval).
struct SpeedProfile {
  double omega_slow = 1.0;
  double ratio = 1.0;
  double fast_lo = 1.0 / 3.0;
  double fast_hi = 2.0 / 3.0;
  double ramp_cells = 4.0;

  void validate() const;
  double omega_fast() const { return omega_slow * ratio; }
  double operator()(double x, double dx) const;
  std::vector<double> sample(const Grid1D& grid) const;
};

/// Stencil reach of the upwind-biased flux divergence (u[k-2] .. u[k+1]).
inline constexpr std::size_t kStencilReach = 2;

/// -(F[k+1/2] - F[k-1/2]) / dx with F[k+1/2] = (2 q[k+1] + 5 q[k] - q[k-1]) / 6,
/// q = omega u.
std::vector<double> advective_rhs(std::span<const double> u, const Grid1D& grid, const SpeedProfile& profile);

/// delta (u[k-1] - 2 u[k] + u[k+1]) / dx^2.
std::vector<double> diffusive_rhs(std::span<const double> u, const Grid1D& grid, double delta);

/// Fast where the local CFL omega(x_k) dt / dx exceeds fast_cfl; Buffer within
/// kStencilReach cells of a Fast cell; Slow elsewhere.
PartitionMap build_partition(const Grid1D& grid, const SpeedProfile& profile, double dt, double fast_cfl = 1.0);

/// dx * sum_k u_k.
double discrete_mass(std::span<const double> u, double dx);
double mass_loss(std::span<const double> u0, std::span<const double> u1, double dx);

/// Advection as f, diffusion as g with its constant circulant Jacobian.
/// With explicit_diffusion set, diffusion is moved into f and g is absent.
class AdvectionDiffusionSystem final : public SplitSystem {
 public:
  AdvectionDiffusionSystem(Grid1D grid, const SpeedProfile& profile, double delta, bool explicit_diffusion = false);

  std::size_t dimension() const override { return static_cast<std::size_t>(grid_.cells); }
  void eval_f(std::span<const double> y, const Mask& mask, std::span<double> out) const override;
  void eval_g(std::span<const double> y, std::span<double> out) const override;
  bool has_g() const override { return !explicit_diffusion_ && delta_ != 0.0; }
  bool has_jacobian_g() const override { return true; }
  void jacobian_g(std::span<const double> y, Eigen::MatrixXd& jac) const override;
  std::string description() const override;

  const Grid1D& grid() const { return grid_; }
  std::span<const double> speed() const { return speed_; }
  double delta() const { return delta_; }

 private:
  Grid1D grid_;
  std::vector<double> speed_;
  double delta_;
  bool explicit_diffusion_;
};

enum class SchemeVariant { ExplicitMPRK, SingleRateIMEX, MultirateAStable, MultirateLStable };

std::string to_string(SchemeVariant v);
SchemeVariant parse_scheme_variant(const std::string& name);

struct InitialCondition {
  enum class Kind { Gaussian, Sine } kind = Kind::Gaussian;
  double center = 0.5;
  double width = 0.1;

  double operator()(double x) const;
  static InitialCondition parse(const std::string& spec);
  std::string to_string() const;
};

struct BenchmarkConfig {
  std::string name = "custom";
  int cells = 81;
  double dt = 0.0125;
  double t_final = 0.3;
  double delta = 0.05;
  int m = 2;
  int levels = 1;
  SchemeVariant scheme = SchemeVariant::MultirateAStable;
  /// Advective CFL omega_slow * dt / dx in the slow region.
  double slow_cfl = 1.01;
  double omega_ratio = 1.92 / 1.01;
  double fast_lo = 1.0 / 3.0;
  double fast_hi = 2.0 / 3.0;
  double ramp_cells = 4.0;
  InitialCondition ic;
  long snapshot_every = 0;

  void validate() const;
  Grid1D grid() const { return Grid1D(cells); }
  SpeedProfile profile() const;
  /// Cells whose CFL exceeds the slow-region CFL are Fast.
  double fast_cfl_threshold() const { return slow_cfl * (1.0 + 1e-9); }
};

/// Key-value text: "key = value" per line, '#' starts a comment. Keys: M, dt,
/// t_final, delta, m, levels, scheme, slow_cfl, omega_ratio, fast_interval
/// ("lo,hi"), ramp_cells, ic (gaussian[:center:width] | sine), snapshot_every.
BenchmarkConfig parse_config(std::istream& is);
BenchmarkConfig load_config(const std::string& path);
void write_config(std::ostream& os, const BenchmarkConfig& cfg);

MultirateScheme make_benchmark_scheme(const BenchmarkConfig& cfg);
std::unique_ptr<AdvectionDiffusionSystem> make_system(const BenchmarkConfig& cfg);
std::vector<double> initial_state(const BenchmarkConfig& cfg);

/// Partition used for a config: all Slow for the single-rate variant.
PartitionMap make_partition(const BenchmarkConfig& cfg);

}  // namespace mprk::advdiff
