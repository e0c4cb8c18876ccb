#pragma once

#include "mprk/tableau.hpp"

#include <complex>
#include <iosfwd>
#include <vector>

namespace mprk {

using Complex = std::complex<double>;

/// Scalar test problem y' = (lambda_fast + lambda_slow + lambda_stiff) y, each
/// term advanced by the fast, slow and implicit coefficients respectively.
struct ScalarModel {
  Complex lambda_fast;
  Complex lambda_slow;
  Complex lambda_stiff;
};

/// (2 + z) / (2 - z) for AStable2, 1 / (1 - z) for LStable1.
/// Throws DomainError at the pole.
Complex r_implicit_closed_form(ImplicitVariant variant, Complex z);

/// One step of the scheme from y0 = 1 on the scalar model with
/// z_f = dt*lambda_fast, z_s = dt*lambda_slow, z_i = dt*lambda_stiff.
/// Throws ArgumentError if z_i != 0 and the scheme has no augmentation, and
/// DomainError if the implicit stage is singular.
Complex r_numeric(const MultirateScheme& scheme, Complex z_f, Complex z_s, Complex z_i);

inline Complex r_numeric(const MultirateScheme& scheme, const ScalarModel& model, double dt) {
  return r_numeric(scheme, dt * model.lambda_fast, dt * model.lambda_slow, dt * model.lambda_stiff);
}

enum class ScanTarget { Fast, Slow, Implicit };

struct AxisRange {
  double lo = 0.0;
  double hi = 0.0;
  int points = 1;

  double at(int i) const { return points == 1 ? lo : lo + (hi - lo) * i / (points - 1); }
};

struct ScanSpec {
  AxisRange re;
  AxisRange im;
  ScanTarget target = ScanTarget::Implicit;
  /// Values held fixed for the components not being scanned.
  Complex fixed_fast{0.0, 0.0};
  Complex fixed_slow{0.0, 0.0};
  Complex fixed_implicit{0.0, 0.0};
};

struct ScanPoint {
  Complex z;
  double abs_r;  // NaN at a pole
};

/// Row-major over the grid: imaginary index outer, real index inner.
struct StabilityScan {
  AxisRange re;
  AxisRange im;
  std::vector<ScanPoint> points;

  /// Points with |R| <= 1 (+tol); NaN points are excluded.
  std::vector<bool> stable_mask(double tol = 0.0) const;
};

/// Grid scan of |R|. Points are evaluated in parallel; output order is the
/// grid order regardless of thread count.
StabilityScan scan_region(const MultirateScheme& scheme, const ScanSpec& spec);

/// Single-threaded reference for scan_region.
StabilityScan scan_region_serial(const MultirateScheme& scheme, const ScanSpec& spec);

/// CSV with header re_z,im_z,abs_R.
void write_scan_csv(std::ostream& os, const StabilityScan& scan);

}  // namespace mprk
