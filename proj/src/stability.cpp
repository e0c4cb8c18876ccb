#include "mprk/stability.hpp"

#include "mprk/error.hpp"

#include <fmt/format.h>

#include <cmath>
#include <limits>
#include <ostream>

namespace mprk {

Complex r_implicit_closed_form(ImplicitVariant variant, Complex z) {
  if (variant == ImplicitVariant::AStable2) {
    if (z == Complex(2.0, 0.0)) throw DomainError("pole of (2+z)/(2-z) at z = 2");
    return (2.0 + z) / (2.0 - z);
  }
  if (z == Complex(1.0, 0.0)) throw DomainError("pole of 1/(1-z) at z = 1");
  return 1.0 / (1.0 - z);
}

Complex r_numeric(const MultirateScheme& scheme, Complex z_f, Complex z_s, Complex z_i) {
  const auto s = scheme.stages();
  const bool implicit = scheme.implicit.has_value();
  if (!implicit && z_i != Complex(0.0, 0.0)) {
    throw ArgumentError("stiff rate given for a scheme without implicit augmentation");
  }
  const Eigen::MatrixXd& af = scheme.fast.a;
  const Eigen::MatrixXd& as = scheme.slow.a;

  std::vector<Complex> stage(static_cast<std::size_t>(s));
  for (Eigen::Index i = 0; i < s; ++i) {
    Complex acc{1.0, 0.0};
    for (Eigen::Index j = 0; j < i; ++j) {
      Complex coeff = af(i, j) * z_f + as(i, j) * z_s;
      if (implicit) coeff += scheme.implicit->a_tilde(i, j) * z_i;
      acc += coeff * stage[static_cast<std::size_t>(j)];
    }
    Complex denom{1.0, 0.0};
    if (implicit) denom -= scheme.implicit->a_tilde(i, i) * z_i;
    if (denom == Complex(0.0, 0.0)) {
      throw DomainError(fmt::format("implicit stage {} is singular", i + 1));
    }
    stage[static_cast<std::size_t>(i)] = acc / denom;
  }

  Complex weighted{0.0, 0.0};
  for (Eigen::Index i = 0; i < s; ++i) weighted += scheme.fast.b(i) * stage[static_cast<std::size_t>(i)];
  return 1.0 + (z_f + z_s + z_i) * weighted;
}

namespace {

void check_axis(const AxisRange& axis, const char* name) {
  if (axis.points < 1) throw ArgumentError(fmt::format("{} axis needs at least one point", name));
  if (axis.points == 1 && axis.lo != axis.hi) {
    throw ArgumentError(fmt::format("{} axis spans an interval but has resolution 1", name));
  }
}

ScanPoint evaluate_point(const MultirateScheme& scheme, const ScanSpec& spec, Complex z) {
  Complex zf = spec.fixed_fast, zs = spec.fixed_slow, zi = spec.fixed_implicit;
  switch (spec.target) {
    case ScanTarget::Fast: zf = z; break;
    case ScanTarget::Slow: zs = z; break;
    case ScanTarget::Implicit: zi = z; break;
  }
  try {
    const double r = std::abs(r_numeric(scheme, zf, zs, zi));
    return {z, std::isfinite(r) ? r : std::numeric_limits<double>::quiet_NaN()};
  } catch (const DomainError&) {
    return {z, std::numeric_limits<double>::quiet_NaN()};
  }
}

StabilityScan prepare(const MultirateScheme& scheme, const ScanSpec& spec) {
  check_axis(spec.re, "real");
  check_axis(spec.im, "imaginary");
  if (spec.target != ScanTarget::Implicit && spec.fixed_implicit != Complex(0.0, 0.0) &&
      !scheme.implicit) {
    throw ArgumentError("fixed stiff rate given for a scheme without implicit augmentation");
  }
  if (spec.target == ScanTarget::Implicit && !scheme.implicit) {
    throw ArgumentError("implicit scan requires an augmented scheme");
  }
  StabilityScan scan{spec.re, spec.im, {}};
  scan.points.resize(static_cast<std::size_t>(spec.re.points) * spec.im.points);
  return scan;
}

}  // namespace

StabilityScan scan_region(const MultirateScheme& scheme, const ScanSpec& spec) {
  StabilityScan scan = prepare(scheme, spec);
  const int nre = spec.re.points;
  const long total = static_cast<long>(scan.points.size());
#pragma omp parallel for schedule(static)
  for (long idx = 0; idx < total; ++idx) {
    const int i = static_cast<int>(idx / nre);
    const int r = static_cast<int>(idx % nre);
    scan.points[static_cast<std::size_t>(idx)] =
        evaluate_point(scheme, spec, Complex(spec.re.at(r), spec.im.at(i)));
  }
  return scan;
}

StabilityScan scan_region_serial(const MultirateScheme& scheme, const ScanSpec& spec) {
  StabilityScan scan = prepare(scheme, spec);
  std::size_t idx = 0;
  for (int i = 0; i < spec.im.points; ++i) {
    for (int r = 0; r < spec.re.points; ++r) {
      scan.points[idx++] = evaluate_point(scheme, spec, Complex(spec.re.at(r), spec.im.at(i)));
    }
  }
  return scan;
}

std::vector<bool> StabilityScan::stable_mask(double tol) const {
  std::vector<bool> out(points.size());
  for (std::size_t k = 0; k < points.size(); ++k) {
    out[k] = !std::isnan(points[k].abs_r) && points[k].abs_r <= 1.0 + tol;
  }
  return out;
}

void write_scan_csv(std::ostream& os, const StabilityScan& scan) {
  os << "re_z,im_z,abs_R\n";
  for (const auto& p : scan.points) {
    os << fmt::format("{},{},{}\n", p.z.real(), p.z.imag(), p.abs_r);
  }
}

}  // namespace mprk
