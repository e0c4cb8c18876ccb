#include "mprk/error.hpp"
#include "mprk/stability.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

using namespace mprk;

namespace {

const Tableau kBase = Tableau::explicit_trapezoidal();

MultirateScheme augmented(int m, ImplicitVariant v) { return augment_implicit(make_scheme(kBase, m), v); }

Complex heun_polynomial(Complex z) { return 1.0 + z + z * z / 2.0; }

}  // namespace

TEST_CASE("closed-form implicit stability functions") {
  CHECK(r_implicit_closed_form(ImplicitVariant::AStable2, 0.0) == Complex(1.0));
  CHECK(std::abs(r_implicit_closed_form(ImplicitVariant::AStable2, -2.0)) == 0.0);
  CHECK(std::abs(r_implicit_closed_form(ImplicitVariant::LStable1, -1e12)) <= 1e-11);
  CHECK_THROWS_AS(r_implicit_closed_form(ImplicitVariant::AStable2, 2.0), DomainError);
  CHECK_THROWS_AS(r_implicit_closed_form(ImplicitVariant::LStable1, 1.0), DomainError);
}

TEST_CASE("r_numeric on the implicit part matches the closed forms") {
  for (int m : {1, 2, 4}) {
    const auto a2 = augmented(m, ImplicitVariant::AStable2);
    const auto l1 = augmented(m, ImplicitVariant::LStable1);
    for (Complex z : {Complex(-10.0), Complex(-1.0), Complex(-0.1), Complex(0.0, 2.0), Complex(-3.0, 7.0)}) {
      CHECK(std::abs(r_numeric(a2, 0.0, 0.0, z) - r_implicit_closed_form(ImplicitVariant::AStable2, z)) <= 1e-12);
      CHECK(std::abs(r_numeric(l1, 0.0, 0.0, z) - r_implicit_closed_form(ImplicitVariant::LStable1, z)) <= 1e-12);
    }
  }
  const auto a2 = augmented(2, ImplicitVariant::AStable2);
  CHECK(std::abs(r_numeric(a2, 0.0, 0.0, -1e9) - Complex(-1.0)) <= 1e-6);
  CHECK(r_numeric(a2, 0.0, 0.0, 0.0) == Complex(1.0));
  CHECK(r_numeric(make_scheme(kBase, 3), 0.0, 0.0, 0.0) == Complex(1.0));
}

TEST_CASE("r_numeric error paths") {
  CHECK_THROWS_AS(r_numeric(make_scheme(kBase, 2), 0.0, 0.0, -1.0), ArgumentError);
  // 1 - gamma z = 0 at z = 2 for gamma = 1/2.
  CHECK_THROWS_AS(r_numeric(augmented(2, ImplicitVariant::AStable2), 0.0, 0.0, 2.0), DomainError);
}

TEST_CASE("explicit parts reproduce the base stability polynomial") {
  const auto single = make_scheme(kBase, 1);
  const auto two = make_scheme(kBase, 2);
  for (Complex z : {Complex(-1.5), Complex(-0.3, 0.8), Complex(0.2, -1.1)}) {
    CHECK(std::abs(r_numeric(single, z, 0.0, 0.0) - heun_polynomial(z)) <= 1e-13);
    // Fast and slow rates sharing the total rate equally.
    CHECK(std::abs(r_numeric(single, z / 2.0, z / 2.0, 0.0) - heun_polynomial(z)) <= 1e-13);
    // Slow method alone reverts to one base step; fast method is two half steps.
    CHECK(std::abs(r_numeric(two, 0.0, z, 0.0) - heun_polynomial(z)) <= 1e-13);
    const Complex half = heun_polynomial(z / 2.0);
    CHECK(std::abs(r_numeric(two, z, 0.0, 0.0) - half * half) <= 1e-13);
  }
}

TEST_CASE("stability properties") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> re(-50.0, 0.0), im(-50.0, 50.0);

  SUBCASE("A-stable closed form is bounded in the left half-plane") {
    for (int k = 0; k < 200; ++k) {
      const Complex z(re(rng), im(rng));
      CHECK(std::abs(r_implicit_closed_form(ImplicitVariant::AStable2, z)) <= 1.0 + 1e-12);
    }
  }
  SUBCASE("L-stable closed form decays monotonically on the negative axis") {
    double previous = std::abs(r_implicit_closed_form(ImplicitVariant::LStable1, -1.0));
    for (double x = -1.5; x > -1e6; x *= 1.5) {
      const double cur = std::abs(r_implicit_closed_form(ImplicitVariant::LStable1, x));
      CHECK(cur < previous);
      previous = cur;
    }
  }
  SUBCASE("conjugate symmetry") {
    const auto scheme = augmented(2, ImplicitVariant::AStable2);
    for (int k = 0; k < 50; ++k) {
      const Complex zf(re(rng) / 25, im(rng) / 25), zs(re(rng) / 25, im(rng) / 25), zi(re(rng), im(rng));
      const Complex r = r_numeric(scheme, zf, zs, zi);
      const Complex rc = r_numeric(scheme, std::conj(zf), std::conj(zs), std::conj(zi));
      CHECK(std::abs(rc - std::conj(r)) <= 1e-12 * std::max(1.0, std::abs(r)));
    }
  }
}

TEST_CASE("scan_region") {
  SUBCASE("base method on [-2, 0] stays within the unit disk") {
    ScanSpec spec;
    spec.re = {-2.0, 0.0, 201};
    spec.target = ScanTarget::Fast;
    const auto scan = scan_region(make_scheme(kBase, 1), spec);
    REQUIRE(scan.points.size() == 201);
    for (const auto& p : scan.points) CHECK(p.abs_r <= 1.0);
    CHECK(scan.points.front().abs_r == 1.0);  // R(-2) = 1 exactly
    CHECK(scan.points.back().abs_r == 1.0);   // R(0) = 1
  }
  SUBCASE("A-stable implicit part on a left half-plane grid") {
    ScanSpec spec;
    spec.re = {-100.0, 0.0, 41};
    spec.im = {-50.0, 50.0, 21};
    const auto scan = scan_region(augmented(2, ImplicitVariant::AStable2), spec);
    REQUIRE(scan.points.size() == 41 * 21);
    for (bool ok : scan.stable_mask(1e-12)) CHECK(ok);
    // Row-major: imaginary index outer.
    CHECK(scan.points[1].z == Complex(-97.5, -50.0));
    CHECK(scan.points[41].z == Complex(-100.0, -45.0));
  }
  SUBCASE("poles are flagged and the scan continues") {
    ScanSpec spec;
    spec.re = {0.0, 4.0, 5};
    const auto scan = scan_region(augmented(2, ImplicitVariant::AStable2), spec);
    CHECK(std::isnan(scan.points[2].abs_r));
    CHECK(scan.points[0].abs_r == 1.0);
    CHECK(scan.points[4].abs_r == doctest::Approx(3.0));  // |(2+4)/(2-4)|
    CHECK_FALSE(scan.stable_mask()[2]);
  }
  SUBCASE("parallel and serial scans agree bitwise") {
    ScanSpec spec;
    spec.re = {-3.0, 1.0, 37};
    spec.im = {-2.0, 2.0, 29};
    spec.target = ScanTarget::Slow;
    spec.fixed_fast = Complex(-0.5, 0.1);
    spec.fixed_implicit = Complex(-4.0, 0.0);
    const auto scheme = augmented(2, ImplicitVariant::LStable1);
    const auto a = scan_region(scheme, spec);
    const auto b = scan_region_serial(scheme, spec);
    std::ostringstream sa, sb;
    write_scan_csv(sa, a);
    write_scan_csv(sb, b);
    CHECK(sa.str() == sb.str());
  }
  SUBCASE("CSV format") {
    ScanSpec spec;
    spec.re = {-100.0, 0.0, 2};
    const auto scan = scan_region(augmented(2, ImplicitVariant::LStable1), spec);
    std::ostringstream os;
    write_scan_csv(os, scan);
    CHECK(os.str().rfind("re_z,im_z,abs_R\n-100,0,", 0) == 0);
    CHECK(scan.points[0].abs_r == doctest::Approx(1.0 / 101.0).epsilon(1e-14));
    CHECK(scan.points[1].abs_r == 1.0);
  }
  SUBCASE("argument checks") {
    ScanSpec spec;
    spec.re = {-1.0, 0.0, 1};
    CHECK_THROWS_AS(scan_region(augmented(2, ImplicitVariant::AStable2), spec), ArgumentError);
    spec.re = {-1.0, 0.0, 3};
    CHECK_THROWS_AS(scan_region(make_scheme(kBase, 2), spec), ArgumentError);  // implicit target, no augmentation
  }
}
