#include "mprk/advdiff.hpp"
#include "mprk/error.hpp"
#include "mprk/stage_solver.hpp"
#include "mprk/stepper.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

using namespace mprk;
using namespace mprk::advdiff;

namespace {

std::size_t wrap(long k, std::size_t n) {
  const long m = static_cast<long>(n);
  return static_cast<std::size_t>(((k % m) + m) % m);
}

double inf_norm(const std::vector<double>& v) {
  double out = 0.0;
  for (double x : v) out = std::max(out, std::abs(x));
  return out;
}

SpeedProfile constant_speed(double omega) {
  SpeedProfile p;
  p.omega_slow = omega;
  p.ratio = 1.0;
  return p;
}

}  // namespace

TEST_CASE("grid") {
  const Grid1D g(81);
  CHECK(g.dx() == 1.0 / 81);
  CHECK(g.x(0) == doctest::Approx(0.5 / 81));
  CHECK(g.centers().size() == 81);
  CHECK_THROWS_AS(Grid1D(4), ArgumentError);
}

TEST_CASE("advective stencil against hand-expanded weights") {
  const Grid1D g(81);
  const SpeedProfile p = constant_speed(1.3);
  std::vector<double> u(81);
  for (int k = 0; k < 81; ++k) u[static_cast<std::size_t>(k)] = std::sin(2 * std::numbers::pi * g.x(k)) + 0.3;
  const auto rhs = advective_rhs(u, g, p);
  // (-1/6, 1, -1/2, -1/3) / dx on q[k-2], q[k-1], q[k], q[k+1].
  for (long k = 0; k < 81; ++k) {
    const double q2 = 1.3 * u[wrap(k - 2, 81)], q1 = 1.3 * u[wrap(k - 1, 81)], q0 = 1.3 * u[wrap(k, 81)],
                 qp = 1.3 * u[wrap(k + 1, 81)];
    const double expected = (-q2 / 6 + q1 - q0 / 2 - qp / 3) / g.dx();
    CHECK(rhs[static_cast<std::size_t>(k)] == doctest::Approx(expected).epsilon(1e-12).scale(1.0));
  }
}

TEST_CASE("diffusion of an impulse") {
  const Grid1D g(10);
  std::vector<double> u(10, 0.0);
  u[0] = 1.0;
  const auto rhs = diffusive_rhs(u, g, 2.0);
  const double s = 2.0 / (g.dx() * g.dx());
  CHECK(rhs[0] == doctest::Approx(-2 * s));
  CHECK(rhs[1] == doctest::Approx(s));
  CHECK(rhs[9] == doctest::Approx(s));
  for (std::size_t k = 2; k < 9; ++k) CHECK(rhs[k] == 0.0);
}

TEST_CASE("operator properties") {
  const BenchmarkConfig cfg;
  const Grid1D g = cfg.grid();
  const SpeedProfile p = cfg.profile();

  SUBCASE("constants are annihilated") {
    const std::vector<double> c(81, 0.7);
    CHECK(inf_norm(diffusive_rhs(c, g, 0.05)) <= 1e-12);
    // Constant state under variable speed still moves, but sums to zero.
    const auto a = advective_rhs(c, g, constant_speed(2.0));
    CHECK(inf_norm(a) <= 1e-12);
  }
  SUBCASE("discrete sums vanish") {
    std::vector<double> u(81);
    for (int k = 0; k < 81; ++k) u[static_cast<std::size_t>(k)] = std::exp(-std::pow((g.x(k) - 0.4) / 0.1, 2)) + 0.01 * k;
    const auto a = advective_rhs(u, g, p);
    const auto d = diffusive_rhs(u, g, 0.05);
    const double bound = 1e-13 * inf_norm(u) * 81;
    CHECK(std::abs(std::accumulate(a.begin(), a.end(), 0.0)) <= bound);
    CHECK(std::abs(std::accumulate(d.begin(), d.end(), 0.0)) <= bound);
  }
  SUBCASE("linearity") {
    std::vector<double> u(81), v(81), w(81);
    for (std::size_t k = 0; k < 81; ++k) {
      u[k] = std::sin(0.3 * static_cast<double>(k));
      v[k] = std::cos(0.7 * static_cast<double>(k));
      w[k] = 2.0 * u[k] - 3.0 * v[k];
    }
    const auto au = advective_rhs(u, g, p), av = advective_rhs(v, g, p), aw = advective_rhs(w, g, p);
    const auto du = diffusive_rhs(u, g, 0.05), dv = diffusive_rhs(v, g, 0.05), dw = diffusive_rhs(w, g, 0.05);
    for (std::size_t k = 0; k < 81; ++k) {
      CHECK(aw[k] == doctest::Approx(2 * au[k] - 3 * av[k]).epsilon(1e-11).scale(1e3));
      CHECK(dw[k] == doctest::Approx(2 * du[k] - 3 * dv[k]).epsilon(1e-11).scale(1e3));
    }
  }
}

TEST_CASE("speed profile") {
  const BenchmarkConfig cfg;
  const auto p = cfg.profile();
  const Grid1D g = cfg.grid();
  CHECK(p.omega_slow * cfg.dt / g.dx() == doctest::Approx(1.01));
  CHECK(p.omega_fast() * cfg.dt / g.dx() == doctest::Approx(1.92));
  CHECK(p(0.5, g.dx()) == doctest::Approx(p.omega_fast()));
  CHECK(p(0.05, g.dx()) == doctest::Approx(p.omega_slow));
  const auto s = p.sample(g);
  for (double v : s) {
    CHECK(v >= p.omega_slow * (1 - 1e-14));
    CHECK(v <= p.omega_fast() * (1 + 1e-14));
  }
  SpeedProfile bad = p;
  bad.ratio = 0.5;
  CHECK_THROWS_AS(bad.validate(), ArgumentError);
}

TEST_CASE("build_partition") {
  SUBCASE("benchmark speed field") {
    const BenchmarkConfig cfg;
    const auto map = build_partition(cfg.grid(), cfg.profile(), cfg.dt, cfg.fast_cfl_threshold());
    // One contiguous Fast block.
    std::vector<std::size_t> fast;
    for (std::size_t k = 0; k < map.size(); ++k)
      if (map[k] == Region::Fast) fast.push_back(k);
    REQUIRE_FALSE(fast.empty());
    CHECK(fast.back() - fast.front() + 1 == fast.size());
    CHECK(fast.front() > 2);
    CHECK(fast.back() < 78);
    // Two buffer cells on each side.
    CHECK(map[fast.front() - 1] == Region::Buffer);
    CHECK(map[fast.front() - 2] == Region::Buffer);
    CHECK(map[fast.front() - 3] == Region::Slow);
    CHECK(map[fast.back() + 1] == Region::Buffer);
    CHECK(map[fast.back() + 2] == Region::Buffer);
    CHECK(map[fast.back() + 3] == Region::Slow);
    CHECK(map.count(Region::Buffer) == 4);
    CHECK(validate_partition(map, kStencilReach).valid);
    CHECK(map.fast_mask().disjoint(map.slow_mask()));
    CHECK((map.fast_mask() | map.slow_mask()) == Mask::full(81));
  }
  SUBCASE("uniform CFL below and above one") {
    const Grid1D g(40);
    const double dt = 0.01;
    const auto low = build_partition(g, constant_speed(0.5 * g.dx() / dt), dt);
    CHECK(low.count(Region::Slow) == 40);
    const auto high = build_partition(g, constant_speed(1.5 * g.dx() / dt), dt);
    CHECK(high.count(Region::Fast) == 40);
  }
}

TEST_CASE("mass") {
  const std::vector<double> u{1.0, 2.0, 3.0};
  CHECK(discrete_mass(u, 0.5) == 3.0);
  const std::vector<double> v{1.0, 2.0, 2.0};
  CHECK(mass_loss(u, v, 0.5) == doctest::Approx(0.5));
  CHECK(mass_loss(u, u, 0.5) == 0.0);
}

TEST_CASE("advection-diffusion split system") {
  BenchmarkConfig cfg;
  const auto sys = make_system(cfg);
  const auto u = initial_state(cfg);
  const Grid1D g = cfg.grid();
  const auto p = cfg.profile();

  SUBCASE("f plus g equals the full right-hand side") {
    std::vector<double> f(81), gv(81);
    sys->eval_f(u, Mask::full(81), f);
    sys->eval_g(u, gv);
    const auto a = advective_rhs(u, g, p);
    const auto d = diffusive_rhs(u, g, cfg.delta);
    for (std::size_t k = 0; k < 81; ++k) CHECK(f[k] + gv[k] == doctest::Approx(a[k] + d[k]).epsilon(1e-13));
  }
  SUBCASE("explicit diffusion moves g into f") {
    const AdvectionDiffusionSystem both(g, p, cfg.delta, true);
    CHECK_FALSE(both.has_g());
    std::vector<double> f(81);
    both.eval_f(u, Mask::full(81), f);
    const auto a = advective_rhs(u, g, p);
    const auto d = diffusive_rhs(u, g, cfg.delta);
    for (std::size_t k = 0; k < 81; ++k) CHECK(f[k] == doctest::Approx(a[k] + d[k]).epsilon(1e-13));
  }
  SUBCASE("zero diffusion has no stiff part") {
    cfg.delta = 0.0;
    CHECK_FALSE(make_system(cfg)->has_g());
  }
  SUBCASE("masked evaluation zeroes other components") {
    const auto map = make_partition(cfg);
    std::vector<double> ff(81), fs(81), full(81);
    sys->eval_f(u, map.fast_mask(), ff);
    sys->eval_f(u, map.slow_mask(), fs);
    sys->eval_f(u, Mask::full(81), full);
    for (std::size_t k = 0; k < 81; ++k) {
      CHECK(ff[k] + fs[k] == full[k]);
      if (!map.fast_mask()[k]) CHECK(ff[k] == 0.0);
    }
  }
  SUBCASE("analytic Jacobian matches finite differences") {
    Eigen::MatrixXd jac, fd;
    sys->jacobian_g(u, jac);
    finite_difference_jacobian(*sys, u, fd);
    CHECK((jac - fd).cwiseAbs().maxCoeff() <= 1e-6 * std::max(1.0, jac.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("configuration text") {
  SUBCASE("round trip") {
    BenchmarkConfig cfg;
    cfg.name = "rt";
    cfg.delta = 100.0;
    cfg.scheme = SchemeVariant::MultirateLStable;
    cfg.ic = InitialCondition::parse("gaussian:0.4:0.05");
    cfg.snapshot_every = 4;
    std::stringstream ss;
    write_config(ss, cfg);
    const auto back = parse_config(ss);
    CHECK(back.delta == 100.0);
    CHECK(back.scheme == SchemeVariant::MultirateLStable);
    CHECK(back.ic.center == 0.4);
    CHECK(back.ic.width == 0.05);
    CHECK(back.snapshot_every == 4);
    CHECK(back.dt == cfg.dt);
    CHECK(back.omega_ratio == cfg.omega_ratio);
  }
  SUBCASE("comments and whitespace") {
    std::istringstream in("# comment\n  M = 64  \n dt=0.01 # trailing\n\nscheme = explicit_mprk\nfast_interval = 0.2, 0.5\n");
    const auto cfg = parse_config(in);
    CHECK(cfg.cells == 64);
    CHECK(cfg.dt == 0.01);
    CHECK(cfg.scheme == SchemeVariant::ExplicitMPRK);
    CHECK(cfg.fast_lo == 0.2);
    CHECK(cfg.fast_hi == 0.5);
  }
  SUBCASE("errors") {
    for (const char* text : {"dt = -0.0125\n", "dt = abc\n", "unknown = 1\n", "M\n", "scheme = rk4\n",
                             "fast_interval = 0.7,0.2\n", "m = 0\n", "ic = square\n", "delta = -1\n"}) {
      CAPTURE(text);
      std::istringstream in(text);
      CHECK_THROWS_AS(parse_config(in), ConfigError);
    }
    CHECK_THROWS_AS(load_config("/nonexistent/dir/x.cfg"), ConfigError);
  }
  SUBCASE("scheme names") {
    for (auto v : {SchemeVariant::ExplicitMPRK, SchemeVariant::SingleRateIMEX, SchemeVariant::MultirateAStable,
                   SchemeVariant::MultirateLStable})
      CHECK(parse_scheme_variant(to_string(v)) == v);
  }
}

TEST_CASE("space-time convergence of the advection discretization") {
  // Constant speed, no diffusion, smooth data, CFL 0.5, run to t = 0.25.
  const double omega = 1.0;
  std::vector<double> errors;
  for (int cells : {32, 64, 128, 256}) {
    BenchmarkConfig cfg;
    cfg.cells = cells;
    cfg.delta = 0.0;
    cfg.m = 1;
    cfg.scheme = SchemeVariant::ExplicitMPRK;
    cfg.ic = InitialCondition::parse("sine");
    const Grid1D g(cells);
    const double dt = 0.5 * g.dx() / omega;
    const auto sys = AdvectionDiffusionSystem(g, constant_speed(omega), 0.0);
    std::vector<double> u0(static_cast<std::size_t>(cells));
    for (int k = 0; k < cells; ++k) {
      // Cell averages of sin(2 pi x).
      const double a = k * g.dx(), b = (k + 1) * g.dx();
      u0[static_cast<std::size_t>(k)] =
          (std::cos(2 * std::numbers::pi * a) - std::cos(2 * std::numbers::pi * b)) / (2 * std::numbers::pi * g.dx());
    }
    const auto rep = integrate(make_scheme(Tableau::explicit_trapezoidal(), 1), sys,
                               PartitionMap::all(static_cast<std::size_t>(cells), Region::Slow), u0, 0.0, 0.25, dt);
    double err = 0.0;
    for (int k = 0; k < cells; ++k) {
      const double a = k * g.dx() - 0.25 * omega, b = (k + 1) * g.dx() - 0.25 * omega;
      const double exact =
          (std::cos(2 * std::numbers::pi * a) - std::cos(2 * std::numbers::pi * b)) / (2 * std::numbers::pi * g.dx());
      err = std::max(err, std::abs(rep.final_state.y[static_cast<std::size_t>(k)] - exact));
    }
    errors.push_back(err);
  }
  for (std::size_t i = 1; i < errors.size(); ++i) {
    CAPTURE(i);
    CHECK(std::log2(errors[i - 1] / errors[i]) >= 2.0);
  }
}
