#include "mprk/harness.hpp"

#include "mprk/error.hpp"

#include <fmt/format.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <ostream>

namespace mprk::harness {

std::filesystem::path output_dir() {
  const char* env = std::getenv(kOutputDirEnv);
  return env && *env ? std::filesystem::path(env) : std::filesystem::path("mprk_out");
}

namespace {

advdiff::BenchmarkConfig fig2_base(const std::string& name, advdiff::SchemeVariant scheme, double delta, int m) {
  advdiff::BenchmarkConfig cfg;
  cfg.name = name;
  cfg.cells = 81;
  cfg.dt = 0.0125;
  cfg.t_final = 0.3;
  cfg.delta = delta;
  cfg.m = m;
  cfg.scheme = scheme;
  cfg.slow_cfl = 1.01;
  // Fast/slow CFL 1.92 / 1.01 for the two-rate case; a 4:1 speed ratio for m = 4.
  cfg.omega_ratio = m == 4 ? 4.0 : 1.92 / 1.01;
  return cfg;
}

}  // namespace

const std::vector<Preset>& fig2_presets() {
  using advdiff::SchemeVariant;
  static const std::vector<Preset> presets = {
      {fig2_base("fig2a", SchemeVariant::ExplicitMPRK, 0.05, 2), "2.4e+50", "Diverged"},
      {fig2_base("fig2b", SchemeVariant::SingleRateIMEX, 0.05, 1), "0.0", "not Stable"},
      {fig2_base("fig2c", SchemeVariant::MultirateAStable, 0.05, 2), "1.1e-16", "Stable"},
      {fig2_base("fig2d", SchemeVariant::MultirateAStable, 100.0, 2), "4e-13", "Oscillatory or Diverged"},
      {fig2_base("fig2e", SchemeVariant::MultirateLStable, 100.0, 2), "6e-13", "Stable"},
      {fig2_base("fig2f", SchemeVariant::MultirateAStable, 0.05, 4), "7.8e-16", "Stable"},
  };
  return presets;
}

std::optional<Preset> find_preset(const std::string& name) {
  for (const auto& p : fig2_presets()) {
    if (p.config.name == name) return p;
  }
  return std::nullopt;
}

RunResult run_experiment(const advdiff::BenchmarkConfig& cfg) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  const MultirateScheme scheme = advdiff::make_benchmark_scheme(cfg);
  const auto system = advdiff::make_system(cfg);
  const PartitionMap partition = advdiff::make_partition(cfg);
  const auto u0 = advdiff::initial_state(cfg);

  IntegrateOptions options;
  options.snapshot_every = cfg.snapshot_every;
  options.mass_weight = cfg.grid().dx();
  RunResult result{cfg, integrate(scheme, *system, partition, u0, 0.0, cfg.t_final, cfg.dt, options), 0.0};
  result.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

void write_run_artifacts(const RunResult& result, const std::filesystem::path& dir) {
  const auto run_dir = dir / result.config.name;
  std::filesystem::create_directories(run_dir);
  {
    std::ofstream os(run_dir / "history.csv");
    write_history_csv(os, result.report);
  }
  const auto x = result.config.grid().centers();
  for (const auto& snap : result.report.snapshots) {
    std::ofstream os(run_dir / fmt::format("u_{}.csv", snap.step));
    write_snapshot_csv(os, x, snap.y);
  }
  std::ofstream cfg(run_dir / "config.txt");
  advdiff::write_config(cfg, result.config);
}

std::string summary_line(const RunResult& r) {
  std::string line = fmt::format("{}: scheme={} verdict={} mass_loss={:.3e} max_norm={:.3e} steps={} newton_iters={}",
                                 r.config.name, advdiff::to_string(r.config.scheme), to_string(r.report.verdict),
                                 r.report.mass_loss(), r.report.max_norm(), r.report.final_state.step_count,
                                 r.report.newton.iterations);
  if (r.report.failure) line += " failure=\"" + *r.report.failure + "\"";
  return line;
}

SummaryTable reproduce_fig2(std::vector<RunResult>* results) {
  const auto& presets = fig2_presets();
  const long n = static_cast<long>(presets.size());
  std::vector<std::optional<RunResult>> runs(presets.size());
  std::vector<std::string> errors(presets.size());

#pragma omp parallel for schedule(dynamic, 1)
  for (long i = 0; i < n; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    try {
      runs[idx] = run_experiment(presets[idx].config);
    } catch (const std::exception& e) {
      errors[idx] = e.what();
    }
  }

  SummaryTable table;
  for (std::size_t i = 0; i < presets.size(); ++i) {
    SummaryRow row;
    row.name = presets[i].config.name;
    row.scheme = advdiff::to_string(presets[i].config.scheme);
    row.reference_mass_loss = presets[i].reference_mass_loss;
    row.expectation = presets[i].expectation;
    if (!runs[i]) {
      row.verdict = Verdict::Diverged;
      row.failure = errors[i];
    } else {
      const auto& rep = runs[i]->report;
      row.verdict = rep.verdict;
      row.mass_loss = rep.mass_loss();
      row.initial_max_norm = rep.history.front().max_norm;
      row.final_max_norm = rep.history.back().max_norm;
      row.newton_iterations = rep.newton.iterations;
      row.implicit_solves = rep.newton.solves;
      row.wall_seconds = runs[i]->wall_seconds;
      row.failure = rep.failure;
      if (results) results->push_back(*runs[i]);
    }
    table.push_back(std::move(row));
  }
  return table;
}

void write_summary_table(std::ostream& os, const SummaryTable& table) {
  os << fmt::format("{:<6} {:<18} {:<12} {:>11} {:>11} {:>11} {:>7} {:>9}  {:<24}\n", "preset", "scheme", "verdict",
                    "mass_loss", "ref_loss", "max_norm", "newton", "wall_s", "expected");
  for (const auto& r : table) {
    os << fmt::format("{:<6} {:<18} {:<12} {:>11.3e} {:>11} {:>11.3e} {:>7} {:>9.4f}  {:<24}\n", r.name, r.scheme,
                      to_string(r.verdict), r.mass_loss, r.reference_mass_loss, r.final_max_norm, r.newton_iterations,
                      r.wall_seconds, r.expectation);
    if (r.failure) os << "       failure: " << *r.failure << '\n';
  }
}

void write_summary_csv(std::ostream& os, const SummaryTable& table) {
  os << "preset,scheme,verdict,mass_loss,reference_mass_loss,initial_max_norm,final_max_norm,newton_iterations,"
        "implicit_solves\n";
  for (const auto& r : table) {
    os << fmt::format("{},{},{},{},{},{},{},{},{}\n", r.name, r.scheme, to_string(r.verdict), r.mass_loss,
                      r.reference_mass_loss, r.initial_max_norm, r.final_max_norm, r.newton_iterations,
                      r.implicit_solves);
  }
}

double ConvergenceTable::observed_order() const {
  if (rows.empty() || !rows.back().order) return std::nan("");
  return *rows.back().order;
}

ConvergenceTable convergence(const std::function<std::vector<double>(double)>& solve, double dt0, int halvings) {
  if (halvings < 3) throw ArgumentError(fmt::format("convergence needs at least 3 halvings, got {}", halvings));
  if (!(dt0 > 0.0)) throw ArgumentError("convergence needs a positive base step");
  ConvergenceTable table;
  table.reference_dt = dt0 / std::ldexp(1.0, halvings + 2);
  const auto reference = solve(table.reference_dt);

  for (int k = 0; k <= halvings; ++k) {
    const double dt = dt0 / std::ldexp(1.0, k);
    const auto y = solve(dt);
    if (y.size() != reference.size()) throw ArgumentError("solver returned states of different sizes");
    double err = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) err = std::max(err, std::abs(y[i] - reference[i]));
    ConvergenceRow row{dt, err, std::nullopt};
    if (!table.rows.empty()) row.order = std::log2(table.rows.back().error / err);
    table.rows.push_back(row);
  }

  for (std::size_t i = 1; i < table.rows.size(); ++i) {
    if (!(table.rows[i].error < table.rows[i - 1].error)) table.regular = false;
  }
  // Successive orders drift monotonically in the asymptotic regime.
  for (std::size_t i = 3; i < table.rows.size() && table.regular; ++i) {
    const double d1 = *table.rows[i - 1].order - *table.rows[i - 2].order;
    const double d2 = *table.rows[i].order - *table.rows[i - 1].order;
    if (d1 * d2 < 0.0 && std::min(std::abs(d1), std::abs(d2)) > 0.05) table.regular = false;
  }
  return table;
}

ConvergenceTable convergence(const advdiff::BenchmarkConfig& cfg, int halvings) {
  cfg.validate();
  const MultirateScheme scheme = advdiff::make_benchmark_scheme(cfg);
  const auto system = advdiff::make_system(cfg);
  const auto u0 = advdiff::initial_state(cfg);
  // The partition is fixed by the base step so every refinement uses the same split.
  const PartitionMap partition = advdiff::make_partition(cfg);
  auto solve = [&](double dt) {
    IntegrateOptions options;
    options.mass_weight = cfg.grid().dx();
    auto rep = integrate(scheme, *system, partition, u0, 0.0, cfg.t_final, dt, options);
    if (rep.failure) throw std::runtime_error(*rep.failure);
    return rep.final_state.y;
  };
  return convergence(solve, cfg.dt, halvings);
}

void write_convergence_csv(std::ostream& os, const ConvergenceTable& table) {
  os << "dt,error,order\n";
  for (const auto& r : table.rows) {
    os << fmt::format("{},{},{}\n", r.dt, r.error, r.order ? fmt::format("{}", *r.order) : std::string("nan"));
  }
}

SplitOdeProblem smooth_split_ode(bool with_g) {
  auto f = [](std::span<const double> y, std::span<double> out) {
    out[0] = -2.0 * y[1] + 0.3 * std::sin(y[0]);
    out[1] = y[0] - 0.2 * y[0] * y[1];
  };
  FunctionSystem::Rhs g;
  FunctionSystem::Jacobian jac;
  if (with_g) {
    g = [](std::span<const double> y, std::span<double> out) {
      out[0] = -y[0] + 0.5 * y[1];
      out[1] = 0.5 * y[0] - 1.5 * y[1];
    };
    jac = [](std::span<const double>, Eigen::MatrixXd& j) {
      j.resize(2, 2);
      j << -1.0, 0.5, 0.5, -1.5;
    };
  }
  return SplitOdeProblem{FunctionSystem(2, f, g, jac, with_g ? "smooth split ODE" : "smooth split ODE (g = 0)"),
                         PartitionMap({Region::Fast, Region::Slow}),
                         {1.0, 0.5},
                         1.0,
                         0.1};
}

ConvergenceTable convergence_on_split_ode(const MultirateScheme& scheme, bool with_g, int halvings) {
  const auto problem = smooth_split_ode(with_g);
  auto solve = [&](double dt) {
    auto rep = integrate(scheme, problem.system, problem.partition, problem.y0, 0.0, problem.t_final, dt);
    if (rep.failure) throw std::runtime_error(*rep.failure);
    return rep.final_state.y;
  };
  return convergence(solve, problem.dt0, halvings);
}

AxisRange parse_axis(const std::string& spec) {
  const auto c1 = spec.find(':');
  const auto c2 = c1 == std::string::npos ? std::string::npos : spec.find(':', c1 + 1);
  if (c2 == std::string::npos) throw ArgumentError("axis must be 'lo:hi:n', got '" + spec + "'");
  AxisRange axis;
  try {
    axis.lo = std::stod(spec.substr(0, c1));
    axis.hi = std::stod(spec.substr(c1 + 1, c2 - c1 - 1));
    axis.points = std::stoi(spec.substr(c2 + 1));
  } catch (const std::exception&) {
    throw ArgumentError("axis must be 'lo:hi:n', got '" + spec + "'");
  }
  if (axis.points < 2) throw ArgumentError("axis resolution must be >= 2");
  return axis;
}

MultirateScheme cli_scheme(int m, std::optional<ImplicitVariant> variant, int levels) {
  if (levels < 1) throw ArgumentError("levels must be >= 1");
  MultirateScheme scheme = make_scheme(Tableau::explicit_trapezoidal(), m);
  if (levels > 1) scheme = telescope(scheme, levels - 1);
  if (variant) scheme = augment_implicit(scheme, *variant);
  return scheme;
}

}  // namespace mprk::harness
