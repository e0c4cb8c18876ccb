#pragma once

#include "mprk/advdiff.hpp"
#include "mprk/stability.hpp"
#include "mprk/stepper.hpp"

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace mprk::harness {

/// Environment variable naming the directory CSV artifacts are written to.
inline constexpr const char* kOutputDirEnv = "MPRK_OUTPUT_DIR";

std::filesystem::path output_dir();

struct Preset {
  advdiff::BenchmarkConfig config;
  std::string reference_mass_loss;  // published value for the same run
  std::string expectation;      // expected verdict pattern, for the table
};

/// fig2a..fig2f: M = 81, dt = 0.0125, t_final = 0.3.
const std::vector<Preset>& fig2_presets();
std::optional<Preset> find_preset(const std::string& name);

struct RunResult {
  advdiff::BenchmarkConfig config;
  RunReport report;
  double wall_seconds = 0.0;
};

RunResult run_experiment(const advdiff::BenchmarkConfig& cfg);

/// Writes <dir>/<name>/history.csv and <dir>/<name>/u_<step>.csv.
void write_run_artifacts(const RunResult& result, const std::filesystem::path& dir);

std::string summary_line(const RunResult& result);

struct SummaryRow {
  std::string name;
  std::string scheme;
  Verdict verdict = Verdict::Stable;
  double mass_loss = 0.0;
  double initial_max_norm = 0.0;
  double final_max_norm = 0.0;
  long newton_iterations = 0;
  long implicit_solves = 0;
  double wall_seconds = 0.0;
  std::string reference_mass_loss;
  std::string expectation;
  std::optional<std::string> failure;
};

using SummaryTable = std::vector<SummaryRow>;

/// Runs all six presets (in parallel across presets; each run is serial) and
/// returns rows in preset order.
SummaryTable reproduce_fig2(std::vector<RunResult>* results = nullptr);

void write_summary_table(std::ostream& os, const SummaryTable& table);
void write_summary_csv(std::ostream& os, const SummaryTable& table);

struct ConvergenceRow {
  double dt = 0.0;
  double error = 0.0;
  std::optional<double> order;  // log2(previous error / error)
};

struct ConvergenceTable {
  std::vector<ConvergenceRow> rows;
  double reference_dt = 0.0;
  /// False when errors fail to decrease or successive orders are non-monotone
  /// beyond a small slack; such data is not in the asymptotic regime.
  bool regular = true;

  /// Order from the two finest runs.
  double observed_order() const;
};

/// Solves with dt0, dt0/2, ..., dt0/2^halvings and compares each final state
/// (max-norm) against a run at dt0/2^(halvings+2) of the same solver.
ConvergenceTable convergence(const std::function<std::vector<double>(double)>& solve, double dt0, int halvings);

ConvergenceTable convergence(const advdiff::BenchmarkConfig& cfg, int halvings);

void write_convergence_csv(std::ostream& os, const ConvergenceTable& table);

/// Two-component smooth test problem: nonlinear f with component 0 fast and
/// component 1 slow, and a linear coupling g (optionally zero).
struct SplitOdeProblem {
  FunctionSystem system;
  PartitionMap partition;
  std::vector<double> y0;
  double t_final = 1.0;
  double dt0 = 0.1;
};

SplitOdeProblem smooth_split_ode(bool with_g);

/// Convergence study of a scheme on smooth_split_ode.
ConvergenceTable convergence_on_split_ode(const MultirateScheme& scheme, bool with_g, int halvings);

/// "a:b:n" axis syntax.
AxisRange parse_axis(const std::string& spec);

/// Scheme printed by the `tableau` command and scanned by `scan`.
MultirateScheme cli_scheme(int m, std::optional<ImplicitVariant> variant, int levels);

}  // namespace mprk::harness
