#pragma once

#include "mprk/stage_solver.hpp"
#include "mprk/system.hpp"
#include "mprk/tableau.hpp"

#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace mprk {

struct StepperState {
  double t = 0.0;
  std::vector<double> y;
  long step_count = 0;
  NewtonStats newton;
  /// Set when a stage or the completed step went non-finite; y then holds the
  /// last finite state.
  bool diverged = false;
};

/// A step could not be completed (implicit stage failed). The state passed to
/// the step is left untouched.
class StepError : public std::runtime_error {
 public:
  StepError(const std::string& what, long step, Eigen::Index stage)
      : std::runtime_error(what), step_(step), stage_(stage) {}
  long step() const noexcept { return step_; }
  Eigen::Index stage() const noexcept { return stage_; }

 private:
  long step_;
  Eigen::Index stage_;
};

/// Multirate partitioned Runge-Kutta stepper with an optional single implicit
/// last stage.
///
/// Stages 1..s-1 are explicit: component k uses the tableau of its partition on
/// the cached stage derivatives f_j restricted to that partition. The last
/// stage adds dt * gamma * sum_{j<s} g(Y_j) and solves implicitly for the
/// dt * gamma * g(Y_s) term. The step is completed with the shared weights b
/// applied to f(Y_i) + g(Y_i). Unaugmented schemes never evaluate g.
///
/// Holds references to the scheme and system; both must outlive the stepper.
class Stepper {
 public:
  Stepper(const MultirateScheme& scheme, const SplitSystem& sys, const PartitionMap& map,
          SolverConfig cfg = {});

  /// Telescoped form: level_of[k] in [0, scheme.levels] selects
  /// scheme.level_tableaux[level_of[k]] for component k (0 = coarsest).
  Stepper(const MultirateScheme& scheme, const SplitSystem& sys, std::span<const int> level_of,
          SolverConfig cfg = {});

  /// Advances state by dt in place. Throws StepError on implicit-stage failure.
  void step(StepperState& state, double dt);

  std::size_t partition_count() const { return masks_.size(); }

 private:
  void setup(std::vector<const Tableau*> tableaux, std::vector<Mask> masks);

  const MultirateScheme& scheme_;
  const SplitSystem& sys_;
  SolverConfig cfg_;
  Eigen::Index stages_ = 0;
  std::size_t n_ = 0;
  bool use_g_ = false;

  std::vector<Mask> masks_;
  std::vector<std::uint8_t> part_;
  // coeffs_[p][i * s + j] = a^(p)_ij, row-major copy per partition.
  std::vector<std::vector<double>> coeffs_;
  std::vector<double> implicit_coeffs_;  // row-major a_tilde
  std::vector<double> weights_;

  // Workspace: stage values, stage derivatives, stiff terms.
  std::vector<std::vector<double>> stage_y_;
  std::vector<std::vector<double>> stage_f_;
  std::vector<std::vector<double>> stage_g_;
  std::vector<double> scratch_;
  std::vector<double> next_;
};

/// Convenience wrapper: one step on a copy of state.
StepperState step(const MultirateScheme& scheme, const SplitSystem& sys, const PartitionMap& map,
                  StepperState state, double dt, const SolverConfig& cfg = {});

enum class Verdict { Stable, Oscillatory, Diverged };

std::string to_string(Verdict v);

struct StepRecord {
  long step = 0;
  double t = 0.0;
  double mass = 0.0;
  double max_norm = 0.0;
};

struct Snapshot {
  long step = 0;
  double t = 0.0;
  std::vector<double> y;
};

struct IntegrateOptions {
  /// Snapshot every this many steps (0: initial and final only).
  long snapshot_every = 0;
  /// Mass is mass_weight * sum_k y_k (the cell width for finite volumes).
  double mass_weight = 1.0;
  SolverConfig solver;
};

struct RunReport {
  std::vector<StepRecord> history;
  std::vector<Snapshot> snapshots;
  Verdict verdict = Verdict::Stable;
  NewtonStats newton;
  StepperState final_state;
  double initial_total_variation = 0.0;
  double final_total_variation = 0.0;
  /// Set when a step failed and the run ended early.
  std::optional<std::string> failure;

  double initial_mass() const { return history.empty() ? 0.0 : history.front().mass; }
  double final_mass() const { return history.empty() ? 0.0 : history.back().mass; }
  double mass_loss() const;
  double max_norm() const;
};

inline constexpr double kDivergenceGrowth = 1e6;
inline constexpr double kOscillationGrowth = 3.0;

/// Diverged if non-finite or max-norm exceeded kDivergenceGrowth times the
/// initial max-norm at any step; Oscillatory if the final total variation
/// exceeds kOscillationGrowth times the initial one; Stable otherwise.
Verdict classify(const RunReport& report);

/// Total variation on the periodic index ring.
double total_variation(std::span<const double> y);
double max_norm(std::span<const double> y);
double weighted_sum(std::span<const double> y, double weight);

/// Fixed-step driver over [t0, tF]; (tF - t0) / dt must be an integer to
/// within rounding.
RunReport integrate(const MultirateScheme& scheme, const SplitSystem& sys, const PartitionMap& map,
                    std::span<const double> y0, double t0, double tF, double dt,
                    const IntegrateOptions& options = {});

/// Number of fixed steps covering [t0, tF]; throws ArgumentError otherwise.
long fixed_step_count(double t0, double tF, double dt);

/// step,t,mass,max_norm
void write_history_csv(std::ostream& os, const RunReport& report);
/// x,u
void write_snapshot_csv(std::ostream& os, std::span<const double> x, std::span<const double> u);

}  // namespace mprk
