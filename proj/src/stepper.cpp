#include "mprk/stepper.hpp"

#include "mprk/error.hpp"
#include "mprk/kernels.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <ostream>

namespace mprk {

namespace {

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

std::vector<double> row_major(const Eigen::MatrixXd& a) {
  std::vector<double> out(static_cast<std::size_t>(a.size()));
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) out[static_cast<std::size_t>(i * a.cols() + j)] = a(i, j);
  }
  return out;
}

}  // namespace

Stepper::Stepper(const MultirateScheme& scheme, const SplitSystem& sys, const PartitionMap& map, SolverConfig cfg)
    : scheme_(scheme), sys_(sys), cfg_(cfg) {
  if (map.size() != sys.dimension()) {
    throw ArgumentError(fmt::format("partition map has {} components, system has {}", map.size(), sys.dimension()));
  }
  setup({&scheme.fast, &scheme.slow}, {map.fast_mask(), map.slow_mask()});
}

Stepper::Stepper(const MultirateScheme& scheme, const SplitSystem& sys, std::span<const int> level_of,
                 SolverConfig cfg)
    : scheme_(scheme), sys_(sys), cfg_(cfg) {
  if (level_of.size() != sys.dimension()) throw ArgumentError("level map size does not match system");
  const auto nlevels = scheme.level_tableaux.size();
  std::vector<Mask> masks(nlevels, Mask(level_of.size()));
  std::vector<const Tableau*> tableaux;
  for (std::size_t k = 0; k < level_of.size(); ++k) {
    if (level_of[k] < 0 || static_cast<std::size_t>(level_of[k]) >= nlevels) {
      throw ArgumentError(fmt::format("component {} has level {} outside [0, {}]", k, level_of[k], nlevels - 1));
    }
    masks[static_cast<std::size_t>(level_of[k])].set(k);
  }
  for (const auto& t : scheme.level_tableaux) tableaux.push_back(&t);
  setup(std::move(tableaux), std::move(masks));
}

void Stepper::setup(std::vector<const Tableau*> tableaux, std::vector<Mask> masks) {
  n_ = sys_.dimension();
  stages_ = scheme_.stages();
  for (const Tableau* t : tableaux) {
    if (t->stages() != stages_) throw StructuralError("partition tableaux have different stage counts");
    if (t->b != scheme_.fast.b) throw StructuralError("partition tableaux must share the b vector");
  }
  if (scheme_.implicit && scheme_.implicit->stages() != stages_) {
    throw StructuralError("implicit augmentation does not match the stage count");
  }
  masks_ = std::move(masks);
  part_.assign(n_, 0);
  std::vector<int> owners(n_, 0);
  for (std::size_t p = 0; p < masks_.size(); ++p) {
    for (std::size_t k = 0; k < n_; ++k) {
      if (masks_[p][k]) {
        part_[k] = static_cast<std::uint8_t>(p);
        ++owners[k];
      }
    }
  }
  if (std::any_of(owners.begin(), owners.end(), [](int c) { return c != 1; })) {
    throw ArgumentError("partition masks must cover every component exactly once");
  }
  coeffs_.clear();
  for (const Tableau* t : tableaux) coeffs_.push_back(row_major(t->a));
  use_g_ = scheme_.implicit.has_value() && sys_.has_g();
  if (use_g_) implicit_coeffs_ = row_major(scheme_.implicit->a_tilde);
  weights_.assign(scheme_.fast.b.data(), scheme_.fast.b.data() + stages_);

  const auto s = static_cast<std::size_t>(stages_);
  stage_y_.assign(s, std::vector<double>(n_));
  stage_f_.assign(s, std::vector<double>(n_));
  stage_g_.assign(use_g_ ? s : 0, std::vector<double>(n_));
  scratch_.assign(n_, 0.0);
  next_.assign(n_, 0.0);
}

void Stepper::step(StepperState& state, double dt) {
  if (!(dt >= 0.0) || !std::isfinite(dt)) throw ArgumentError(fmt::format("step size must be >= 0, got {}", dt));
  if (state.y.size() != n_) throw ArgumentError("state size does not match system");
  if (state.diverged) return;

  const auto s = static_cast<std::size_t>(stages_);
  std::vector<const double*> fptr(s), gptr(use_g_ ? s : 0);
  for (std::size_t j = 0; j < s; ++j) fptr[j] = stage_f_[j].data();
  for (std::size_t j = 0; j < gptr.size(); ++j) gptr[j] = stage_g_[j].data();
  std::vector<kernels::StageRow> rows(coeffs_.size());
  NewtonStats step_stats;

  for (std::size_t i = 0; i < s; ++i) {
    for (std::size_t p = 0; p < coeffs_.size(); ++p) {
      rows[p].coeffs = std::span<const double>(coeffs_[p].data() + i * s, i);
    }
    std::span<const double> implicit_row;
    if (use_g_) implicit_row = std::span<const double>(implicit_coeffs_.data() + i * s, i);
    auto& yi = stage_y_[i];
    kernels::stage_combine(state.y, dt, rows, part_, std::span(fptr.data(), i), implicit_row,
                           std::span(gptr.data(), use_g_ ? i : 0), yi);
    if (!all_finite(yi)) {
      state.diverged = true;
      return;
    }

    const double diag = use_g_ ? implicit_coeffs_[i * s + i] : 0.0;
    if (diag != 0.0) {
      try {
        auto sol = solve_stage(sys_, yi, dt * diag, yi, cfg_);
        yi = std::move(sol.y);
        step_stats.solves += 1;
        step_stats.iterations += sol.iterations;
        step_stats.last_residual = sol.residual;
        step_stats.max_residual = std::max(step_stats.max_residual, sol.residual);
      } catch (const std::exception& e) {
        throw StepError(fmt::format("step {} stage {}: {}", state.step_count + 1, i + 1, e.what()),
                        state.step_count + 1, static_cast<Eigen::Index>(i) + 1);
      }
    }

    auto& fi = stage_f_[i];
    std::fill(fi.begin(), fi.end(), 0.0);
    for (const auto& mask : masks_) {
      if (mask.count() == 0) continue;
      sys_.eval_f(yi, mask, scratch_);
      for (std::size_t k = 0; k < n_; ++k) {
        if (mask[k]) fi[k] = scratch_[k];
      }
    }
    if (use_g_) sys_.eval_g(yi, stage_g_[i]);
  }

  kernels::complete_step(state.y, dt, weights_, fptr, gptr, next_);
  if (!all_finite(next_)) {
    state.diverged = true;
    return;
  }
  state.y.swap(next_);
  state.t += dt;
  state.step_count += 1;
  state.newton += step_stats;
}

StepperState step(const MultirateScheme& scheme, const SplitSystem& sys, const PartitionMap& map,
                  StepperState state, double dt, const SolverConfig& cfg) {
  Stepper stepper(scheme, sys, map, cfg);
  stepper.step(state, dt);
  return state;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Stable: return "Stable";
    case Verdict::Oscillatory: return "Oscillatory";
    case Verdict::Diverged: return "Diverged";
  }
  return "?";
}

double total_variation(std::span<const double> y) {
  const std::size_t n = y.size();
  double tv = 0.0;
  for (std::size_t k = 0; k < n; ++k) tv += std::abs(y[(k + 1) % n] - y[k]);
  return tv;
}

double max_norm(std::span<const double> y) {
  double m = 0.0;
  for (double v : y) {
    if (!std::isfinite(v)) return INFINITY;
    m = std::max(m, std::abs(v));
  }
  return m;
}

double weighted_sum(std::span<const double> y, double weight) {
  double sum = 0.0;
  for (double v : y) sum += v;
  return weight * sum;
}

double RunReport::mass_loss() const { return std::abs(initial_mass() - final_mass()); }

double RunReport::max_norm() const {
  double m = 0.0;
  for (const auto& r : history) m = std::max(m, r.max_norm);
  return m;
}

Verdict classify(const RunReport& report) {
  if (report.final_state.diverged || report.history.empty()) return Verdict::Diverged;
  const double initial = report.history.front().max_norm;
  for (const auto& r : report.history) {
    if (!std::isfinite(r.max_norm) || !std::isfinite(r.mass) || r.max_norm > kDivergenceGrowth * initial) {
      return Verdict::Diverged;
    }
  }
  if (report.final_total_variation > kOscillationGrowth * report.initial_total_variation) {
    return Verdict::Oscillatory;
  }
  return Verdict::Stable;
}

long fixed_step_count(double t0, double tF, double dt) {
  if (!(tF >= t0)) throw ArgumentError(fmt::format("final time {} precedes start time {}", tF, t0));
  if (tF == t0) return 0;
  if (!(dt > 0.0)) throw ArgumentError(fmt::format("step size must be positive, got {}", dt));
  const double ratio = (tF - t0) / dt;
  const double steps = std::round(ratio);
  if (steps < 1.0 || std::abs(ratio - steps) > 1e-9 * std::max(1.0, steps)) {
    throw ArgumentError(fmt::format("interval {} is not a whole number of steps of {}", tF - t0, dt));
  }
  return static_cast<long>(steps);
}

RunReport integrate(const MultirateScheme& scheme, const SplitSystem& sys, const PartitionMap& map,
                    std::span<const double> y0, double t0, double tF, double dt, const IntegrateOptions& options) {
  if (y0.size() != sys.dimension()) throw ArgumentError("initial state size does not match system");
  const long nsteps = fixed_step_count(t0, tF, dt);
  Stepper stepper(scheme, sys, map, options.solver);

  RunReport report;
  StepperState state;
  state.t = t0;
  state.y.assign(y0.begin(), y0.end());

  auto record = [&](const StepperState& st) {
    report.history.push_back({st.step_count, st.t, weighted_sum(st.y, options.mass_weight), max_norm(st.y)});
  };
  auto snapshot = [&](const StepperState& st) { report.snapshots.push_back({st.step_count, st.t, st.y}); };

  record(state);
  snapshot(state);
  report.initial_total_variation = total_variation(state.y);

  for (long k = 1; k <= nsteps; ++k) {
    try {
      stepper.step(state, dt);
    } catch (const StepError& e) {
      report.failure = e.what();
      break;
    }
    if (state.diverged) break;
    state.t = k == nsteps ? tF : t0 + static_cast<double>(k) * dt;
    record(state);
    if (options.snapshot_every > 0 && k % options.snapshot_every == 0 && k != nsteps) snapshot(state);
  }
  if (report.snapshots.back().step != state.step_count) snapshot(state);

  report.final_total_variation = total_variation(state.y);
  report.newton = state.newton;
  report.final_state = std::move(state);
  report.verdict = classify(report);
  return report;
}

void write_history_csv(std::ostream& os, const RunReport& report) {
  os << "step,t,mass,max_norm\n";
  for (const auto& r : report.history) os << fmt::format("{},{},{},{}\n", r.step, r.t, r.mass, r.max_norm);
}

void write_snapshot_csv(std::ostream& os, std::span<const double> x, std::span<const double> u) {
  if (x.size() != u.size()) throw ArgumentError("snapshot coordinates and values differ in length");
  os << "x,u\n";
  for (std::size_t k = 0; k < x.size(); ++k) os << fmt::format("{},{}\n", x[k], u[k]);
}

}  // namespace mprk
