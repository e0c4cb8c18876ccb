#include "mprk/advdiff.hpp"

#include "mprk/error.hpp"
#include "mprk/kernels.hpp"

#include <fmt/format.h>

#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>

namespace mprk::advdiff {

Grid1D::Grid1D(int m) : cells(m) {
  if (m < 5) throw ArgumentError(fmt::format("grid needs at least 5 cells, got {}", m));
}

std::vector<double> Grid1D::centers() const {
  std::vector<double> out(static_cast<std::size_t>(cells));
  for (int k = 0; k < cells; ++k) out[static_cast<std::size_t>(k)] = x(k);
  return out;
}

void SpeedProfile::validate() const {
  if (!(omega_slow > 0.0)) throw ArgumentError("slow speed must be positive");
  if (!(ratio >= 1.0)) throw ArgumentError("speed ratio must be >= 1");
  if (!(fast_lo <= fast_hi)) throw ArgumentError("fast interval is reversed");
  if (!(ramp_cells >= 0.0)) throw ArgumentError("ramp width must be non-negative");
}

double SpeedProfile::operator()(double x, double dx) const {
  const double distance = std::max({fast_lo - x, x - fast_hi, 0.0});
  const double ramp = ramp_cells * dx;
  if (distance == 0.0) return omega_fast();
  if (distance >= ramp) return omega_slow;
  const double blend = 0.5 * (1.0 + std::cos(std::numbers::pi * distance / ramp));
  return omega_slow + (omega_fast() - omega_slow) * blend;
}

std::vector<double> SpeedProfile::sample(const Grid1D& grid) const {
  validate();
  std::vector<double> out(static_cast<std::size_t>(grid.cells));
  for (int k = 0; k < grid.cells; ++k) out[static_cast<std::size_t>(k)] = (*this)(grid.x(k), grid.dx());
  return out;
}

std::vector<double> advective_rhs(std::span<const double> u, const Grid1D& grid, const SpeedProfile& profile) {
  if (u.size() != static_cast<std::size_t>(grid.cells)) throw ArgumentError("state does not match grid");
  const auto speed = profile.sample(grid);
  std::vector<double> out(u.size());
  kernels::upwind3_flux_divergence(u, speed, grid.dx(), {}, out);
  return out;
}

std::vector<double> diffusive_rhs(std::span<const double> u, const Grid1D& grid, double delta) {
  if (u.size() != static_cast<std::size_t>(grid.cells)) throw ArgumentError("state does not match grid");
  if (!(delta >= 0.0)) throw ArgumentError("diffusion coefficient must be non-negative");
  std::vector<double> out(u.size());
  kernels::central_diffusion(u, delta, grid.dx(), {}, out);
  return out;
}

PartitionMap build_partition(const Grid1D& grid, const SpeedProfile& profile, double dt, double fast_cfl) {
  if (!(dt > 0.0)) throw ArgumentError("step size must be positive");
  const auto speed = profile.sample(grid);
  const auto n = static_cast<std::size_t>(grid.cells);
  std::vector<Region> labels(n, Region::Slow);
  std::vector<bool> fast(n, false);
  for (std::size_t k = 0; k < n; ++k) fast[k] = speed[k] * dt / grid.dx() > fast_cfl;
  for (std::size_t k = 0; k < n; ++k) {
    if (fast[k]) {
      labels[k] = Region::Fast;
      continue;
    }
    for (std::size_t d = 1; d <= kStencilReach; ++d) {
      if (fast[(k + d) % n] || fast[(k + n - d) % n]) {
        labels[k] = Region::Buffer;
        break;
      }
    }
  }
  return PartitionMap(std::move(labels));
}

double discrete_mass(std::span<const double> u, double dx) { return weighted_sum(u, dx); }

double mass_loss(std::span<const double> u0, std::span<const double> u1, double dx) {
  return std::abs(discrete_mass(u0, dx) - discrete_mass(u1, dx));
}

AdvectionDiffusionSystem::AdvectionDiffusionSystem(Grid1D grid, const SpeedProfile& profile, double delta,
                                                   bool explicit_diffusion)
    : grid_(grid), speed_(profile.sample(grid)), delta_(delta), explicit_diffusion_(explicit_diffusion) {
  if (!(delta >= 0.0)) throw ArgumentError("diffusion coefficient must be non-negative");
}

void AdvectionDiffusionSystem::eval_f(std::span<const double> y, const Mask& mask, std::span<double> out) const {
  kernels::upwind3_flux_divergence(y, speed_, grid_.dx(), mask.flags(), out);
  if (explicit_diffusion_ && delta_ != 0.0) {
    // out += masked diffusion; small vectors, so a plain loop is fine here.
    std::vector<double> diff(y.size());
    kernels::central_diffusion(y, delta_, grid_.dx(), mask.flags(), diff);
    for (std::size_t k = 0; k < y.size(); ++k) out[k] += diff[k];
  }
}

void AdvectionDiffusionSystem::eval_g(std::span<const double> y, std::span<double> out) const {
  if (!has_g()) {
    std::fill(out.begin(), out.end(), 0.0);
    return;
  }
  kernels::central_diffusion(y, delta_, grid_.dx(), {}, out);
}

void AdvectionDiffusionSystem::jacobian_g(std::span<const double>, Eigen::MatrixXd& jac) const {
  const auto n = static_cast<Eigen::Index>(grid_.cells);
  jac = Eigen::MatrixXd::Zero(n, n);
  if (!has_g()) return;
  const double w = delta_ / (grid_.dx() * grid_.dx());
  for (Eigen::Index k = 0; k < n; ++k) {
    jac(k, (k + n - 1) % n) += w;
    jac(k, k) += -2.0 * w;
    jac(k, (k + 1) % n) += w;
  }
}

std::string AdvectionDiffusionSystem::description() const {
  return fmt::format("periodic advection-diffusion, M={}, delta={}{}", grid_.cells, delta_,
                     explicit_diffusion_ ? " (explicit diffusion)" : "");
}

std::string to_string(SchemeVariant v) {
  switch (v) {
    case SchemeVariant::ExplicitMPRK: return "explicit_mprk";
    case SchemeVariant::SingleRateIMEX: return "single_rate_imex";
    case SchemeVariant::MultirateAStable: return "multirate_astable";
    case SchemeVariant::MultirateLStable: return "multirate_lstable";
  }
  return "?";
}

SchemeVariant parse_scheme_variant(const std::string& name) {
  for (auto v : {SchemeVariant::ExplicitMPRK, SchemeVariant::SingleRateIMEX, SchemeVariant::MultirateAStable,
                 SchemeVariant::MultirateLStable}) {
    if (name == to_string(v)) return v;
  }
  throw ConfigError("unknown scheme '" + name +
                    "' (expected explicit_mprk, single_rate_imex, multirate_astable, multirate_lstable)");
}

double InitialCondition::operator()(double x) const {
  if (kind == Kind::Sine) return std::sin(2.0 * std::numbers::pi * x);
  const double s = (x - center) / width;
  return std::exp(-s * s);
}

InitialCondition InitialCondition::parse(const std::string& spec) {
  InitialCondition ic;
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
  if (parts.empty()) throw ConfigError("empty initial condition");
  if (parts[0] == "sine" && parts.size() == 1) {
    ic.kind = Kind::Sine;
    return ic;
  }
  if (parts[0] != "gaussian" || (parts.size() != 1 && parts.size() != 3)) {
    throw ConfigError("initial condition must be 'sine', 'gaussian' or 'gaussian:<center>:<width>'");
  }
  if (parts.size() == 3) {
    try {
      ic.center = std::stod(parts[1]);
      ic.width = std::stod(parts[2]);
    } catch (const std::exception&) {
      throw ConfigError("bad gaussian parameters in '" + spec + "'");
    }
    if (!(ic.width > 0.0)) throw ConfigError("gaussian width must be positive");
  }
  return ic;
}

std::string InitialCondition::to_string() const {
  if (kind == Kind::Sine) return "sine";
  return fmt::format("gaussian:{}:{}", center, width);
}

void BenchmarkConfig::validate() const {
  if (cells < 5) throw ConfigError(fmt::format("M must be >= 5, got {}", cells));
  if (!(dt > 0.0)) throw ConfigError(fmt::format("dt must be positive, got {}", dt));
  if (!(t_final > 0.0)) throw ConfigError(fmt::format("t_final must be positive, got {}", t_final));
  if (!(delta >= 0.0)) throw ConfigError(fmt::format("delta must be non-negative, got {}", delta));
  if (m < 1) throw ConfigError(fmt::format("m must be >= 1, got {}", m));
  if (levels < 1) throw ConfigError(fmt::format("levels must be >= 1, got {}", levels));
  if (!(slow_cfl > 0.0)) throw ConfigError("slow_cfl must be positive");
  if (!(omega_ratio >= 1.0)) throw ConfigError("omega_ratio must be >= 1");
  if (!(fast_lo >= 0.0 && fast_lo <= fast_hi && fast_hi <= 1.0)) throw ConfigError("fast_interval must lie in [0,1]");
  if (!(ramp_cells >= 0.0)) throw ConfigError("ramp_cells must be non-negative");
  if (snapshot_every < 0) throw ConfigError("snapshot_every must be non-negative");
  try {
    fixed_step_count(0.0, t_final, dt);
  } catch (const ArgumentError& e) {
    throw ConfigError(e.what());
  }
}

SpeedProfile BenchmarkConfig::profile() const {
  SpeedProfile p;
  p.omega_slow = slow_cfl * grid().dx() / dt;
  p.ratio = omega_ratio;
  p.fast_lo = fast_lo;
  p.fast_hi = fast_hi;
  p.ramp_cells = ramp_cells;
  return p;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw ConfigError(fmt::format("key '{}': '{}' is not a number", key, value));
  }
}

long to_long(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const long v = std::stol(value, &used);
    if (used != value.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw ConfigError(fmt::format("key '{}': '{}' is not an integer", key, value));
  }
}

}  // namespace

BenchmarkConfig parse_config(std::istream& is) {
  BenchmarkConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(fmt::format("line {}: expected 'key = value'", lineno));
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (value.empty()) throw ConfigError(fmt::format("line {}: missing value for '{}'", lineno, key));

    if (key == "name") {
      cfg.name = value;
    } else if (key == "M") {
      cfg.cells = static_cast<int>(to_long(key, value));
    } else if (key == "dt") {
      cfg.dt = to_double(key, value);
    } else if (key == "t_final") {
      cfg.t_final = to_double(key, value);
    } else if (key == "delta") {
      cfg.delta = to_double(key, value);
    } else if (key == "m") {
      cfg.m = static_cast<int>(to_long(key, value));
    } else if (key == "levels") {
      cfg.levels = static_cast<int>(to_long(key, value));
    } else if (key == "scheme") {
      cfg.scheme = parse_scheme_variant(value);
    } else if (key == "slow_cfl") {
      cfg.slow_cfl = to_double(key, value);
    } else if (key == "omega_ratio") {
      cfg.omega_ratio = to_double(key, value);
    } else if (key == "fast_interval") {
      const auto comma = value.find(',');
      if (comma == std::string::npos) throw ConfigError("fast_interval must be 'lo,hi'");
      cfg.fast_lo = to_double(key, trim(value.substr(0, comma)));
      cfg.fast_hi = to_double(key, trim(value.substr(comma + 1)));
    } else if (key == "ramp_cells") {
      cfg.ramp_cells = to_double(key, value);
    } else if (key == "ic") {
      cfg.ic = InitialCondition::parse(value);
    } else if (key == "snapshot_every") {
      cfg.snapshot_every = to_long(key, value);
    } else {
      throw ConfigError(fmt::format("line {}: unknown key '{}'", lineno, key));
    }
  }
  cfg.validate();
  return cfg;
}

BenchmarkConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  auto cfg = parse_config(in);
  if (cfg.name == "custom") {
    const auto slash = path.find_last_of('/');
    auto stem = path.substr(slash == std::string::npos ? 0 : slash + 1);
    if (const auto dot = stem.rfind('.'); dot != std::string::npos && dot > 0) stem.erase(dot);
    cfg.name = stem;
  }
  return cfg;
}

void write_config(std::ostream& os, const BenchmarkConfig& cfg) {
  os << "name = " << cfg.name << '\n'
     << "M = " << cfg.cells << '\n'
     << fmt::format("dt = {}\n", cfg.dt) << fmt::format("t_final = {}\n", cfg.t_final)
     << fmt::format("delta = {}\n", cfg.delta) << "m = " << cfg.m << '\n'
     << "levels = " << cfg.levels << '\n'
     << "scheme = " << to_string(cfg.scheme) << '\n'
     << fmt::format("slow_cfl = {}\n", cfg.slow_cfl) << fmt::format("omega_ratio = {}\n", cfg.omega_ratio)
     << fmt::format("fast_interval = {},{}\n", cfg.fast_lo, cfg.fast_hi)
     << fmt::format("ramp_cells = {}\n", cfg.ramp_cells) << "ic = " << cfg.ic.to_string() << '\n'
     << "snapshot_every = " << cfg.snapshot_every << '\n';
}

MultirateScheme make_benchmark_scheme(const BenchmarkConfig& cfg) {
  const Tableau base = Tableau::explicit_trapezoidal();
  if (cfg.scheme == SchemeVariant::SingleRateIMEX) return single_rate_scheme(base, ImplicitVariant::AStable2);
  MultirateScheme scheme = make_scheme(base, cfg.m);
  if (cfg.levels > 1) scheme = telescope(scheme, cfg.levels - 1);
  switch (cfg.scheme) {
    case SchemeVariant::MultirateAStable: return augment_implicit(scheme, ImplicitVariant::AStable2);
    case SchemeVariant::MultirateLStable: return augment_implicit(scheme, ImplicitVariant::LStable1);
    default: return scheme;
  }
}

std::unique_ptr<AdvectionDiffusionSystem> make_system(const BenchmarkConfig& cfg) {
  cfg.validate();
  return std::make_unique<AdvectionDiffusionSystem>(cfg.grid(), cfg.profile(), cfg.delta,
                                                    cfg.scheme == SchemeVariant::ExplicitMPRK);
}

std::vector<double> initial_state(const BenchmarkConfig& cfg) {
  const Grid1D grid = cfg.grid();
  std::vector<double> u(static_cast<std::size_t>(grid.cells));
  for (int k = 0; k < grid.cells; ++k) u[static_cast<std::size_t>(k)] = cfg.ic(grid.x(k));
  return u;
}

PartitionMap make_partition(const BenchmarkConfig& cfg) {
  if (cfg.scheme == SchemeVariant::SingleRateIMEX) {
    return PartitionMap::all(static_cast<std::size_t>(cfg.cells), Region::Slow);
  }
  return build_partition(cfg.grid(), cfg.profile(), cfg.dt, cfg.fast_cfl_threshold());
}

}  // namespace mprk::advdiff
