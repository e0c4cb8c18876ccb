// Command-line driver for the multirate IMEX integrator and the periodic
// advection-diffusion benchmark.
//
//   mprk_cli run <preset|config>
//   mprk_cli fig2
//   mprk_cli converge <config|ode|ode_nog> --halvings N [--variant ...] [--m N]
//   mprk_cli scan <astable2|lstable1|none> --re a:b:n [--im a:b:n] [--m N] [--target ...]
//   mprk_cli tableau <m> [--variant astable2|lstable1|none] [--levels k]
//
// CSV artifacts go to $MPRK_OUTPUT_DIR (default ./mprk_out). Exit codes: 0 on
// success (a Diverged verdict is a valid result), 1 on usage or configuration
// errors, 2 on solver failures.

#include "mprk/error.hpp"
#include "mprk/harness.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <fstream>
#include <iostream>

namespace {

using namespace mprk;

constexpr int kExitUsage = 1;
constexpr int kExitSolver = 2;

std::optional<ImplicitVariant> parse_optional_variant(const std::string& name) {
  if (name == "none") return std::nullopt;
  return parse_implicit_variant(name);
}

int cmd_run(const std::string& target) {
  advdiff::BenchmarkConfig cfg;
  if (auto preset = harness::find_preset(target)) {
    cfg = preset->config;
  } else {
    cfg = advdiff::load_config(target);
  }
  const auto result = harness::run_experiment(cfg);
  const auto dir = harness::output_dir();
  harness::write_run_artifacts(result, dir);
  std::cout << harness::summary_line(result) << '\n';
  return result.report.failure ? kExitSolver : 0;
}

int cmd_fig2() {
  std::vector<harness::RunResult> results;
  const auto table = harness::reproduce_fig2(&results);
  const auto dir = harness::output_dir();
  for (const auto& r : results) harness::write_run_artifacts(r, dir);
  std::filesystem::create_directories(dir);
  std::ofstream csv(dir / "fig2_summary.csv");
  harness::write_summary_csv(csv, table);
  harness::write_summary_table(std::cout, table);
  return 0;
}

int cmd_converge(const std::string& target, int halvings, const std::string& variant, int m) {
  harness::ConvergenceTable table;
  std::string name = target;
  if (target == "ode" || target == "ode_nog") {
    const auto scheme = harness::cli_scheme(m, parse_optional_variant(variant), 1);
    table = harness::convergence_on_split_ode(scheme, target == "ode", halvings);
    name = fmt::format("{}_{}_m{}", target, variant, m);
  } else {
    auto cfg = harness::find_preset(target) ? harness::find_preset(target)->config : advdiff::load_config(target);
    name = cfg.name;
    table = harness::convergence(cfg, halvings);
  }
  const auto dir = harness::output_dir();
  std::filesystem::create_directories(dir);
  std::ofstream csv(dir / fmt::format("converge_{}.csv", name));
  harness::write_convergence_csv(csv, table);
  harness::write_convergence_csv(std::cout, table);
  std::cout << fmt::format("observed order {:.3f}{}\n", table.observed_order(),
                           table.regular ? "" : " (irregular: not in the asymptotic regime)");
  return 0;
}

int cmd_scan(const std::string& variant_name, const std::string& re, const std::string& im, int m,
             const std::string& target) {
  const auto variant = parse_optional_variant(variant_name);
  ScanSpec spec;
  spec.re = harness::parse_axis(re);
  spec.im = im.empty() ? AxisRange{0.0, 0.0, 1} : harness::parse_axis(im);
  if (target.empty()) {
    spec.target = variant ? ScanTarget::Implicit : ScanTarget::Fast;
  } else if (target == "fast") {
    spec.target = ScanTarget::Fast;
  } else if (target == "slow") {
    spec.target = ScanTarget::Slow;
  } else if (target == "implicit") {
    spec.target = ScanTarget::Implicit;
  } else {
    throw ArgumentError("target must be fast, slow or implicit");
  }
  const auto scheme = harness::cli_scheme(m, variant, 1);
  const auto scan = scan_region(scheme, spec);
  const auto dir = harness::output_dir();
  std::filesystem::create_directories(dir);
  std::ofstream csv(dir / fmt::format("scan_{}_m{}.csv", variant_name, m));
  write_scan_csv(csv, scan);
  write_scan_csv(std::cout, scan);
  return 0;
}

int cmd_tableau(int m, const std::string& variant, int levels) {
  const auto scheme = harness::cli_scheme(m, parse_optional_variant(variant), levels);
  std::cout << "# base\n" << format_tableau(scheme.base);
  std::cout << "# slow\n" << format_tableau(scheme.slow);
  std::cout << "# fast\n" << format_tableau(scheme.fast);
  if (scheme.implicit) {
    std::cout << "# implicit (" << to_string(scheme.implicit->variant) << ", gamma=" << scheme.implicit->gamma << ")\n"
              << format_tableau(Tableau{scheme.implicit->a_tilde, scheme.fast.b, scheme.implicit->c_tilde});
    std::cout << "# base implicit\n"
              << format_tableau(Tableau{scheme.base_implicit->a_tilde, scheme.base.b, scheme.base_implicit->c_tilde});
  }
  const auto report = check_order_conditions(scheme);
  std::cout << "# order conditions\n";
  for (const auto& [name, value] : report.residuals) std::cout << fmt::format("{} residual {}\n", name, value);
  if (report.b_dot_c_tilde) std::cout << fmt::format("b_dot_c_tilde value {}\n", *report.b_dot_c_tilde);
  std::cout << "explicit order " << report.achieved_order_explicit << '\n';
  if (report.achieved_order_implicit) std::cout << "implicit order " << *report.achieved_order_implicit << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multirate explicit / single-implicit-stage Runge-Kutta integrator"};
  app.require_subcommand(1);

  std::string run_target;
  auto* run = app.add_subcommand("run", "Run a preset (fig2a..fig2f) or a config file");
  run->add_option("target", run_target, "Preset name or config path")->required();

  auto* fig2 = app.add_subcommand("fig2", "Run all six benchmark presets and print the summary table");

  std::string conv_target;
  int halvings = 4;
  std::string conv_variant = "astable2";
  int conv_m = 2;
  auto* converge = app.add_subcommand("converge", "Measure temporal convergence order");
  converge->add_option("target", conv_target, "Config path, preset, 'ode' or 'ode_nog'")->required();
  converge->add_option("--halvings", halvings, "Number of step halvings (>= 3)");
  converge->add_option("--variant", conv_variant, "astable2|lstable1|none (ode targets only)");
  converge->add_option("--m", conv_m, "Multirate ratio (ode targets only)");

  std::string scan_variant, scan_re, scan_im, scan_target;
  int scan_m = 2;
  auto* scan = app.add_subcommand("scan", "Scan |R(z)| on a grid and write CSV");
  scan->add_option("variant", scan_variant, "astable2|lstable1|none")->required();
  scan->add_option("--re", scan_re, "Real axis lo:hi:n")->required();
  scan->add_option("--im", scan_im, "Imaginary axis lo:hi:n");
  scan->add_option("--m", scan_m, "Multirate ratio");
  scan->add_option("--target", scan_target, "fast|slow|implicit (default: implicit, or fast for none)");

  int tab_m = 2;
  std::string tab_variant = "none";
  int tab_levels = 1;
  auto* tableau = app.add_subcommand("tableau", "Print base/slow/fast (and implicit) tableaux");
  tableau->add_option("m", tab_m, "Multirate ratio")->required();
  tableau->add_option("--variant", tab_variant, "astable2|lstable1|none");
  tableau->add_option("--levels", tab_levels, "Nesting levels");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*run) return cmd_run(run_target);
    if (*fig2) return cmd_fig2();
    if (*converge) return cmd_converge(conv_target, halvings, conv_variant, conv_m);
    if (*scan) return cmd_scan(scan_variant, scan_re, scan_im, scan_m, scan_target);
    if (*tableau) return cmd_tableau(tab_m, tab_variant, tab_levels);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ArgumentError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const StructuralError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return kExitSolver;
  }
  return kExitUsage;
}
