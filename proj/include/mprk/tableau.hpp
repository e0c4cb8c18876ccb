#pragma once

#include <Eigen/Dense>

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace mprk {

/// Butcher tableau (A, b, c) of a Runge-Kutta method.
///
/// Coefficients are stored as doubles. Every coefficient produced by the
/// multirate constructions below from a dyadic base (such as the explicit
/// trapezoidal method) is itself dyadic, so those tableaux are exact.
struct Tableau {
  Eigen::MatrixXd a;
  Eigen::VectorXd b;
  Eigen::VectorXd c;

  Eigen::Index stages() const { return b.size(); }

  /// Explicit trapezoidal rule (Heun): c = [0, 1], a21 = 1, b = [1/2, 1/2].
  static Tableau explicit_trapezoidal();
  static Tableau explicit_euler();

  /// Builds a tableau with c computed from the row sums of a.
  static Tableau from_coefficients(Eigen::MatrixXd a, Eigen::VectorXd b);

  friend bool operator==(const Tableau& lhs, const Tableau& rhs);
};

struct ValidationReport {
  std::vector<double> row_sum_residuals;  // |c_i - sum_j a_ij|
  double max_row_sum_residual = 0.0;
  double sum_b_residual = 0.0;  // |sum_i b_i - 1|
  bool is_explicit = false;
  bool valid = false;
  std::vector<std::string> messages;
};

/// Checks row-sum consistency, weight normalisation and explicitness.
/// Throws StructuralError when a, b and c do not agree in size.
ValidationReport validate_tableau(const Tableau& t, double tolerance = 1e-14);

/// m block-diagonal copies of base.a, each restarting from y_n with the full
/// step; weights are base.b / m repeated m times.
Tableau build_slow(const Tableau& base, int m);

/// m sequential applications of base with step dt / m, written as one
/// tableau. Block k (0-based) has c = (base.c + k) / m.
Tableau build_fast(const Tableau& base, int m);

enum class ImplicitVariant { AStable2, LStable1 };

std::string to_string(ImplicitVariant v);
ImplicitVariant parse_implicit_variant(const std::string& name);

/// Single-implicit-stage companion tableau: every entry of a_tilde is zero
/// except the last row, which equals gamma.
struct ImplicitAugmentation {
  ImplicitVariant variant = ImplicitVariant::AStable2;
  double gamma = 0.5;
  Eigen::MatrixXd a_tilde;
  Eigen::VectorXd c_tilde;

  Eigen::Index stages() const { return c_tilde.size(); }

  static ImplicitAugmentation make(ImplicitVariant variant, Eigen::Index stages);
};

double gamma_of(ImplicitVariant v);

/// Fast/slow tableau pair with shared weights, plus an optional implicit
/// last-stage augmentation.
///
/// level_tableaux holds one tableau per refinement level, coarsest first:
/// level k advances with step dt / m^k and is replicated so that all levels
/// share the same stage count m^levels * base.s. slow is level 0 and fast is
/// the finest level.
struct MultirateScheme {
  Tableau base;
  Tableau slow;
  Tableau fast;
  std::vector<Tableau> level_tableaux;
  std::optional<ImplicitAugmentation> implicit;
  std::optional<ImplicitAugmentation> base_implicit;
  int m = 1;
  int levels = 1;

  Eigen::Index stages() const { return fast.stages(); }
  bool augmented() const { return implicit.has_value(); }
};

/// Two-level scheme from a base method and ratio m.
MultirateScheme make_scheme(const Tableau& base, int m);

/// Adds extra_levels levels of nesting. The new fast method is build_fast of
/// the previous fast method; the new slow method replicates the previous
/// slow method m more times, so the coarsest level keeps the full step.
/// An existing implicit augmentation is re-attached at the new stage count.
MultirateScheme telescope(const MultirateScheme& scheme, int extra_levels);

/// Attaches the implicit last-stage augmentation for the scheme's stage
/// count, and the matching one for the base method.
MultirateScheme augment_implicit(const MultirateScheme& scheme, ImplicitVariant variant);

/// Single-rate scheme: base on every component, with its augmentation.
MultirateScheme single_rate_scheme(const Tableau& base, std::optional<ImplicitVariant> variant);

struct OrderReport {
  std::map<std::string, double> residuals;
  /// Raw b . c_tilde, kept so the printed report shows the actual value.
  std::optional<double> b_dot_c_tilde;
  int achieved_order_explicit = 0;
  std::optional<int> achieved_order_implicit;
};

OrderReport check_order_conditions(const MultirateScheme& scheme);

/// Plain-text matrix format: "s=<n>", then n rows of a, then b, then c.
void write_tableau(std::ostream& os, const Tableau& t);
Tableau read_tableau(std::istream& is);
std::string format_tableau(const Tableau& t);

}  // namespace mprk
