#include "mprk/tableau.hpp"

#include "mprk/error.hpp"

#include <fmt/format.h>

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

namespace mprk {

Tableau Tableau::explicit_trapezoidal() {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2, 2);
  a(1, 0) = 1.0;
  Eigen::VectorXd b(2);
  b << 0.5, 0.5;
  return from_coefficients(std::move(a), std::move(b));
}

Tableau Tableau::explicit_euler() {
  return from_coefficients(Eigen::MatrixXd::Zero(1, 1), Eigen::VectorXd::Ones(1));
}

Tableau Tableau::from_coefficients(Eigen::MatrixXd a, Eigen::VectorXd b) {
  if (a.rows() != a.cols() || a.rows() != b.size()) {
    throw StructuralError(fmt::format("tableau dimensions disagree: a is {}x{}, b has {} entries",
                                      a.rows(), a.cols(), b.size()));
  }
  Eigen::VectorXd c = a.rowwise().sum();
  return Tableau{std::move(a), std::move(b), std::move(c)};
}

bool operator==(const Tableau& lhs, const Tableau& rhs) {
  return lhs.a.rows() == rhs.a.rows() && lhs.a.cols() == rhs.a.cols() &&
         lhs.b.size() == rhs.b.size() && lhs.c.size() == rhs.c.size() && lhs.a == rhs.a &&
         lhs.b == rhs.b && lhs.c == rhs.c;
}

ValidationReport validate_tableau(const Tableau& t, double tolerance) {
  const auto s = t.b.size();
  if (t.a.rows() != s || t.a.cols() != s || t.c.size() != s) {
    throw StructuralError(fmt::format("tableau dimension mismatch: a {}x{}, b {}, c {}", t.a.rows(),
                                      t.a.cols(), t.b.size(), t.c.size()));
  }
  if (s == 0) throw StructuralError("tableau has no stages");

  ValidationReport report;
  report.row_sum_residuals.resize(static_cast<std::size_t>(s));
  for (Eigen::Index i = 0; i < s; ++i) {
    const double r = std::abs(t.c(i) - t.a.row(i).sum());
    report.row_sum_residuals[static_cast<std::size_t>(i)] = r;
    report.max_row_sum_residual = std::max(report.max_row_sum_residual, r);
    if (r > tolerance) {
      report.messages.push_back(fmt::format("row {}: c = {} but row sum = {}", i + 1, t.c(i),
                                            t.a.row(i).sum()));
    }
  }
  report.sum_b_residual = std::abs(t.b.sum() - 1.0);
  if (report.sum_b_residual > tolerance) {
    report.messages.push_back(fmt::format("sum of b = {}", t.b.sum()));
  }

  report.is_explicit = true;
  for (Eigen::Index i = 0; i < s && report.is_explicit; ++i) {
    for (Eigen::Index j = i; j < s; ++j) {
      if (t.a(i, j) != 0.0) {
        report.is_explicit = false;
        break;
      }
    }
  }
  report.valid = report.max_row_sum_residual <= tolerance && report.sum_b_residual <= tolerance;
  return report;
}

namespace {

void require_explicit_base(const Tableau& base, int m) {
  if (m < 1) throw ArgumentError(fmt::format("multirate ratio must be >= 1, got {}", m));
  const auto report = validate_tableau(base);
  if (!report.valid) throw StructuralError("base tableau is not consistent");
  if (!report.is_explicit) throw StructuralError("base tableau must be explicit");
}

}  // namespace

Tableau build_slow(const Tableau& base, int m) {
  require_explicit_base(base, m);
  if (m == 1) return base;
  const auto s = base.stages();
  const auto n = s * m;
  Tableau out{Eigen::MatrixXd::Zero(n, n), Eigen::VectorXd(n), Eigen::VectorXd(n)};
  for (int k = 0; k < m; ++k) {
    out.a.block(k * s, k * s, s, s) = base.a;
    out.b.segment(k * s, s) = base.b / m;
    out.c.segment(k * s, s) = base.c;
  }
  return out;
}

Tableau build_fast(const Tableau& base, int m) {
  require_explicit_base(base, m);
  if (m == 1) return base;
  const auto s = base.stages();
  const auto n = s * m;
  Tableau out{Eigen::MatrixXd::Zero(n, n), Eigen::VectorXd(n), Eigen::VectorXd(n)};
  const Eigen::RowVectorXd completed = base.b.transpose() / m;
  for (int k = 0; k < m; ++k) {
    out.a.block(k * s, k * s, s, s) = base.a / m;
    // Sub-step k starts from the completed result of sub-steps 0..k-1.
    for (int l = 0; l < k; ++l) {
      out.a.block(k * s, l * s, s, s) = Eigen::VectorXd::Ones(s) * completed;
    }
    out.b.segment(k * s, s) = base.b / m;
    out.c.segment(k * s, s) = (base.c.array() + k) / m;
  }
  return out;
}

std::string to_string(ImplicitVariant v) {
  return v == ImplicitVariant::AStable2 ? "astable2" : "lstable1";
}

ImplicitVariant parse_implicit_variant(const std::string& name) {
  if (name == "astable2") return ImplicitVariant::AStable2;
  if (name == "lstable1") return ImplicitVariant::LStable1;
  throw ArgumentError("unknown implicit variant '" + name + "'");
}

double gamma_of(ImplicitVariant v) { return v == ImplicitVariant::AStable2 ? 0.5 : 1.0; }

ImplicitAugmentation ImplicitAugmentation::make(ImplicitVariant variant, Eigen::Index stages) {
  if (stages < 1) throw ArgumentError("augmentation needs at least one stage");
  ImplicitAugmentation aug;
  aug.variant = variant;
  aug.gamma = gamma_of(variant);
  aug.a_tilde = Eigen::MatrixXd::Zero(stages, stages);
  aug.a_tilde.row(stages - 1).setConstant(aug.gamma);
  aug.c_tilde = aug.a_tilde.rowwise().sum();
  return aug;
}

namespace {

std::vector<Tableau> build_levels(const Tableau& base, int m, int levels) {
  // Level k is base subcycled m^k times, replicated m^(levels-k) times.
  std::vector<Tableau> out;
  out.reserve(static_cast<std::size_t>(levels) + 1);
  Tableau subcycled = base;
  for (int k = 0; k <= levels; ++k) {
    int replicas = 1;
    for (int r = k; r < levels; ++r) replicas *= m;
    out.push_back(build_slow(subcycled, replicas));
    if (k < levels) subcycled = build_fast(subcycled, m);
  }
  return out;
}

}  // namespace

MultirateScheme make_scheme(const Tableau& base, int m) {
  MultirateScheme scheme;
  scheme.base = base;
  scheme.m = m;
  scheme.levels = 1;
  scheme.slow = build_slow(base, m);
  scheme.fast = build_fast(base, m);
  scheme.level_tableaux = {scheme.slow, scheme.fast};
  return scheme;
}

MultirateScheme telescope(const MultirateScheme& scheme, int extra_levels) {
  if (extra_levels < 1) {
    throw ArgumentError(fmt::format("telescope needs extra_levels >= 1, got {}", extra_levels));
  }
  MultirateScheme out = scheme;
  for (int k = 0; k < extra_levels; ++k) {
    out.fast = build_fast(out.fast, out.m);
    out.slow = build_slow(out.slow, out.m);
  }
  out.levels = scheme.levels + extra_levels;
  out.level_tableaux = build_levels(scheme.base, scheme.m, out.levels);
  if (scheme.implicit) out = augment_implicit(out, scheme.implicit->variant);
  return out;
}

MultirateScheme augment_implicit(const MultirateScheme& scheme, ImplicitVariant variant) {
  if (scheme.fast.stages() != scheme.slow.stages()) {
    throw StructuralError("fast and slow tableaux have different stage counts");
  }
  if (scheme.fast.b != scheme.slow.b) {
    throw StructuralError("fast and slow tableaux must share the b vector");
  }
  MultirateScheme out = scheme;
  out.implicit = ImplicitAugmentation::make(variant, scheme.stages());
  out.base_implicit = ImplicitAugmentation::make(variant, scheme.base.stages());
  return out;
}

MultirateScheme single_rate_scheme(const Tableau& base, std::optional<ImplicitVariant> variant) {
  auto scheme = make_scheme(base, 1);
  if (variant) scheme = augment_implicit(scheme, *variant);
  return scheme;
}

OrderReport check_order_conditions(const MultirateScheme& scheme) {
  OrderReport report;
  const Eigen::VectorXd& b = scheme.fast.b;
  const double sum_b = std::abs(b.sum() - 1.0);
  const double fast2 = std::abs(b.dot(scheme.fast.c) - 0.5);
  const double slow2 = std::abs(scheme.slow.b.dot(scheme.slow.c) - 0.5);
  report.residuals["sum_b"] = sum_b;
  report.residuals["b_dot_c_fast"] = fast2;
  report.residuals["b_dot_c_slow"] = slow2;
  report.residuals["b_fast_minus_b_slow"] =
      scheme.fast.stages() == scheme.slow.stages() ? (b - scheme.slow.b).cwiseAbs().maxCoeff()
                                                   : INFINITY;

  constexpr double tol = 1e-14;
  const bool shared_b = report.residuals["b_fast_minus_b_slow"] <= tol;
  if (sum_b <= tol && shared_b) {
    report.achieved_order_explicit = (fast2 <= tol && slow2 <= tol) ? 2 : 1;
  }

  if (scheme.implicit) {
    const double bct = b.dot(scheme.implicit->c_tilde);
    report.b_dot_c_tilde = bct;
    const double res = std::abs(bct - 0.5);
    report.residuals["b_dot_c_tilde"] = res;
    if (sum_b <= tol) {
      report.achieved_order_implicit = res <= tol ? 2 : 1;
    } else {
      report.achieved_order_implicit = 0;
    }
  }
  return report;
}

void write_tableau(std::ostream& os, const Tableau& t) {
  const auto s = t.stages();
  os << "s=" << s << '\n';
  auto row = [&os](const auto& v) {
    for (Eigen::Index j = 0; j < v.size(); ++j) {
      if (j) os << ' ';
      os << fmt::format("{}", v(j));
    }
    os << '\n';
  };
  for (Eigen::Index i = 0; i < s; ++i) row(t.a.row(i));
  row(t.b);
  row(t.c);
}

Tableau read_tableau(std::istream& is) {
  std::string header;
  if (!std::getline(is, header) || header.rfind("s=", 0) != 0) {
    throw StructuralError("tableau file must start with 's=<n>'");
  }
  long s = 0;
  try {
    s = std::stol(header.substr(2));
  } catch (const std::exception&) {
    throw StructuralError("bad stage count in '" + header + "'");
  }
  if (s < 1) throw StructuralError("stage count must be positive");

  auto read_row = [&is, s](auto& dst, const char* what) {
    std::string line;
    if (!std::getline(is, line)) throw StructuralError(std::string("missing ") + what + " row");
    std::istringstream ls(line);
    for (long j = 0; j < s; ++j) {
      if (!(ls >> dst(j))) throw StructuralError(std::string("short ") + what + " row");
    }
    double extra = 0.0;
    if (ls >> extra) throw StructuralError(std::string("long ") + what + " row");
  };
  Tableau t{Eigen::MatrixXd(s, s), Eigen::VectorXd(s), Eigen::VectorXd(s)};
  for (long i = 0; i < s; ++i) {
    Eigen::RowVectorXd r(s);
    read_row(r, "a");
    t.a.row(i) = r;
  }
  read_row(t.b, "b");
  read_row(t.c, "c");
  return t;
}

std::string format_tableau(const Tableau& t) {
  std::ostringstream os;
  write_tableau(os, t);
  return os.str();
}

}  // namespace mprk
