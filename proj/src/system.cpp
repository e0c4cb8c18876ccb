#include "mprk/system.hpp"

#include "mprk/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <stdexcept>

namespace mprk {

std::size_t Mask::count() const {
  return static_cast<std::size_t>(std::count(flags_.begin(), flags_.end(), std::uint8_t{1}));
}

Mask Mask::operator|(const Mask& other) const {
  if (size() != other.size()) throw ArgumentError("mask sizes differ");
  Mask out(size());
  for (std::size_t k = 0; k < size(); ++k) out.flags_[k] = flags_[k] | other.flags_[k];
  return out;
}

bool Mask::disjoint(const Mask& other) const {
  if (size() != other.size()) return false;
  for (std::size_t k = 0; k < size(); ++k) {
    if (flags_[k] && other.flags_[k]) return false;
  }
  return true;
}

void SplitSystem::jacobian_g(std::span<const double>, Eigen::MatrixXd&) const {
  throw std::logic_error(description() + " has no analytic Jacobian of g");
}

FunctionSystem::FunctionSystem(std::size_t n, Rhs f, Rhs g, Jacobian jac, std::string description)
    : n_(n), f_(std::move(f)), g_(std::move(g)), jac_(std::move(jac)), description_(std::move(description)) {
  if (!f_) throw ArgumentError("FunctionSystem needs f");
  if (description_.empty()) description_ = "function system";
}

void FunctionSystem::eval_f(std::span<const double> y, const Mask& mask, std::span<double> out) const {
  f_(y, out);
  for (std::size_t k = 0; k < n_; ++k) {
    if (!mask[k]) out[k] = 0.0;
  }
}

void FunctionSystem::eval_g(std::span<const double> y, std::span<double> out) const {
  if (g_) {
    g_(y, out);
  } else {
    std::fill(out.begin(), out.end(), 0.0);
  }
}

void FunctionSystem::jacobian_g(std::span<const double> y, Eigen::MatrixXd& jac) const {
  if (!jac_) SplitSystem::jacobian_g(y, jac);
  jac_(y, jac);
}

LinearSplitSystem::LinearSplitSystem(Eigen::MatrixXd nonstiff, Eigen::MatrixXd stiff)
    : nonstiff_(std::move(nonstiff)), stiff_(std::move(stiff)) {
  if (nonstiff_.rows() != nonstiff_.cols() || stiff_.rows() != stiff_.cols() ||
      nonstiff_.rows() != stiff_.rows()) {
    throw ArgumentError("linear split system needs two square matrices of equal size");
  }
}

void LinearSplitSystem::eval_f(std::span<const double> y, const Mask& mask, std::span<double> out) const {
  const auto n = nonstiff_.rows();
  Eigen::Map<const Eigen::VectorXd> yv(y.data(), n);
  for (Eigen::Index i = 0; i < n; ++i) {
    out[static_cast<std::size_t>(i)] = mask[static_cast<std::size_t>(i)] ? nonstiff_.row(i).dot(yv) : 0.0;
  }
}

void LinearSplitSystem::eval_g(std::span<const double> y, std::span<double> out) const {
  const auto n = stiff_.rows();
  Eigen::Map<const Eigen::VectorXd> yv(y.data(), n);
  Eigen::Map<Eigen::VectorXd>(out.data(), n).noalias() = stiff_ * yv;
}

void LinearSplitSystem::jacobian_g(std::span<const double>, Eigen::MatrixXd& jac) const { jac = stiff_; }

Mask PartitionMap::fast_mask() const {
  Mask m(labels_.size());
  for (std::size_t k = 0; k < labels_.size(); ++k) m.set(k, labels_[k] == Region::Fast);
  return m;
}

Mask PartitionMap::slow_mask() const {
  Mask m(labels_.size());
  for (std::size_t k = 0; k < labels_.size(); ++k) m.set(k, labels_[k] != Region::Fast);
  return m;
}

std::size_t PartitionMap::count(Region r) const {
  return static_cast<std::size_t>(std::count(labels_.begin(), labels_.end(), r));
}

PartitionReport validate_partition(const PartitionMap& map, std::size_t stencil_reach) {
  PartitionReport report;
  const std::size_t n = map.size();
  if (n == 0 || map.count(Region::Fast) == 0) {
    for (std::size_t k = 0; k < n; ++k) {
      if (map[k] == Region::Buffer) {
        report.valid = false;
        report.violations.push_back(fmt::format("buffer component {} has no fast neighbour", k));
        break;
      }
    }
    return report;
  }

  // Periodic ring distance from each component to the nearest Fast one.
  auto distance_to_fast = [&](std::size_t k) {
    for (std::size_t d = 0; d <= n / 2; ++d) {
      if (map[(k + d) % n] == Region::Fast || map[(k + n - d % n) % n] == Region::Fast) return d;
    }
    return n;
  };

  for (std::size_t k = 0; k < n; ++k) {
    if (map[k] == Region::Fast) continue;
    const std::size_t d = distance_to_fast(k);
    if (map[k] == Region::Slow && d <= stencil_reach) {
      report.valid = false;
      report.violations.push_back(
          fmt::format("slow component {} is {} cell(s) from a fast component (reach {})", k, d, stencil_reach));
    } else if (map[k] == Region::Buffer && d > stencil_reach) {
      report.valid = false;
      report.violations.push_back(
          fmt::format("buffer component {} is {} cell(s) from the nearest fast component", k, d));
    }
  }
  return report;
}

}  // namespace mprk
