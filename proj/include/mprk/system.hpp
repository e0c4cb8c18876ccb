#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace mprk {

/// Set of component indices, stored as one flag per component.
class Mask {
 public:
  Mask() = default;
  explicit Mask(std::size_t n, bool value = false) : flags_(n, value ? 1 : 0) {}

  static Mask full(std::size_t n) { return Mask(n, true); }

  std::size_t size() const { return flags_.size(); }
  bool operator[](std::size_t k) const { return flags_[k] != 0; }
  void set(std::size_t k, bool value = true) { flags_[k] = value ? 1 : 0; }
  std::size_t count() const;
  std::span<const std::uint8_t> flags() const { return flags_; }

  Mask operator|(const Mask& other) const;
  bool disjoint(const Mask& other) const;

  friend bool operator==(const Mask&, const Mask&) = default;

 private:
  std::vector<std::uint8_t> flags_;
};

/// y' = f(y) + g(y) with f nonstiff and split by component region, g stiff
/// and evaluated over all components.
///
/// Implementations must be reentrant: concurrent calls with distinct output
/// buffers are allowed.
class SplitSystem {
 public:
  virtual ~SplitSystem() = default;

  virtual std::size_t dimension() const = 0;

  /// Writes f(y) on the components in mask and zero elsewhere.
  virtual void eval_f(std::span<const double> y, const Mask& mask, std::span<double> out) const = 0;

  virtual void eval_g(std::span<const double> y, std::span<double> out) const = 0;

  /// False when g is identically zero.
  virtual bool has_g() const { return true; }

  virtual bool has_jacobian_g() const { return false; }

  /// Dense dg/dy. Throws std::logic_error unless has_jacobian_g().
  virtual void jacobian_g(std::span<const double> y, Eigen::MatrixXd& jac) const;

  virtual std::string description() const { return "split system"; }
};

/// SplitSystem assembled from callbacks; eval_f is applied to the full state
/// and then restricted to the mask.
class FunctionSystem final : public SplitSystem {
 public:
  using Rhs = std::function<void(std::span<const double>, std::span<double>)>;
  using Jacobian = std::function<void(std::span<const double>, Eigen::MatrixXd&)>;

  FunctionSystem(std::size_t n, Rhs f, Rhs g = {}, Jacobian jac = {}, std::string description = {});

  std::size_t dimension() const override { return n_; }
  void eval_f(std::span<const double> y, const Mask& mask, std::span<double> out) const override;
  void eval_g(std::span<const double> y, std::span<double> out) const override;
  bool has_g() const override { return static_cast<bool>(g_); }
  bool has_jacobian_g() const override { return static_cast<bool>(jac_); }
  void jacobian_g(std::span<const double> y, Eigen::MatrixXd& jac) const override;
  std::string description() const override { return description_; }

 private:
  std::size_t n_;
  Rhs f_;
  Rhs g_;
  Jacobian jac_;
  std::string description_;
};

/// f(y) = L y, g(y) = G y.
class LinearSplitSystem final : public SplitSystem {
 public:
  LinearSplitSystem(Eigen::MatrixXd nonstiff, Eigen::MatrixXd stiff);

  std::size_t dimension() const override { return static_cast<std::size_t>(nonstiff_.rows()); }
  void eval_f(std::span<const double> y, const Mask& mask, std::span<double> out) const override;
  void eval_g(std::span<const double> y, std::span<double> out) const override;
  bool has_g() const override { return !stiff_.isZero(0.0); }
  bool has_jacobian_g() const override { return true; }
  void jacobian_g(std::span<const double> y, Eigen::MatrixXd& jac) const override;
  std::string description() const override { return "linear split system"; }

  const Eigen::MatrixXd& nonstiff() const { return nonstiff_; }
  const Eigen::MatrixXd& stiff() const { return stiff_; }

 private:
  Eigen::MatrixXd nonstiff_;
  Eigen::MatrixXd stiff_;
};

enum class Region : std::uint8_t { Fast, Buffer, Slow };

/// Per-component region labels. Buffer components are advanced with the
/// slow method, so slow_mask() covers Buffer and Slow.
class PartitionMap {
 public:
  PartitionMap() = default;
  explicit PartitionMap(std::vector<Region> labels) : labels_(std::move(labels)) {}

  static PartitionMap all(std::size_t n, Region r) { return PartitionMap(std::vector<Region>(n, r)); }

  std::size_t size() const { return labels_.size(); }
  Region operator[](std::size_t k) const { return labels_[k]; }
  const std::vector<Region>& labels() const { return labels_; }

  Mask fast_mask() const;
  Mask slow_mask() const;
  std::size_t count(Region r) const;

 private:
  std::vector<Region> labels_;
};

struct PartitionReport {
  bool valid = true;
  std::vector<std::string> violations;
};

/// Checks that every Fast/Slow adjacency on the periodic index ring is
/// separated by at least stencil_reach Buffer components.
PartitionReport validate_partition(const PartitionMap& map, std::size_t stencil_reach);

}  // namespace mprk
