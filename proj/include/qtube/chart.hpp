#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace qtube {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Axis-aligned box of chart parameters. Periodic axes wrap instead of
/// failing the domain check.
struct ChartBox {
  Vec lo;
  Vec hi;
  std::vector<bool> periodic;

  bool contains(const Vec& x) const;
};

/// Second derivatives d^2 X / dx_i dx_j, stored as n*n ambient vectors.
struct Hessian {
  int n = 0;
  std::vector<Vec> entries;

  Hessian() = default;
  Hessian(int n, int m) : n(n), entries(static_cast<std::size_t>(n) * n, Vec::Zero(m)) {}
  Vec& operator()(int i, int j) { return entries[static_cast<std::size_t>(i) * n + j]; }
  const Vec& operator()(int i, int j) const { return entries[static_cast<std::size_t>(i) * n + j]; }
};

/// A parametrized piece of an immersed base manifold in R^{n+k}.
/// Jacobian rows are the coordinate tangent vectors d_i X.
class ImmersionChart {
 public:
  virtual ~ImmersionChart() = default;

  virtual int dim_base() const = 0;
  virtual int dim_ambient() const = 0;
  int codim() const { return dim_ambient() - dim_base(); }

  virtual Vec position(const Vec& x) const = 0;
  virtual Mat jacobian(const Vec& x) const;
  virtual Hessian hessian(const Vec& x) const;
  virtual bool has_analytic_derivatives() const { return false; }

  /// Optional preferred normal directions (k ambient vectors as columns) used to
  /// seed the normal frame so that families with a natural orientation get it.
  virtual std::optional<Mat> normal_seed(const Vec& /*x*/) const { return std::nullopt; }

  virtual std::string name() const = 0;

  const ChartBox& domain() const { return domain_; }
  void set_domain(ChartBox box) { domain_ = std::move(box); }

 protected:
  ChartBox domain_;
};

using ChartPtr = std::shared_ptr<const ImmersionChart>;

/// Central-difference derivatives, step h = base_step * (1 + |x|).
Mat fd_jacobian(const ImmersionChart& chart, const Vec& x, double base_step = 1e-5);
/// Second derivatives. When the chart has an analytic Jacobian it is
/// differenced once (step 1e-5); otherwise positions are differenced twice with
/// the larger step 1e-4 to keep roundoff below truncation error.
Hessian fd_hessian(const ImmersionChart& chart, const Vec& x);

/// Chart assembled from closures; derivative closures are optional and fall
/// back to finite differences.
class FunctionChart final : public ImmersionChart {
 public:
  using PositionFn = std::function<Vec(const Vec&)>;
  using JacobianFn = std::function<Mat(const Vec&)>;
  using HessianFn = std::function<Hessian(const Vec&)>;

  FunctionChart(std::string name, int n, int m, ChartBox box, PositionFn position,
                JacobianFn jacobian = {}, HessianFn hessian = {});

  int dim_base() const override { return n_; }
  int dim_ambient() const override { return m_; }
  Vec position(const Vec& x) const override { return position_(x); }
  Mat jacobian(const Vec& x) const override;
  Hessian hessian(const Vec& x) const override;
  bool has_analytic_derivatives() const override { return bool(jacobian_) && bool(hessian_); }
  std::string name() const override { return name_; }

 private:
  std::string name_;
  int n_;
  int m_;
  PositionFn position_;
  JacobianFn jacobian_;
  HessianFn hessian_;
};

}  // namespace qtube
