#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "hcert/expr.hpp"
#include "hcert/mlf.hpp"
#include "hcert/scan_grid.hpp"

namespace hcert {

/// Caputo delay system  D^alpha x(t) = A(t) x(t) + B(t) x(t - q(t)),
/// x(s) = phi(s) on [-tau, 0]. Matrices are stored row-major as d*d
/// expressions in t; phi entries are expressions in s.
struct DelaySystem {
  mlf::FractionalOrder alpha{1.0};
  std::size_t dim = 1;
  std::vector<expr::TimeExpr> A;
  std::vector<expr::TimeExpr> B;
  expr::TimeExpr q;
  double tau = 1.0;
  std::vector<expr::TimeExpr> phi;

  Eigen::MatrixXd A_at(double t) const;
  Eigen::MatrixXd B_at(double t) const;
  double delay_at(double t) const { return q(t); }
  Eigen::VectorXd phi_at(double s) const;

  /// Shape checks only (dim >= 1, d*d matrices, d initial entries, tau > 0).
  void validate() const;
  /// Shape checks plus: every entry evaluates on the grid and 0 <= q(t) <= tau.
  void validate_on(const ScanGrid& grid) const;
};

/// Uniform s-grid on [-tau, 0] used for sup-norm estimates of phi.
constexpr std::size_t kInitialSupPoints = 10000;

/// sup over s in [-tau, 0] of ||phi(s)||_1, sampled on n uniform points.
double initial_sup_l1(const DelaySystem& sys, std::size_t n = kInitialSupPoints);

/// sup over s in [-tau, 0] of phi(s)^T phi(s), sampled on n uniform points.
double initial_sup_sq(const DelaySystem& sys, std::size_t n = kInitialSupPoints);

}  // namespace hcert
