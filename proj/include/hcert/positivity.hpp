#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hcert/halanay.hpp"
#include "hcert/system.hpp"

namespace hcert::positivity {

/// Off-diagonal A and all of B may dip this far below zero and still count
/// as Metzler / nonnegative.
constexpr double kSignTolerance = 1e-12;

struct StructureCheck {
  bool metzler_ok = false;
  bool nonneg_ok = false;
  bool ok() const noexcept { return metzler_ok && nonneg_ok; }
};

StructureCheck structure_check(const DelaySystem& sys, const ScanGrid& grid);

/// a(t) = -max_j sum_i A_ij(t),  b(t) = max_j sum_i B_ij(t) on the grid.
struct ColumnSums {
  std::vector<double> t;
  std::vector<double> a;
  std::vector<double> b;
};

ColumnSums column_sums(const DelaySystem& sys, const ScanGrid& grid);

struct PositivityVerdict {
  bool metzler_ok = false;
  bool nonneg_ok = false;
  std::vector<double> a_fun;
  std::vector<double> b_fun;
  double a0 = 0.0;
  double p = 0.0;
  double sigma = 0.0;
  bool a_bounded = false;
  /// a >= a0 > 0 and b / a <= p < 1 (unbounded coefficients allowed).
  bool ratio_route_ok = false;
  /// a bounded and a - b >= sigma > 0.
  bool gap_route_ok = false;
  halanay::ConditionCase case_tag = halanay::ConditionCase::None;
};

struct PositivityResult {
  PositivityVerdict verdict;
  /// l1 envelope ||x(t)||_1 <= M E_alpha(-lambda* t^alpha); empty when neither route holds.
  std::optional<halanay::HalanayCertificate> certificate;
  /// Sampled sup of ||phi(s)||_1.
  double M_sampled = 0.0;
  std::string diagnostics;
};

/// Column-sum reduction followed by the Halanay certificate with c = 0.
/// Throws InputError if the structure check fails. amplitude, when given,
/// replaces the sampled sup ||phi||_1 as M and must not be smaller than it.
PositivityResult certify_positive(const DelaySystem& sys, const ScanGrid& grid,
                                  std::optional<bool> a_bounded = std::nullopt,
                                  std::optional<double> amplitude = std::nullopt);

struct SplitInitial {
  std::vector<Eigen::VectorXd> plus;
  std::vector<Eigen::VectorXd> minus;
};

/// phi+ = |phi| and phi- = -|phi| componentwise, so phi- <= phi <= phi+.
SplitInitial split_initial(const std::vector<Eigen::VectorXd>& phi_samples);

/// The split applied to expressions: abs(phi_i(s)) and -abs(phi_i(s)).
std::pair<std::vector<expr::TimeExpr>, std::vector<expr::TimeExpr>> split_initial_exprs(
    const std::vector<expr::TimeExpr>& phi);

}  // namespace hcert::positivity
