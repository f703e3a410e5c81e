#pragma once

#include <optional>
#include <string>

#include <Eigen/Dense>

#include "hcert/halanay.hpp"
#include "hcert/system.hpp"

namespace hcert::lmi {

/// [[A^T + A + gamma I, B], [B^T, -sigma I]]; exactly symmetric.
/// Throws InputError unless A and B are square of equal size.
Eigen::MatrixXd lmi_block(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, double gamma,
                          double sigma);

/// All eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
/// Throws InputError if S is not square or |S - S^T| exceeds 1e-12.
Eigen::VectorXd jacobi_eigenvalues(const Eigen::MatrixXd& S);

/// Largest eigenvalue of a symmetric matrix.
double max_eigen_sym(const Eigen::MatrixXd& S);

struct LmiInput {
  DelaySystem sys;
  expr::TimeExpr gamma;
  expr::TimeExpr sigma;
  ScanGrid grid;
  double tol = 1e-10;
};

struct LmiReport {
  bool feasible = false;
  double worst_eigen = 0.0;  // max over grid of the largest block eigenvalue
  double worst_t = 0.0;
  double a0 = 0.0;  // min over grid of gamma
  double p = 0.0;   // max over grid of sigma / gamma
  double M2 = 0.0;  // sup phi^T phi used as amplitude
  /// Certificate for W = x^T x; the l2 envelope is sqrt(halanay::envelope(...)).
  std::optional<halanay::HalanayCertificate> certificate;
  std::string diagnostics;
};

/// Scans the block on the grid. Infeasibility is reported, not thrown.
/// Throws InputError if gamma or sigma is negative somewhere on the grid.
LmiReport certify_lmi(const LmiInput& input, double M2);

/// sqrt(M2 E_alpha(-lambda* t^alpha)).
double l2_envelope(const halanay::HalanayCertificate& cert, mlf::FractionalOrder alpha, double t);

}  // namespace hcert::lmi
