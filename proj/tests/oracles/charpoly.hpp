#pragma once

// Largest eigenvalue of a small symmetric matrix from its characteristic
// polynomial, without any rotation-based method.

#include <Eigen/Dense>

namespace oracle {

/// Coefficients c[0..n] of det(xI - S) = sum c[k] x^k (c[n] = 1), by the
/// Faddeev-LeVerrier recursion in long double.
Eigen::Matrix<long double, Eigen::Dynamic, 1> charpoly(const Eigen::MatrixXd& S);

/// Largest real root of a monic polynomial whose roots are all real.
/// Walks down the derivative chain: the largest root of p^(k) lies between
/// the largest root of p^(k+1) and an upper bound on all roots, and p^(k) is
/// monotone there, so plain bisection finds it.
long double largest_real_root(const Eigen::Matrix<long double, Eigen::Dynamic, 1>& coeffs,
                              long double upper_bound);

double max_eigen_charpoly(const Eigen::MatrixXd& S);

}  // namespace oracle
