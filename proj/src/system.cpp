#include "hcert/system.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hcert/errors.hpp"

namespace hcert {
namespace {

Eigen::MatrixXd eval_matrix(const std::vector<expr::TimeExpr>& m, std::size_t d, double t) {
  Eigen::MatrixXd out(d, d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) out(i, j) = m[i * d + j](t);
  }
  return out;
}

double s_at(double tau, std::size_t n, std::size_t i) {
  return -tau + tau * static_cast<double>(i) / static_cast<double>(n - 1);
}

}  // namespace

void ScanGrid::validate() const {
  if (!(t_max > 0.0) || !std::isfinite(t_max)) throw InputError("scan.t_max must be positive");
  if (n_points < 2) throw InputError("scan.n_points must be >= 2");
}

double ScanGrid::at(std::size_t i) const {
  if (i + 1 == n_points) return t_max;
  return t_max * static_cast<double>(i) / static_cast<double>(n_points - 1);
}

std::vector<double> ScanGrid::times() const {
  validate();
  std::vector<double> out(n_points);
  for (std::size_t i = 0; i < n_points; ++i) out[i] = at(i);
  return out;
}

Eigen::MatrixXd DelaySystem::A_at(double t) const { return eval_matrix(A, dim, t); }

Eigen::MatrixXd DelaySystem::B_at(double t) const { return eval_matrix(B, dim, t); }

Eigen::VectorXd DelaySystem::phi_at(double s) const {
  Eigen::VectorXd out(dim);
  for (std::size_t i = 0; i < dim; ++i) out(i) = phi[i](s);
  return out;
}

void DelaySystem::validate() const {
  if (dim < 1) throw InputError("system dimension must be >= 1");
  if (A.size() != dim * dim) throw InputError("A must have dim*dim entries");
  if (B.size() != dim * dim) throw InputError("B must have dim*dim entries");
  if (phi.size() != dim) throw InputError("phi must have dim entries");
  if (!(tau > 0.0) || !std::isfinite(tau)) throw InputError("tau must be positive");
}

void DelaySystem::validate_on(const ScanGrid& grid) const {
  validate();
  grid.validate();
  for (std::size_t i = 0; i < grid.n_points; ++i) {
    const double t = grid.at(i);
    A_at(t);
    B_at(t);
    const double qt = q(t);
    if (qt < -1e-12 || qt > tau + 1e-12) {
      std::ostringstream os;
      os << "delay q(" << t << ") = " << qt << " outside [0, tau=" << tau << "]";
      throw InputError(os.str());
    }
  }
}

double initial_sup_l1(const DelaySystem& sys, std::size_t n) {
  sys.validate();
  double best = 0.0;
  for (std::size_t i = 0; i < n; ++i) best = std::max(best, sys.phi_at(s_at(sys.tau, n, i)).lpNorm<1>());
  return best;
}

double initial_sup_sq(const DelaySystem& sys, std::size_t n) {
  sys.validate();
  double best = 0.0;
  for (std::size_t i = 0; i < n; ++i) best = std::max(best, sys.phi_at(s_at(sys.tau, n, i)).squaredNorm());
  return best;
}

}  // namespace hcert
