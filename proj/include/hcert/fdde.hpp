#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "hcert/mlf.hpp"
#include "hcert/system.hpp"

namespace hcert::fdde {

struct SolverConfig {
  double t_end = 10.0;
  double h = 1e-2;
  int corrector_iters = 1;
  /// Reject steps whose delayed argument falls past the last computed node
  /// instead of interpolating against the current iterate.
  bool strict_delay = false;

  /// Throws InputError unless 0 < h < t_end, t_end / h <= 1e7 and corrector_iters >= 1.
  void validate() const;
  /// Number of steps; the last node is steps() * h, the first grid point >= t_end.
  std::size_t steps() const;
};

struct Trajectory {
  double h = 0.0;
  std::vector<double> t;
  std::vector<Eigen::VectorXd> x;
  /// A(t_n) x_n + B(t_n) x(t_n - q(t_n)), the right-hand side at each node.
  std::vector<Eigen::VectorXd> rhs;
  std::vector<Eigen::VectorXd> delayed;
  std::vector<double> norm_l1;
  std::vector<double> norm_l2;
  /// Nodes whose delayed argument lay past the last completed node.
  std::vector<std::size_t> flagged_nodes;

  std::size_t size() const noexcept { return t.size(); }
  std::size_t dim() const noexcept { return x.empty() ? 0 : static_cast<std::size_t>(x[0].size()); }
  /// Component i of the state at every node.
  std::vector<double> component(std::size_t i) const;
};

/// Fractional Adams-Bashforth-Moulton predictor-corrector on the Volterra form
/// of the delay system. Throws InputError on a bad config or delay outside
/// [0, tau], OverflowError if the state stops being finite.
Trajectory solve(const DelaySystem& sys, const SolverConfig& cfg);

/// L1 approximation of the Caputo derivative of order alpha at samples[node],
/// for samples on a uniform grid of step h. Throws InputError unless
/// 1 <= node < samples.size().
double caputo_l1(std::span<const double> samples, double h, mlf::FractionalOrder alpha,
                 std::size_t node);

enum class Norm { L1, L2 };

struct EnvelopeCheck {
  double max_ratio = 0.0;
  std::optional<double> first_violation_t;
  double tolerance = 0.0;
  std::vector<double> envelope;
  std::vector<double> ratio;

  bool pass() const noexcept { return max_ratio <= 1.0 + tolerance; }
};

/// Ratio of the trajectory norm to envelope(t) at every node. A non-positive
/// envelope under a nonzero norm counts as an infinite ratio.
EnvelopeCheck check_envelope(const Trajectory& traj, Norm norm,
                             const std::function<double(double)>& envelope, double tolerance);

/// max over nodes n >= 1 of  L1[x^T x]_n - 2 x_n^T rhs_n.
double lyapunov_check(const Trajectory& traj, mlf::FractionalOrder alpha);

/// CSV with header t,x1,...,xd,norm_l1,norm_l2,envelope,ratio and 17
/// significant digits. Without a check the last two columns are nan.
void write_csv(std::ostream& os, const Trajectory& traj, const EnvelopeCheck* check = nullptr);

}  // namespace hcert::fdde
