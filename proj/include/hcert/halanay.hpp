#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "hcert/expr.hpp"
#include "hcert/mlf.hpp"
#include "hcert/scan_grid.hpp"

namespace hcert::halanay {

using expr::TimeExpr;
using mlf::FractionalOrder;

/// Coefficients of the delayed fractional inequality
///   D^alpha w <= -a(t) w + sum_k b_k(t) sup_{[t - q_k(t), t]} w + c(t).
struct HalanayInput {
  FractionalOrder alpha{1.0};
  TimeExpr a;
  std::vector<TimeExpr> b;
  std::vector<TimeExpr> q;
  TimeExpr c;
  double tau = 1.0;
  ScanGrid scan;
  /// User assertion that a(.) is bounded on [0, inf); unset means use the
  /// grid heuristic (see bounded_growth_tol).
  std::optional<bool> a_bounded;
  double bounded_growth_tol = 0.01;
};

/// The same data sampled on a grid. b[k][i] is b_k(t[i]).
struct SampledCoefficients {
  std::vector<double> t;
  std::vector<double> a;
  std::vector<std::vector<double>> b;
  std::vector<std::vector<double>> q;
  std::vector<double> c;
  double tau = 1.0;
  std::optional<bool> a_bounded;
  double bounded_growth_tol = 0.01;

  std::size_t size() const noexcept { return t.size(); }
  std::size_t delays() const noexcept { return b.size(); }
  /// Throws InputError on shape mismatch, negative a/b/c or q outside [0, tau].
  void validate() const;
};

/// Samples every coefficient on input.scan and validates the result.
SampledCoefficients sample(const HalanayInput& input);

enum class ConditionCase {
  BoundedGap,  // a bounded and a - sum b >= sigma > 0
  Ratio,       // a >= a0 > 0 and sum b / a <= p < 1
  None,
};

std::string_view to_string(ConditionCase c) noexcept;

struct ConditionVerdict {
  ConditionCase case_tag = ConditionCase::None;
  double sigma = 0.0;   // min over grid of a - sum b
  double a0 = 0.0;      // min over grid of a
  double p = 0.0;       // max over grid of sum b / a (inf if a0 == 0)
  double c_star = 0.0;  // max over grid of c
  bool a_bounded = false;
  bool gap_holds = false;    // a bounded and sigma > 0
  bool ratio_holds = false;  // a0 > 0 and p < 1
};

struct HalanayCertificate {
  double lambda_star = 0.0;
  double w0 = 0.0;
  double M = 0.0;
  double residual_max = 0.0;  // max |h(lambda(t))| over the grid
  double grid_argmin = 0.0;   // t where lambda(t) is smallest
  ConditionVerdict verdict;
  double t_max = 0.0;
  std::size_t n_points = 0;
  /// w0 under each hypothesis that holds, for reporting.
  std::optional<double> w0_gap;
  std::optional<double> w0_ratio;
};

/// h(lambda) = lambda - a + sum_k b_k / E_alpha(-lambda q_k^alpha).
double h_value(FractionalOrder alpha, double a_val, std::span<const double> b_vals,
               std::span<const double> q_vals, double lambda);

/// h'(lambda) = 1 + sum_k b_k q_k^alpha E_{alpha,alpha}(-lambda q_k^alpha)
///                  / (alpha E_alpha(-lambda q_k^alpha)^2).
double h_derivative(FractionalOrder alpha, std::span<const double> b_vals,
                    std::span<const double> q_vals, double lambda);

/// Unique positive root of h on (0, a_val]. Bisection to width 1e-14
/// followed by three bracketed Newton steps.
/// Throws InfeasibleError if a_val <= sum b_vals, DomainError on negative
/// inputs or size mismatch.
double lambda_at(FractionalOrder alpha, double a_val, std::span<const double> b_vals,
                 std::span<const double> q_vals);

ConditionVerdict classify_conditions(const SampledCoefficients& s);
ConditionVerdict classify_conditions(const HalanayInput& input);

/// lambda* = min over grid of lambda(t); w0 = c* / sigma (bounded gap) or
/// c* / ((1 - p) a0) (ratio). Throws InfeasibleError if the verdict is None
/// or any grid point has a(t) <= sum b_k(t).
HalanayCertificate certify(const SampledCoefficients& s, FractionalOrder alpha, double M);
HalanayCertificate certify(const HalanayInput& input, double M);

/// w0 + M E_alpha(-lambda* t^alpha).
double envelope(const HalanayCertificate& cert, FractionalOrder alpha, double t);

}  // namespace hcert::halanay
