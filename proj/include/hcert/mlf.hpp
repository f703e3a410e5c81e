#pragma once

#include <string_view>

namespace hcert::mlf {

/// Fractional order alpha of a Caputo derivative, restricted to (0, 1].
class FractionalOrder {
 public:
  explicit FractionalOrder(double alpha);

  double value() const noexcept { return alpha_; }
  operator double() const noexcept { return alpha_; }

 private:
  double alpha_;
};

struct MlQuery {
  double alpha = 1.0;
  double beta = 1.0;
  double x = 0.0;
};

/// Two-parameter Mittag-Leffler function E_{alpha,beta}(x) for real x.
///
/// Accurate to about 1e-13 (absolute, or relative once |E| > 1) on x in
/// [-50, 5] for alpha in [0.1, 1] and beta in {1, alpha}; values near the
/// top of the double range on the positive axis lose a few more digits. Throws DomainError for alpha outside (0, 1],
/// beta <= 0 or non-finite x, and OverflowError when the value exceeds the
/// double range (large positive x with small alpha).
double mittag_leffler(const MlQuery& q);
double mittag_leffler(double alpha, double beta, double x);

/// Classical one-parameter function E_alpha(x) = E_{alpha,1}(x).
inline double mittag_leffler(FractionalOrder alpha, double x) {
  return mittag_leffler(alpha.value(), 1.0, x);
}

/// d/dx E_alpha(x) = E_{alpha,alpha}(x) / alpha.
double mittag_leffler_deriv(double alpha, double x);

/// Evaluation strategies. Selection is automatic in mittag_leffler(); the
/// explicit form exists so the seams between branches can be cross-checked.
enum class Branch {
  Exponential,  // alpha == 1, beta == 1
  Series,       // power series with adaptive truncation
  Asymptotic,   // algebraic expansion for large negative x
  Integral,     // Laplace-type integral for negative x, beta < 1 + alpha
};

std::string_view to_string(Branch b) noexcept;

/// Branch mittag_leffler() would use for this query.
Branch select_branch(const MlQuery& q);

/// Evaluate with a forced branch. Throws DomainError if the branch does not
/// apply to q (e.g. Asymptotic for x >= 0) and ConvergenceError if the
/// branch's own error control fails.
double evaluate_branch(Branch b, const MlQuery& q);

/// 1/Gamma(z) for real z; zero at the poles z = 0, -1, -2, ...
double reciprocal_gamma(double z);

}  // namespace hcert::mlf
