#include "hcert/mlf.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "hcert/errors.hpp"

namespace hcert::mlf {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kMaxSeriesTerms = 10000;
constexpr int kMaxAsymptoticTerms = 10000;
// Largest tolerated |term| of the series on the negative axis. Cancellation
// error is roughly eps * max|term|, so e^4 keeps it near 1e-14.
constexpr double kSeriesMaxLogTerm = 4.0;
constexpr double kSeriesRelTol = 1e-16;
constexpr double kAsymptoticRelTol = 1e-16;
// Double-exponential rules roughly square their error per level, so levels
// agreeing to 1e-10 already leave an error near 1e-17.
constexpr double kQuadratureTol = 1e-10;
constexpr double kLogDoubleMax = 709.78;

double log_gamma(double z) { return boost::math::lgamma(z); }

double sin_pi(double z) {
  const double r = std::fmod(z, 2.0);
  if (r == 0.0 || r == 1.0 || r == -1.0) return 0.0;
  return std::sin(kPi * r);
}

void validate(const MlQuery& q) {
  if (!(q.alpha > 0.0 && q.alpha <= 1.0)) {
    std::ostringstream os;
    os << "mittag_leffler: alpha must lie in (0, 1], got " << q.alpha;
    throw DomainError(os.str());
  }
  if (!(q.beta > 0.0) || !std::isfinite(q.beta)) {
    std::ostringstream os;
    os << "mittag_leffler: beta must be positive, got " << q.beta;
    throw DomainError(os.str());
  }
  if (!std::isfinite(q.x)) throw DomainError("mittag_leffler: argument must be finite");
}

// k-th Taylor term x^k / Gamma(alpha k + beta).
double series_term(double alpha, double beta, double x, int k) {
  if (k == 0) return reciprocal_gamma(beta);
  if (x == 0.0) return 0.0;
  const double z = alpha * k + beta;
  if (z < 170.0) {
    const double p = std::pow(x, k);
    if (std::isfinite(p)) return p / std::tgamma(z);
  }
  const double log_mag = k * std::log(std::abs(x)) - log_gamma(z);
  if (log_mag > kLogDoubleMax) return std::numeric_limits<double>::infinity();
  const double mag = std::exp(log_mag);
  return (x < 0.0 && (k % 2 == 1)) ? -mag : mag;
}

// True when no |term| of the series at x exceeds e^kSeriesMaxLogTerm. The
// log-magnitude is concave in k, so the walk stops at the peak or as soon as
// the bound is crossed.
bool series_safe(double alpha, double beta, double x) {
  if (x == 0.0) return true;
  const double lx = std::log(std::abs(x));
  double prev = -log_gamma(beta);
  if (prev > kSeriesMaxLogTerm) return false;
  for (int k = 1; k < kMaxSeriesTerms; ++k) {
    const double cur = k * lx - log_gamma(alpha * k + beta);
    if (cur > kSeriesMaxLogTerm) return false;
    if (cur < prev) return true;
    prev = cur;
  }
  return false;
}

double series(double alpha, double beta, double x) {
  // Neumaier-compensated partial sums.
  double sum = 0.0;
  double comp = 0.0;
  double prev_abs = std::numeric_limits<double>::infinity();
  for (int k = 0; k < kMaxSeriesTerms; ++k) {
    const double term = series_term(alpha, beta, x, k);
    if (!std::isfinite(term)) {
      std::ostringstream os;
      os << "mittag_leffler: E_{" << alpha << "," << beta << "}(" << x
         << ") exceeds the double range";
      throw OverflowError(os.str());
    }
    const double s = sum + term;
    if (std::abs(sum) >= std::abs(term)) {
      comp += (sum - s) + term;
    } else {
      comp += (term - s) + sum;
    }
    sum = s;
    const double a = std::abs(term);
    if (k > 0 && a <= prev_abs && a < kSeriesRelTol * (std::abs(sum) + 1.0)) {
      const double result = sum + comp;
      if (!std::isfinite(result)) throw OverflowError("mittag_leffler: series overflow");
      return result;
    }
    prev_abs = a;
  }
  throw ConvergenceError("mittag_leffler: series did not converge within the term cap");
}

struct AsymptoticResult {
  bool converged = false;
  double value = 0.0;
};

AsymptoticResult asymptotic(double alpha, double beta, double y) {
  AsymptoticResult out;
  if (alpha >= 1.0 || y <= 0.0) return out;
  const double log_y = std::log(y);
  double sum = 0.0;
  double leading = 0.0;
  double prev_bound = std::numeric_limits<double>::infinity();
  for (int k = 1; k < kMaxAsymptoticTerms; ++k) {
    const double z = beta - alpha * k;
    // |term| itself while z > 0; past that the bound Gamma(1 - z) y^{-k} / pi,
    // which is |term| / |sin(pi z)| and also covers the vanishing pole terms.
    double term = 0.0;
    double bound = 0.0;
    if (z > 0.0) {
      term = reciprocal_gamma(z) * std::exp(-k * log_y);
      bound = std::abs(term);
    } else {
      const double w = 1.0 - z;
      bound = w < 171.0 ? std::tgamma(w) * std::exp(-k * log_y) / kPi
                        : std::exp(log_gamma(w) - k * log_y) / kPi;
      term = sin_pi(z) * bound;
    }
    if (k % 2 == 0) term = -term;
    if (leading == 0.0 && term != 0.0) leading = std::abs(term);
    sum += term;
    if (leading > 0.0 && bound < kAsymptoticRelTol * leading) {
      out.converged = true;
      out.value = sum;
      return out;
    }
    if (z < 0.0 && bound > prev_bound) return out;  // past the smallest term
    if (z < 0.0) prev_bound = bound;
  }
  return out;
}

// E_{alpha,beta}(-y) = t^{-beta} * Int_0^inf e^{-u} K(u/t) du with t = y^{1/alpha},
// K(r) = r^{alpha-beta} (r^alpha sin(beta pi) + sin((beta-alpha) pi))
//        / (pi (r^{2 alpha} + 2 r^alpha cos(alpha pi) + 1)).
// Valid for 0 < alpha < 1 and 0 < beta < 1 + alpha.
double integral(double alpha, double beta, double y) {
  const double t = std::pow(y, 1.0 / alpha);
  const double s_beta = sin_pi(beta);
  const double s_beta_alpha = sin_pi(beta - alpha);
  const double c_alpha = std::cos(kPi * alpha);
  auto integrand = [=](double u) -> double {
    if (u <= 0.0) return 0.0;
    const double lr = std::log(u / t);
    const double ra = std::exp(alpha * lr);
    const double den = ra * ra + 2.0 * ra * c_alpha + 1.0;
    const double num = std::exp((alpha - beta) * lr - u) * (ra * s_beta + s_beta_alpha);
    const double v = num / (kPi * den);
    return std::isfinite(v) ? v : 0.0;
  };

  thread_local boost::math::quadrature::tanh_sinh<double> finite_rule;
  thread_local boost::math::quadrature::exp_sinh<double> tail_rule;

  double total = 0.0;
  double err = 0.0;
  if (c_alpha < 0.0) {
    // Denominator is smallest where r^alpha = -cos(alpha pi); split there so
    // the near-pole peak sits on an endpoint of both pieces.
    const double split = t * std::pow(-c_alpha, 1.0 / alpha);
    double e1 = 0.0;
    double e2 = 0.0;
    total = finite_rule.integrate(integrand, 0.0, split, kQuadratureTol, &e1) +
            tail_rule.integrate(integrand, split, std::numeric_limits<double>::infinity(),
                                kQuadratureTol, &e2);
    err = e1 + e2;
  } else {
    total = tail_rule.integrate(integrand, 0.0, std::numeric_limits<double>::infinity(),
                                kQuadratureTol, &err);
  }
  if (!std::isfinite(total)) throw ConvergenceError("mittag_leffler: integral branch failed");
  return std::pow(t, -beta) * total;
}

}  // namespace

FractionalOrder::FractionalOrder(double alpha) : alpha_(alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    std::ostringstream os;
    os << "fractional order must lie in (0, 1], got " << alpha;
    throw DomainError(os.str());
  }
}

std::string_view to_string(Branch b) noexcept {
  switch (b) {
    case Branch::Exponential: return "exponential";
    case Branch::Series: return "series";
    case Branch::Asymptotic: return "asymptotic";
    case Branch::Integral: return "integral";
  }
  return "unknown";
}

double reciprocal_gamma(double z) {
  if (z > 0.0) {
    if (z < 171.0) return 1.0 / std::tgamma(z);
    return std::exp(-log_gamma(z));
  }
  if (z == std::floor(z)) return 0.0;
  // Reflection: 1/Gamma(z) = sin(pi z) Gamma(1 - z) / pi.
  const double s = sin_pi(z);
  const double w = 1.0 - z;
  if (w < 171.0) return s * std::tgamma(w) / kPi;
  const double mag = std::exp(log_gamma(w) + std::log(std::abs(s)) - std::log(kPi));
  return s < 0.0 ? -mag : mag;
}

Branch select_branch(const MlQuery& q) {
  validate(q);
  if (q.alpha == 1.0 && q.beta == 1.0) return Branch::Exponential;
  if (q.x >= 0.0) return Branch::Series;
  if (series_safe(q.alpha, q.beta, q.x)) return Branch::Series;
  if (q.alpha < 1.0) {
    if (asymptotic(q.alpha, q.beta, -q.x).converged) return Branch::Asymptotic;
    if (q.beta < 1.0 + q.alpha) return Branch::Integral;
  }
  std::ostringstream os;
  os << "mittag_leffler: no accurate evaluation available for alpha=" << q.alpha
     << ", beta=" << q.beta << ", x=" << q.x;
  throw DomainError(os.str());
}

double evaluate_branch(Branch b, const MlQuery& q) {
  validate(q);
  switch (b) {
    case Branch::Exponential:
      if (q.alpha != 1.0 || q.beta != 1.0) {
        throw DomainError("mittag_leffler: exponential branch needs alpha = beta = 1");
      }
      return std::exp(q.x);
    case Branch::Series:
      return series(q.alpha, q.beta, q.x);
    case Branch::Asymptotic: {
      if (q.x >= 0.0 || q.alpha >= 1.0) {
        throw DomainError("mittag_leffler: asymptotic branch needs x < 0 and alpha < 1");
      }
      const auto r = asymptotic(q.alpha, q.beta, -q.x);
      if (!r.converged) throw ConvergenceError("mittag_leffler: asymptotic expansion not converged");
      return r.value;
    }
    case Branch::Integral:
      if (q.x >= 0.0 || q.alpha >= 1.0 || q.beta >= 1.0 + q.alpha) {
        throw DomainError(
            "mittag_leffler: integral branch needs x < 0, alpha < 1, beta < 1 + alpha");
      }
      return integral(q.alpha, q.beta, -q.x);
  }
  throw DomainError("mittag_leffler: unknown branch");
}

double mittag_leffler(const MlQuery& q) {
  // Same choice as select_branch, without expanding the asymptotic sum twice.
  validate(q);
  if (q.alpha == 1.0 && q.beta == 1.0) return std::exp(q.x);
  if (q.x >= 0.0 || series_safe(q.alpha, q.beta, q.x)) return series(q.alpha, q.beta, q.x);
  if (q.alpha < 1.0) {
    const auto r = asymptotic(q.alpha, q.beta, -q.x);
    if (r.converged) return r.value;
    if (q.beta < 1.0 + q.alpha) return integral(q.alpha, q.beta, -q.x);
  }
  return evaluate_branch(select_branch(q), q);  // throws the usual domain error
}

double mittag_leffler(double alpha, double beta, double x) {
  return mittag_leffler(MlQuery{alpha, beta, x});
}

double mittag_leffler_deriv(double alpha, double x) {
  return mittag_leffler(MlQuery{alpha, alpha, x}) / alpha;
}

}  // namespace hcert::mlf
