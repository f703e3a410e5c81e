#include "hcert/halanay.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "hcert/errors.hpp"
#include "hcert/parallel.hpp"

namespace hcert::halanay {
namespace {

// Slack for sign tests on sampled coefficients (expression rounding).
constexpr double kSignSlack = 1e-12;
constexpr double kBisectionWidth = 1e-14;
constexpr int kBisectionMaxIter = 200;
constexpr int kNewtonSteps = 3;

void check_root_inputs(double a_val, std::span<const double> b_vals,
                       std::span<const double> q_vals) {
  if (b_vals.size() != q_vals.size()) {
    throw DomainError("lambda_at: b and q must have the same length");
  }
  if (!std::isfinite(a_val) || a_val < 0.0) throw DomainError("lambda_at: a must be >= 0");
  for (std::size_t k = 0; k < b_vals.size(); ++k) {
    if (!std::isfinite(b_vals[k]) || b_vals[k] < 0.0) {
      throw DomainError("lambda_at: b_k must be >= 0");
    }
    if (!std::isfinite(q_vals[k]) || q_vals[k] < 0.0) {
      throw DomainError("lambda_at: q_k must be >= 0");
    }
  }
}

double max_of(const std::vector<double>& v, std::size_t begin, std::size_t end) {
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t i = begin; i < end; ++i) m = std::max(m, v[i]);
  return m;
}

}  // namespace

std::string_view to_string(ConditionCase c) noexcept {
  switch (c) {
    case ConditionCase::BoundedGap: return "BOUNDED_GAP";
    case ConditionCase::Ratio: return "RATIO";
    case ConditionCase::None: return "NONE";
  }
  return "NONE";
}

void SampledCoefficients::validate() const {
  const std::size_t n = t.size();
  if (n < 2) throw InputError("sampled coefficients need at least two grid points");
  if (a.size() != n || c.size() != n) throw InputError("coefficient sample length mismatch");
  if (b.empty()) throw InputError("at least one delayed term (b_k, q_k) is required");
  if (b.size() != q.size()) throw InputError("b and q must list the same number of delays");
  if (!(tau > 0.0) || !std::isfinite(tau)) throw InputError("tau must be positive");
  for (std::size_t k = 0; k < b.size(); ++k) {
    if (b[k].size() != n || q[k].size() != n) throw InputError("coefficient sample length mismatch");
  }
  for (std::size_t i = 0; i < n; ++i) {
    std::ostringstream where;
    where << " at t=" << t[i];
    if (!std::isfinite(a[i]) || a[i] < -kSignSlack) throw InputError("a(t) < 0" + where.str());
    if (!std::isfinite(c[i]) || c[i] < -kSignSlack) throw InputError("c(t) < 0" + where.str());
    for (std::size_t k = 0; k < b.size(); ++k) {
      if (!std::isfinite(b[k][i]) || b[k][i] < -kSignSlack) {
        throw InputError("b_" + std::to_string(k + 1) + "(t) < 0" + where.str());
      }
      if (!std::isfinite(q[k][i]) || q[k][i] < -kSignSlack || q[k][i] > tau + kSignSlack) {
        throw InputError("q_" + std::to_string(k + 1) + "(t) outside [0, tau]" + where.str());
      }
    }
  }
}

SampledCoefficients sample(const HalanayInput& input) {
  input.scan.validate();
  if (input.b.empty() || input.b.size() != input.q.size()) {
    throw InputError("b and q must list the same number (>= 1) of delays");
  }
  SampledCoefficients s;
  s.t = input.scan.times();
  const std::size_t n = s.t.size();
  s.tau = input.tau;
  s.a_bounded = input.a_bounded;
  s.bounded_growth_tol = input.bounded_growth_tol;
  s.a.resize(n);
  s.c.resize(n);
  s.b.assign(input.b.size(), std::vector<double>(n));
  s.q.assign(input.q.size(), std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const double t = s.t[i];
    s.a[i] = input.a(t);
    s.c[i] = input.c(t);
    for (std::size_t k = 0; k < input.b.size(); ++k) {
      s.b[k][i] = input.b[k](t);
      s.q[k][i] = input.q[k](t);
    }
  }
  s.validate();
  return s;
}

double h_value(FractionalOrder alpha, double a_val, std::span<const double> b_vals,
               std::span<const double> q_vals, double lambda) {
  double h = lambda - a_val;
  for (std::size_t k = 0; k < b_vals.size(); ++k) {
    if (b_vals[k] == 0.0) continue;
    const double arg = -lambda * std::pow(q_vals[k], alpha.value());
    h += b_vals[k] / mlf::mittag_leffler(alpha, arg);
  }
  return h;
}

double h_derivative(FractionalOrder alpha, std::span<const double> b_vals,
                    std::span<const double> q_vals, double lambda) {
  double d = 1.0;
  for (std::size_t k = 0; k < b_vals.size(); ++k) {
    if (b_vals[k] == 0.0 || q_vals[k] == 0.0) continue;
    const double qa = std::pow(q_vals[k], alpha.value());
    const double e = mlf::mittag_leffler(alpha, -lambda * qa);
    const double e_aa = mlf::mittag_leffler(alpha.value(), alpha.value(), -lambda * qa);
    d += b_vals[k] * qa * e_aa / (alpha.value() * e * e);
  }
  return d;
}

double lambda_at(FractionalOrder alpha, double a_val, std::span<const double> b_vals,
                 std::span<const double> q_vals) {
  check_root_inputs(a_val, b_vals, q_vals);
  const double sum_b = std::accumulate(b_vals.begin(), b_vals.end(), 0.0);
  if (!(a_val > sum_b)) {
    std::ostringstream os;
    os << "lambda_at: a = " << a_val << " must exceed sum of b = " << sum_b;
    throw InfeasibleError(os.str());
  }
  // h(0) = sum b - a < 0 and h(a) = sum b_k / E(.) >= 0 bracket the root.
  double lo = 0.0;
  double hi = a_val;
  for (int it = 0; it < kBisectionMaxIter && hi - lo > kBisectionWidth; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (h_value(alpha, a_val, b_vals, q_vals, mid) < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  double lambda = 0.5 * (lo + hi);
  for (int it = 0; it < kNewtonSteps; ++it) {
    const double h = h_value(alpha, a_val, b_vals, q_vals, lambda);
    if (h == 0.0) break;
    const double next = lambda - h / h_derivative(alpha, b_vals, q_vals, lambda);
    if (!(next >= lo && next <= hi)) break;
    lambda = next;
  }
  return std::clamp(lambda, std::nextafter(0.0, 1.0), a_val);
}

ConditionVerdict classify_conditions(const SampledCoefficients& s) {
  s.validate();
  const std::size_t n = s.size();
  ConditionVerdict v;
  v.sigma = std::numeric_limits<double>::infinity();
  v.a0 = std::numeric_limits<double>::infinity();
  v.c_star = -std::numeric_limits<double>::infinity();
  double p = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double sum_b = 0.0;
    for (const auto& bk : s.b) sum_b += bk[i];
    v.sigma = std::min(v.sigma, s.a[i] - sum_b);
    v.a0 = std::min(v.a0, s.a[i]);
    v.c_star = std::max(v.c_star, s.c[i]);
    if (s.a[i] > 0.0) {
      p = std::max(p, sum_b / s.a[i]);
    } else {
      p = std::numeric_limits<double>::infinity();
    }
  }
  v.p = p;
  v.c_star = std::max(v.c_star, 0.0);

  if (s.a_bounded) {
    v.a_bounded = *s.a_bounded;
  } else {
    const std::size_t half = n / 2;
    const double first = max_of(s.a, 0, half);
    const double second = max_of(s.a, half, n);
    v.a_bounded = second <= first + s.bounded_growth_tol * std::abs(first);
  }

  v.gap_holds = v.a_bounded && v.sigma > 0.0;
  v.ratio_holds = v.a0 > 0.0 && v.p < 1.0;
  if (v.gap_holds) {
    v.case_tag = ConditionCase::BoundedGap;
  } else if (v.ratio_holds) {
    v.case_tag = ConditionCase::Ratio;
  } else {
    v.case_tag = ConditionCase::None;
  }
  return v;
}

ConditionVerdict classify_conditions(const HalanayInput& input) {
  return classify_conditions(sample(input));
}

HalanayCertificate certify(const SampledCoefficients& s, FractionalOrder alpha, double M) {
  if (!(M >= 0.0) || !std::isfinite(M)) throw InputError("certify: amplitude M must be >= 0");
  const ConditionVerdict verdict = classify_conditions(s);
  if (verdict.case_tag == ConditionCase::None) {
    std::ostringstream os;
    os << "certify: neither the bounded-gap nor the ratio hypothesis holds on the grid"
       << " (sigma=" << verdict.sigma << ", a0=" << verdict.a0 << ", p=" << verdict.p << ")";
    throw InfeasibleError(os.str());
  }

  const std::size_t n = s.size();
  const std::size_t m = s.delays();
  std::vector<double> lambdas(n);
  std::vector<double> residuals(n);
  parallel_for(n, [&](std::size_t i) {
    std::vector<double> b_i(m);
    std::vector<double> q_i(m);
    for (std::size_t k = 0; k < m; ++k) {
      b_i[k] = s.b[k][i];
      q_i[k] = std::max(0.0, s.q[k][i]);
    }
    const double a_i = std::max(0.0, s.a[i]);
    lambdas[i] = lambda_at(alpha, a_i, b_i, q_i);
    residuals[i] = std::abs(h_value(alpha, a_i, b_i, q_i, lambdas[i]));
  });

  HalanayCertificate cert;
  cert.verdict = verdict;
  cert.M = M;
  cert.t_max = s.t.back();
  cert.n_points = n;
  cert.lambda_star = lambdas[0];
  cert.grid_argmin = s.t[0];
  cert.residual_max = 0.0;
  // Fixed-order reduction keeps the certificate bit-reproducible.
  for (std::size_t i = 0; i < n; ++i) {
    if (lambdas[i] < cert.lambda_star) {
      cert.lambda_star = lambdas[i];
      cert.grid_argmin = s.t[i];
    }
    cert.residual_max = std::max(cert.residual_max, residuals[i]);
  }
  if (verdict.gap_holds) cert.w0_gap = verdict.c_star / verdict.sigma;
  if (verdict.ratio_holds) cert.w0_ratio = verdict.c_star / ((1.0 - verdict.p) * verdict.a0);
  cert.w0 = verdict.case_tag == ConditionCase::BoundedGap ? *cert.w0_gap : *cert.w0_ratio;
  return cert;
}

HalanayCertificate certify(const HalanayInput& input, double M) {
  return certify(sample(input), input.alpha, M);
}

double envelope(const HalanayCertificate& cert, FractionalOrder alpha, double t) {
  if (t < 0.0) throw DomainError("envelope: t must be >= 0");
  if (cert.M == 0.0) return cert.w0;
  return cert.w0 +
         cert.M * mlf::mittag_leffler(alpha, -cert.lambda_star * std::pow(t, alpha.value()));
}

}  // namespace hcert::halanay
