#include "hcert/fdde.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <sstream>

#include "hcert/errors.hpp"

namespace hcert::fdde {
namespace {

constexpr double kMaxSteps = 1e7;
// Below this index the weight differences are formed directly; above it the
// binomial series avoids cancellation between nearly equal powers.
constexpr std::size_t kSeriesFrom = 8;

// (m+1)^a - m^a
double rect_weight(double a, std::size_t m) {
  if (m == 0) return 1.0;
  const double dm = static_cast<double>(m);
  return std::pow(dm, a) * std::expm1(a * std::log1p(1.0 / dm));
}

// sum_{k >= k0} coef_k u^k with coef_k = binom(e, k) scaled by the caller
template <typename Coef>
double binomial_tail(double u, int k0, Coef coef) {
  double sum = 0.0;
  double uk = std::pow(u, k0);
  for (int k = k0; k < 200; ++k) {
    const double term = coef(k) * uk;
    sum += term;
    if (std::abs(term) <= 1e-18 * std::abs(sum)) break;
    uk *= u;
  }
  return sum;
}

std::vector<double> binomials(double e, int n) {
  std::vector<double> c(static_cast<std::size_t>(n) + 1);
  c[0] = 1.0;
  for (int k = 1; k <= n; ++k) c[k] = c[k - 1] * (e - (k - 1)) / k;
  return c;
}

// (m+2)^(a+1) + m^(a+1) - 2 (m+1)^(a+1)
double trap_weight(double a, std::size_t m, const std::vector<double>& binom_a1) {
  const double e = a + 1.0;
  const double dm = static_cast<double>(m);
  if (m < kSeriesFrom) {
    return std::pow(dm + 2.0, e) + std::pow(dm, e) - 2.0 * std::pow(dm + 1.0, e);
  }
  const double u = 1.0 / (dm + 1.0);
  // (1+u)^e + (1-u)^e - 2 keeps only the even powers, twice
  const double s = binomial_tail(u, 2, [&](int k) { return (k % 2 == 0) ? 2.0 * binom_a1[k] : 0.0; });
  return std::pow(dm + 1.0, e) * s;
}

// n^(a+1) - (n - a)(n+1)^a, the corrector weight of the initial node
double first_weight(double a, std::size_t n, const std::vector<double>& binom_a) {
  const double dn = static_cast<double>(n);
  if (n < kSeriesFrom) return std::pow(dn, a + 1.0) - (dn - a) * std::pow(dn + 1.0, a);
  const double v = 1.0 / dn;
  const double s = binomial_tail(v, 2, [&](int k) { return binom_a[k] - a * binom_a[k - 1]; });
  return -std::pow(dn, a + 1.0) * s;
}

struct NodeData {
  Eigen::MatrixXd A;
  Eigen::MatrixXd B;
  double arg = 0.0;  // t - q(t)
};

}  // namespace

void SolverConfig::validate() const {
  if (!(h > 0.0) || !std::isfinite(h)) throw InputError("solver.h must be positive");
  if (!(t_end > 0.0) || !std::isfinite(t_end)) throw InputError("solver.t_end must be positive");
  if (!(h < t_end)) throw InputError("solver.h must be smaller than solver.t_end");
  if (t_end / h > kMaxSteps) throw InputError("solver.t_end / solver.h exceeds 1e7 steps");
  if (corrector_iters < 1) throw InputError("solver.corrector_iters must be >= 1");
}

std::size_t SolverConfig::steps() const {
  validate();
  return static_cast<std::size_t>(std::ceil(t_end / h - 1e-9));
}

std::vector<double> Trajectory::component(std::size_t i) const {
  std::vector<double> out(x.size());
  for (std::size_t n = 0; n < x.size(); ++n) out[n] = x[n](static_cast<Eigen::Index>(i));
  return out;
}

Trajectory solve(const DelaySystem& sys, const SolverConfig& cfg) {
  sys.validate();
  const std::size_t N = cfg.steps();
  const double h = cfg.h;
  const double a = sys.alpha.value();
  const auto d = static_cast<Eigen::Index>(sys.dim);

  Trajectory tr;
  tr.h = h;
  tr.t.resize(N + 1);
  for (std::size_t n = 0; n <= N; ++n) tr.t[n] = static_cast<double>(n) * h;

  auto node_data = [&](std::size_t n) {
    const double t = tr.t[n];
    const double qt = sys.q(t);
    if (qt < -1e-12 || qt > sys.tau + 1e-12) {
      std::ostringstream os;
      os << "delay q(" << t << ") = " << qt << " outside [0, tau=" << sys.tau << "]";
      throw InputError(os.str());
    }
    return NodeData{sys.A_at(t), sys.B_at(t), t - qt};
  };

  const std::vector<double> binom_a = binomials(a, 200);
  const std::vector<double> binom_a1 = binomials(a + 1.0, 200);
  std::vector<double> bw(N);
  std::vector<double> cw(N);
  for (std::size_t m = 0; m < N; ++m) {
    bw[m] = rect_weight(a, m);
    cw[m] = trap_weight(a, m, binom_a1);
  }
  const double pred_scale = std::pow(h, a) / std::tgamma(a + 1.0);
  const double corr_scale = std::pow(h, a) / std::tgamma(a + 2.0);

  Eigen::MatrixXd F(d, static_cast<Eigen::Index>(N + 1));
  tr.x.reserve(N + 1);
  tr.rhs.reserve(N + 1);
  tr.delayed.reserve(N + 1);

  const Eigen::VectorXd x0 = sys.phi_at(0.0);
  {
    const NodeData nd = node_data(0);
    const Eigen::VectorXd xd = sys.phi_at(std::min(nd.arg, 0.0));
    F.col(0) = nd.A * x0 + nd.B * xd;
    tr.x.push_back(x0);
    tr.rhs.push_back(F.col(0));
    tr.delayed.push_back(xd);
  }

  for (std::size_t n = 0; n < N; ++n) {
    const std::size_t n1 = n + 1;
    const NodeData nd = node_data(n1);

    // history part of both quadratures; the corrector's j = 0 weight is special
    Eigen::VectorXd pred_sum = Eigen::VectorXd::Zero(d);
    Eigen::VectorXd corr_sum = first_weight(a, n, binom_a) * F.col(0);
    pred_sum += bw[n] * F.col(0);
    for (std::size_t j = 1; j <= n; ++j) {
      const auto fj = F.col(static_cast<Eigen::Index>(j));
      pred_sum += bw[n - j] * fj;
      corr_sum += cw[n - j] * fj;
    }

    // delayed state at t_{n+1}; 'current' is the iterate for x_{n+1}
    bool flagged = false;
    auto delayed_at = [&](const Eigen::VectorXd& current) -> Eigen::VectorXd {
      if (nd.arg <= 0.0) return sys.phi_at(nd.arg);
      const double u = nd.arg / h;
      const auto k = static_cast<std::size_t>(std::floor(u));
      const double frac = u - static_cast<double>(k);
      if (k >= n1) return current;
      if (k + 1 <= n) return (1.0 - frac) * tr.x[k] + frac * tr.x[k + 1];
      if (frac == 0.0) return tr.x[n];
      if (cfg.strict_delay) {
        std::ostringstream os;
        os << "step size " << h << " is not below the delay at t=" << tr.t[n1]
           << "; the delayed argument lies past the computed history";
        throw InputError(os.str());
      }
      flagged = true;
      return (1.0 - frac) * tr.x[n] + frac * current;
    };

    Eigen::VectorXd x = x0 + pred_scale * pred_sum;
    Eigen::VectorXd xd;
    Eigen::VectorXd f;
    for (int it = 0; it < cfg.corrector_iters; ++it) {
      xd = delayed_at(x);
      f = nd.A * x + nd.B * xd;
      x = x0 + corr_scale * (corr_sum + f);
    }
    xd = delayed_at(x);
    f = nd.A * x + nd.B * xd;
    if (!x.allFinite() || !f.allFinite()) {
      std::ostringstream os;
      os << "solution is no longer finite at t=" << tr.t[n1];
      throw OverflowError(os.str());
    }
    F.col(static_cast<Eigen::Index>(n1)) = f;
    tr.x.push_back(x);
    tr.rhs.push_back(f);
    tr.delayed.push_back(xd);
    if (flagged) tr.flagged_nodes.push_back(n1);
  }

  tr.norm_l1.resize(N + 1);
  tr.norm_l2.resize(N + 1);
  for (std::size_t n = 0; n <= N; ++n) {
    tr.norm_l1[n] = tr.x[n].lpNorm<1>();
    tr.norm_l2[n] = tr.x[n].norm();
  }
  return tr;
}

double caputo_l1(std::span<const double> samples, double h, mlf::FractionalOrder alpha,
                 std::size_t node) {
  if (node < 1 || node >= samples.size()) {
    std::ostringstream os;
    os << "caputo_l1: node " << node << " outside [1, " << samples.size() << ")";
    throw InputError(os.str());
  }
  if (!(h > 0.0)) throw InputError("caputo_l1: h must be positive");
  const double e = 1.0 - alpha.value();
  double sum = 0.0;
  for (std::size_t k = 0; k < node; ++k) {
    sum += rect_weight(e, k) * (samples[node - k] - samples[node - k - 1]);
  }
  return sum * std::pow(h, -alpha.value()) / std::tgamma(2.0 - alpha.value());
}

EnvelopeCheck check_envelope(const Trajectory& traj, Norm norm,
                             const std::function<double(double)>& envelope, double tolerance) {
  EnvelopeCheck out;
  out.tolerance = tolerance;
  const auto& values = norm == Norm::L1 ? traj.norm_l1 : traj.norm_l2;
  out.envelope.resize(traj.size());
  out.ratio.resize(traj.size());
  for (std::size_t n = 0; n < traj.size(); ++n) {
    const double env = envelope(traj.t[n]);
    double r = 0.0;
    if (env > 0.0) {
      r = values[n] / env;
    } else if (values[n] > 0.0) {
      r = std::numeric_limits<double>::infinity();
    }
    out.envelope[n] = env;
    out.ratio[n] = r;
    out.max_ratio = std::max(out.max_ratio, r);
    if (!out.first_violation_t && r > 1.0 + tolerance) out.first_violation_t = traj.t[n];
  }
  return out;
}

double lyapunov_check(const Trajectory& traj, mlf::FractionalOrder alpha) {
  std::vector<double> W(traj.size());
  for (std::size_t n = 0; n < traj.size(); ++n) W[n] = traj.x[n].squaredNorm();
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t n = 1; n < traj.size(); ++n) {
    const double v = caputo_l1(W, traj.h, alpha, n) - 2.0 * traj.x[n].dot(traj.rhs[n]);
    worst = std::max(worst, v);
  }
  return traj.size() > 1 ? worst : 0.0;
}

void write_csv(std::ostream& os, const Trajectory& traj, const EnvelopeCheck* check) {
  const std::size_t d = traj.dim();
  os << 't';
  for (std::size_t i = 1; i <= d; ++i) os << ",x" << i;
  os << ",norm_l1,norm_l2,envelope,ratio\n";
  char buf[32];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    os << buf;
  };
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t n = 0; n < traj.size(); ++n) {
    put(traj.t[n]);
    for (std::size_t i = 0; i < d; ++i) {
      os << ',';
      put(traj.x[n](static_cast<Eigen::Index>(i)));
    }
    os << ',';
    put(traj.norm_l1[n]);
    os << ',';
    put(traj.norm_l2[n]);
    os << ',';
    put(check ? check->envelope[n] : nan);
    os << ',';
    put(check ? check->ratio[n] : nan);
    os << '\n';
  }
}

}  // namespace hcert::fdde
