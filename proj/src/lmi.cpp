#include "hcert/lmi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "hcert/errors.hpp"
#include "hcert/parallel.hpp"

namespace hcert::lmi {
namespace {

constexpr double kSymmetryTol = 1e-12;
constexpr double kOffDiagonalTol = 1e-14;
constexpr int kMaxSweeps = 100;

}  // namespace

Eigen::MatrixXd lmi_block(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, double gamma,
                          double sigma) {
  if (A.rows() != A.cols() || B.rows() != B.cols() || A.rows() != B.rows()) {
    throw InputError("lmi_block: A and B must be square with equal dimension");
  }
  const Eigen::Index d = A.rows();
  Eigen::MatrixXd S(2 * d, 2 * d);
  Eigen::MatrixXd top_left = A.transpose() + A;
  top_left.diagonal().array() += gamma;
  // mirror the upper triangle so the block is bitwise symmetric
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = i + 1; j < d; ++j) top_left(j, i) = top_left(i, j);
  }
  S.topLeftCorner(d, d) = top_left;
  S.topRightCorner(d, d) = B;
  S.bottomLeftCorner(d, d) = B.transpose();
  S.bottomRightCorner(d, d) = -sigma * Eigen::MatrixXd::Identity(d, d);
  return S;
}

Eigen::VectorXd jacobi_eigenvalues(const Eigen::MatrixXd& S) {
  if (S.rows() != S.cols()) throw InputError("jacobi_eigenvalues: matrix must be square");
  const Eigen::Index n = S.rows();
  if (n == 0) return Eigen::VectorXd();
  if ((S - S.transpose()).cwiseAbs().maxCoeff() > kSymmetryTol) {
    throw InputError("jacobi_eigenvalues: matrix is not symmetric");
  }
  Eigen::MatrixXd a = 0.5 * (S + S.transpose());
  const double scale = a.norm();
  if (scale == 0.0) return Eigen::VectorXd::Zero(n);

  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    double off = 0.0;
    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    }
    if (std::sqrt(off) <= kOffDiagonalTol * scale) break;

    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        double t = 0.0;
        if (std::abs(theta) > 1e150) {
          t = 0.5 / theta;
        } else {
          t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        }
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          if (k == p || k == q) continue;
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = a(p, k) = c * akp - s * akq;
          a(k, q) = a(q, k) = s * akp + c * akq;
        }
        a(p, p) -= t * apq;
        a(q, q) += t * apq;
        a(p, q) = a(q, p) = 0.0;
      }
    }
  }
  Eigen::VectorXd eig = a.diagonal();
  std::sort(eig.data(), eig.data() + eig.size());
  return eig;
}

double max_eigen_sym(const Eigen::MatrixXd& S) {
  if (S.size() == 0) throw InputError("max_eigen_sym: empty matrix");
  return jacobi_eigenvalues(S).maxCoeff();
}

LmiReport certify_lmi(const LmiInput& input, double M2) {
  const DelaySystem& sys = input.sys;
  sys.validate_on(input.grid);
  if (!(M2 >= 0.0) || !std::isfinite(M2)) throw InputError("certify_lmi: M2 must be >= 0");

  const std::vector<double> ts = input.grid.times();
  const std::size_t n = ts.size();
  std::vector<double> eig(n);
  std::vector<double> gam(n);
  std::vector<double> sig(n);
  parallel_for(n, [&](std::size_t i) {
    const double t = ts[i];
    gam[i] = input.gamma(t);
    sig[i] = input.sigma(t);
    if (gam[i] < -1e-12 || sig[i] < -1e-12) {
      std::ostringstream os;
      os << "certify_lmi: gamma and sigma must be >= 0 (t=" << t << ")";
      throw InputError(os.str());
    }
    eig[i] = max_eigen_sym(lmi_block(sys.A_at(t), sys.B_at(t), gam[i], sig[i]));
  });

  LmiReport r;
  r.M2 = M2;
  r.worst_eigen = -std::numeric_limits<double>::infinity();
  r.a0 = std::numeric_limits<double>::infinity();
  r.p = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (eig[i] > r.worst_eigen) {
      r.worst_eigen = eig[i];
      r.worst_t = ts[i];
    }
    r.a0 = std::min(r.a0, gam[i]);
    r.p = gam[i] > 0.0 ? std::max(r.p, sig[i] / gam[i]) : std::numeric_limits<double>::infinity();
  }
  r.feasible = r.worst_eigen <= input.tol && r.a0 > 0.0 && r.p < 1.0;
  if (!r.feasible) {
    std::ostringstream os;
    if (r.worst_eigen > input.tol) {
      os << "block matrix not negative semidefinite at t=" << r.worst_t
         << " (largest eigenvalue " << r.worst_eigen << "); ";
    }
    if (!(r.a0 > 0.0)) os << "min gamma = " << r.a0 << " is not positive; ";
    if (!(r.p < 1.0)) os << "max sigma/gamma = " << r.p << " is not below 1; ";
    os << "consider the positivity route";
    r.diagnostics = os.str();
    return r;
  }

  halanay::SampledCoefficients s;
  s.t = ts;
  s.a = gam;
  s.b = {sig};
  s.q = {std::vector<double>(n)};
  for (std::size_t i = 0; i < n; ++i) s.q[0][i] = std::clamp(sys.q(ts[i]), 0.0, sys.tau);
  s.c.assign(n, 0.0);
  s.tau = sys.tau;
  r.certificate = halanay::certify(s, sys.alpha, M2);
  return r;
}

double l2_envelope(const halanay::HalanayCertificate& cert, mlf::FractionalOrder alpha,
                   double t) {
  return std::sqrt(halanay::envelope(cert, alpha, t));
}

}  // namespace hcert::lmi
