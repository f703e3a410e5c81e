#include "hcert/positivity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "hcert/errors.hpp"

namespace hcert::positivity {

StructureCheck structure_check(const DelaySystem& sys, const ScanGrid& grid) {
  sys.validate();
  grid.validate();
  StructureCheck out{true, true};
  const std::size_t d = sys.dim;
  for (std::size_t k = 0; k < grid.n_points; ++k) {
    const double t = grid.at(k);
    const Eigen::MatrixXd A = sys.A_at(t);
    const Eigen::MatrixXd B = sys.B_at(t);
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < d; ++j) {
        if (i != j && A(i, j) < -kSignTolerance) out.metzler_ok = false;
        if (B(i, j) < -kSignTolerance) out.nonneg_ok = false;
      }
    }
  }
  return out;
}

ColumnSums column_sums(const DelaySystem& sys, const ScanGrid& grid) {
  sys.validate();
  ColumnSums out;
  out.t = grid.times();
  out.a.resize(out.t.size());
  out.b.resize(out.t.size());
  for (std::size_t k = 0; k < out.t.size(); ++k) {
    const double t = out.t[k];
    out.a[k] = -sys.A_at(t).colwise().sum().maxCoeff();
    out.b[k] = sys.B_at(t).colwise().sum().maxCoeff();
  }
  return out;
}

PositivityResult certify_positive(const DelaySystem& sys, const ScanGrid& grid,
                                  std::optional<bool> a_bounded,
                                  std::optional<double> amplitude) {
  sys.validate_on(grid);
  const StructureCheck structure = structure_check(sys, grid);
  if (!structure.ok()) {
    std::string what = "positivity: structure check failed:";
    if (!structure.metzler_ok) what += " A(t) is not Metzler on the grid;";
    if (!structure.nonneg_ok) what += " B(t) is not nonnegative on the grid;";
    throw InputError(what);
  }

  PositivityResult result;
  PositivityVerdict& v = result.verdict;
  v.metzler_ok = structure.metzler_ok;
  v.nonneg_ok = structure.nonneg_ok;

  ColumnSums cs = column_sums(sys, grid);
  v.a_fun = cs.a;
  v.b_fun = cs.b;
  v.a0 = *std::min_element(cs.a.begin(), cs.a.end());
  result.M_sampled = initial_sup_l1(sys);

  if (!(v.a0 > 0.0)) {
    v.p = std::numeric_limits<double>::infinity();
    v.sigma = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < cs.t.size(); ++k) v.sigma = std::min(v.sigma, cs.a[k] - cs.b[k]);
    std::ostringstream os;
    os << "max column sum of A reaches " << -v.a0 << " >= 0; neither route applies";
    result.diagnostics = os.str();
    return result;
  }

  halanay::SampledCoefficients s;
  s.t = cs.t;
  s.a = cs.a;
  s.b = {cs.b};
  s.q = {std::vector<double>(cs.t.size())};
  for (std::size_t k = 0; k < cs.t.size(); ++k) s.q[0][k] = std::clamp(sys.q(cs.t[k]), 0.0, sys.tau);
  s.c.assign(cs.t.size(), 0.0);
  s.tau = sys.tau;
  s.a_bounded = a_bounded;

  const halanay::ConditionVerdict hv = halanay::classify_conditions(s);
  v.p = hv.p;
  v.sigma = hv.sigma;
  v.a_bounded = hv.a_bounded;
  v.ratio_route_ok = hv.ratio_holds;
  v.gap_route_ok = hv.gap_holds;
  v.case_tag = hv.case_tag;

  if (hv.case_tag == halanay::ConditionCase::None) {
    std::ostringstream os;
    os << "column-sum conditions fail on the grid: a0=" << v.a0 << ", p=" << v.p
       << ", sigma=" << v.sigma << ", a bounded=" << (v.a_bounded ? "yes" : "no");
    result.diagnostics = os.str();
    return result;
  }

  double M = result.M_sampled;
  if (amplitude) {
    if (!(*amplitude >= M * (1.0 - 1e-12))) {
      std::ostringstream os;
      os << "amplitude " << *amplitude << " is below the sampled sup ||phi||_1 = " << M;
      throw InputError(os.str());
    }
    M = *amplitude;
  }
  result.certificate = halanay::certify(s, sys.alpha, M);
  return result;
}

SplitInitial split_initial(const std::vector<Eigen::VectorXd>& phi_samples) {
  SplitInitial out;
  out.plus.reserve(phi_samples.size());
  out.minus.reserve(phi_samples.size());
  for (const auto& v : phi_samples) {
    out.plus.push_back(v.cwiseAbs());
    out.minus.push_back(-v.cwiseAbs());
  }
  return out;
}

std::pair<std::vector<expr::TimeExpr>, std::vector<expr::TimeExpr>> split_initial_exprs(
    const std::vector<expr::TimeExpr>& phi) {
  std::vector<expr::TimeExpr> plus;
  std::vector<expr::TimeExpr> minus;
  for (const auto& e : phi) {
    const std::string body = "abs(" + e.to_string() + ")";
    plus.push_back(expr::TimeExpr::parse(body, e.var_name()));
    minus.push_back(expr::TimeExpr::parse("-" + body, e.var_name()));
  }
  return {plus, minus};
}

}  // namespace hcert::positivity
