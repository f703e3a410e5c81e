#include "rk4_delay.hpp"

#include <cmath>
#include <stdexcept>

namespace oracle {

Rk4Result rk4_method_of_steps(const ClassicalDelaySystem& sys, double t_end, double h) {
  const auto n_steps = static_cast<std::size_t>(std::llround(t_end / h));
  Rk4Result r;
  std::vector<Eigen::VectorXd> dx;  // x' at the nodes, for Hermite interpolation

  auto history = [&](double s) -> Eigen::VectorXd {
    if (s <= 0.0) return sys.phi(s);
    const double u = s / h;
    auto k = static_cast<std::size_t>(std::floor(u));
    if (k + 1 >= r.x.size()) {
      if (k + 1 == r.x.size() && u - static_cast<double>(k) < 1e-12) return r.x[k];
      throw std::logic_error("rk4 oracle: delayed argument beyond computed history");
    }
    const double th = u - static_cast<double>(k);
    const double h00 = (1 + 2 * th) * (1 - th) * (1 - th);
    const double h10 = th * (1 - th) * (1 - th);
    const double h01 = th * th * (3 - 2 * th);
    const double h11 = th * th * (th - 1);
    return h00 * r.x[k] + h10 * h * dx[k] + h01 * r.x[k + 1] + h11 * h * dx[k + 1];
  };
  auto f = [&](double t, const Eigen::VectorXd& x) -> Eigen::VectorXd {
    return sys.A(t) * x + sys.B(t) * history(t - sys.q(t));
  };

  r.t.push_back(0.0);
  r.x.push_back(sys.phi(0.0));
  dx.push_back(f(0.0, r.x[0]));
  for (std::size_t n = 0; n < n_steps; ++n) {
    const double t = static_cast<double>(n) * h;
    const Eigen::VectorXd& x = r.x[n];
    const Eigen::VectorXd k1 = dx[n];
    const Eigen::VectorXd k2 = f(t + 0.5 * h, x + 0.5 * h * k1);
    const Eigen::VectorXd k3 = f(t + 0.5 * h, x + 0.5 * h * k2);
    const Eigen::VectorXd k4 = f(t + h, x + h * k3);
    r.t.push_back(static_cast<double>(n + 1) * h);
    r.x.push_back(x + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4));
    dx.push_back(f(r.t.back(), r.x.back()));
  }
  return r;
}

}  // namespace oracle
