#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "hcert/config.hpp"
#include "hcert/errors.hpp"
#include "hcert/expr.hpp"
#include "hcert/fdde.hpp"
#include "hcert/halanay.hpp"
#include "hcert/lmi.hpp"
#include "hcert/mlf.hpp"
#include "hcert/report.hpp"
#include "hcert/run.hpp"

namespace py = pybind11;
using namespace hcert;

namespace {

py::dict trajectory_dict(const fdde::Trajectory& tr) {
  const auto n = static_cast<Eigen::Index>(tr.size());
  const auto d = static_cast<Eigen::Index>(tr.dim());
  Eigen::MatrixXd x(n, d);
  for (Eigen::Index i = 0; i < n; ++i) x.row(i) = tr.x[static_cast<std::size_t>(i)].transpose();
  py::dict out;
  out["t"] = Eigen::Map<const Eigen::VectorXd>(tr.t.data(), n).eval();
  out["x"] = x;
  out["norm_l1"] = Eigen::Map<const Eigen::VectorXd>(tr.norm_l1.data(), n).eval();
  out["norm_l2"] = Eigen::Map<const Eigen::VectorXd>(tr.norm_l2.data(), n).eval();
  out["flagged_nodes"] = tr.flagged_nodes;
  return out;
}

py::tuple run_result(const cli::RunResult& r) {
  return py::make_tuple(r.exit_code, cli::dump_report(r.report));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Mittag-Leffler stability certificates for fractional delay systems";
  m.attr("__version__") = std::string(cli::kToolVersion);

  py::register_exception<InfeasibleError>(m, "InfeasibleError", PyExc_RuntimeError);
  py::register_exception<ConvergenceError>(m, "ConvergenceError", PyExc_RuntimeError);

  m.def("mittag_leffler", py::vectorize([](double alpha, double beta, double x) {
          return mlf::mittag_leffler(alpha, beta, x);
        }),
        py::arg("alpha"), py::arg("beta"), py::arg("x"), "E_{alpha,beta}(x); broadcasts over arrays");
  m.def("mittag_leffler_deriv", py::vectorize([](double alpha, double x) {
          return mlf::mittag_leffler_deriv(alpha, x);
        }),
        py::arg("alpha"), py::arg("x"), "d/dx E_alpha(x) = E_{alpha,alpha}(x) / alpha");

  py::class_<expr::TimeExpr>(m, "TimeExpr")
      .def(py::init([](const std::string& text, const std::string& var) { return expr::TimeExpr::parse(text, var); }),
           py::arg("text"), py::arg("var") = "t")
      .def("__call__", &expr::TimeExpr::eval)
      .def("is_constant", &expr::TimeExpr::is_constant)
      .def("__str__", &expr::TimeExpr::to_string)
      .def("__repr__", [](const expr::TimeExpr& e) { return "TimeExpr('" + e.to_string() + "')"; })
      .def(py::self == py::self);

  m.def(
      "lambda_at",
      [](double alpha, double a, const std::vector<double>& b, const std::vector<double>& q) {
        return halanay::lambda_at(mlf::FractionalOrder(alpha), a, b, q);
      },
      py::arg("alpha"), py::arg("a"), py::arg("b"), py::arg("q"),
      "positive root of lambda - a + sum b_k / E_alpha(-lambda q_k^alpha)");
  m.def(
      "h_value",
      [](double alpha, double a, const std::vector<double>& b, const std::vector<double>& q, double lam) {
        return halanay::h_value(mlf::FractionalOrder(alpha), a, b, q, lam);
      },
      py::arg("alpha"), py::arg("a"), py::arg("b"), py::arg("q"), py::arg("lam"));

  m.def("lmi_block", &lmi::lmi_block, py::arg("A"), py::arg("B"), py::arg("gamma"), py::arg("sigma"));
  m.def("jacobi_eigenvalues", &lmi::jacobi_eigenvalues, py::arg("S"), "ascending eigenvalues of a symmetric matrix");
  m.def("max_eigen_sym", &lmi::max_eigen_sym, py::arg("S"));

  m.def(
      "load_config",
      [](const std::filesystem::path& path) { return cli::dump_report(cli::to_json(cli::load_config(path))); },
      py::arg("path"), "validated config in canonical JSON form");

  m.def(
      "solve",
      [](const std::filesystem::path& config, std::optional<double> t_end, std::optional<double> h) {
        const cli::RunConfig cfg = cli::load_config(config);
        if (!cfg.has_state_system()) throw InputError("analysis halanay-scalar has no state system to solve");
        fdde::SolverConfig sc = cfg.solver_config();
        if (t_end) sc.t_end = *t_end;
        if (h) sc.h = *h;
        sc.validate();
        fdde::Trajectory tr;
        {
          py::gil_scoped_release release;
          tr = fdde::solve(cfg.system(), sc);
        }
        return trajectory_dict(tr);
      },
      py::arg("config"), py::arg("t_end") = py::none(), py::arg("h") = py::none(),
      "integrate the system of a config file; returns t, x, norm_l1, norm_l2");

  for (const char* name : {"certify", "simulate", "verify"}) {
    const std::string cmd = name;
    m.def(
        name,
        [cmd](const std::filesystem::path& config, const std::filesystem::path& out_dir) {
          const cli::RunConfig cfg = cli::load_config(config);
          cli::RunResult r;
          {
            py::gil_scoped_release release;
            if (cmd == "certify") r = cli::certify(cfg, out_dir);
            else if (cmd == "simulate") r = cli::simulate(cfg, out_dir);
            else r = cli::verify(cfg, out_dir);
          }
          return run_result(r);
        },
        py::arg("config"), py::arg("out_dir") = ".", "returns (exit_code, report_json)");
  }

  m.def(
      "run_command",
      [](const std::string& command, const std::filesystem::path& config, const std::filesystem::path& out_dir) {
        std::ostringstream out, err;
        int code = 0;
        {
          py::gil_scoped_release release;
          code = cli::run_command(command, config, out_dir, out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("command"), py::arg("config"), py::arg("out_dir") = ".",
      "same as the command-line tool; returns (exit_code, stdout, stderr)");

  m.attr("EXIT_PASS") = cli::kExitPass;
  m.attr("EXIT_INPUT_ERROR") = cli::kExitInputError;
  m.attr("EXIT_VIOLATION") = cli::kExitViolation;
}
