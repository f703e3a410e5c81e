#include "hcert/run.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>

#include "hcert/errors.hpp"
#include "hcert/fdde.hpp"
#include "hcert/mlf.hpp"
#include "hcert/positivity.hpp"
#include "hcert/report.hpp"

namespace hcert::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// Outcome of the certification step shared by all three commands.
struct Certification {
  json verdict;
  std::optional<halanay::HalanayCertificate> cert;
  fdde::Norm norm = fdde::Norm::L1;
  bool sqrt_envelope = false;
  bool scalar = false;  // bounds the scalar function itself, not a state norm
  std::string diagnostics;

  std::function<double(double)> envelope(mlf::FractionalOrder alpha) const {
    const halanay::HalanayCertificate c = *cert;
    if (sqrt_envelope) return [c, alpha](double t) { return lmi::l2_envelope(c, alpha, t); };
    return [c, alpha](double t) { return halanay::envelope(c, alpha, t); };
  }
};

json certificate_json(const Certification& c, double alpha) {
  if (!c.cert) return nullptr;
  const auto& k = *c.cert;
  json j = {{"lambda_star", k.lambda_star},
            {"w0", k.w0},
            {"M", k.M},
            {"alpha", alpha},
            {"norm", c.scalar ? "value" : c.norm == fdde::Norm::L1 ? "l1" : "l2"},
            {"envelope", c.sqrt_envelope ? "sqrt(w0 + M*E_alpha(-lambda_star*t^alpha))"
                                         : "w0 + M*E_alpha(-lambda_star*t^alpha)"},
            {"case", std::string(halanay::to_string(k.verdict.case_tag))},
            {"residual_max", k.residual_max},
            {"grid_argmin", k.grid_argmin},
            {"w0_gap", k.w0_gap ? json(*k.w0_gap) : json(nullptr)},
            {"w0_ratio", k.w0_ratio ? json(*k.w0_ratio) : json(nullptr)}};
  return j;
}

json condition_json(const halanay::ConditionVerdict& v) {
  return {{"case", std::string(halanay::to_string(v.case_tag))},
          {"sigma", v.sigma},
          {"a0", v.a0},
          {"p", v.p},
          {"c_star", v.c_star},
          {"a_bounded", v.a_bounded},
          {"gap_holds", v.gap_holds},
          {"ratio_holds", v.ratio_holds}};
}

Certification run_certification(const RunConfig& cfg) {
  Certification out;
  switch (cfg.analysis) {
    case Analysis::Positive: {
      const auto r = positivity::certify_positive(cfg.system(), cfg.scan, cfg.a_bounded, cfg.amplitude);
      const auto& v = r.verdict;
      out.verdict = {{"kind", "positivity"},
                     {"metzler_ok", v.metzler_ok},
                     {"nonneg_ok", v.nonneg_ok},
                     {"case", std::string(halanay::to_string(v.case_tag))},
                     {"a0", v.a0},
                     {"p", v.p},
                     {"sigma", v.sigma},
                     {"a_bounded", v.a_bounded},
                     {"ratio_route_ok", v.ratio_route_ok},
                     {"gap_route_ok", v.gap_route_ok},
                     {"M_sampled", r.M_sampled}};
      out.cert = r.certificate;
      out.norm = fdde::Norm::L1;
      out.diagnostics = r.diagnostics;
      break;
    }
    case Analysis::Lmi: {
      const lmi::LmiInput in = cfg.lmi_input();
      const auto r = lmi::certify_lmi(in, initial_sup_sq(in.sys));
      out.verdict = {{"kind", "lmi"},
                     {"feasible", r.feasible},
                     {"worst_eigen", r.worst_eigen},
                     {"worst_t", r.worst_t},
                     {"tol", in.tol},
                     {"a0", r.a0},
                     {"p", r.p},
                     {"M2", r.M2}};
      if (r.certificate) out.verdict["halanay"] = condition_json(r.certificate->verdict);
      out.cert = r.certificate;
      out.norm = fdde::Norm::L2;
      out.sqrt_envelope = true;
      out.diagnostics = r.diagnostics;
      break;
    }
    case Analysis::HalanayScalar: {
      const halanay::HalanayInput in = cfg.halanay_input();
      const halanay::ConditionVerdict v = halanay::classify_conditions(in);
      out.verdict = condition_json(v);
      out.verdict["kind"] = "halanay";
      out.scalar = true;
      try {
        out.cert = halanay::certify(in, cfg.amplitude.value_or(1.0));
      } catch (const InfeasibleError& e) {
        out.diagnostics = e.what();
      }
      break;
    }
  }
  return out;
}

json base_report(const RunConfig& cfg, std::string_view command) {
  json r;
  r["tool"] = {{"name", std::string(kToolName)}, {"version", std::string(kToolVersion)}};
  r["command"] = std::string(command);
  r["analysis"] = std::string(to_string(cfg.analysis));
  r["alpha"] = cfg.alpha;
  if (cfg.has_state_system()) r["dim"] = cfg.dim;
  r["scan"] = {{"t_max", cfg.scan.t_max}, {"n_points", cfg.scan.n_points}};
  r["verdict"] = nullptr;
  r["certificate"] = nullptr;
  r["simulation"] = nullptr;
  r["envelope_check"] = nullptr;
  r["diagnostics"] = json::array();
  return r;
}

void write_text(const fs::path& path, const std::string& text, RunResult& res) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InputError("cannot write " + path.string());
  f << text;
  if (!f) throw InputError("failed writing " + path.string());
  res.written.push_back(path);
}

void finish(RunResult& res, const RunConfig& cfg, const fs::path& out_dir) {
  res.report["exit_code"] = res.exit_code;
  write_text(out_dir / cfg.output.report_path, dump_report(res.report), res);
}

void apply_certification(RunResult& res, const Certification& c, double alpha) {
  res.report["verdict"] = c.verdict;
  res.report["certificate"] = certificate_json(c, alpha);
  if (!c.diagnostics.empty()) res.report["diagnostics"].push_back(c.diagnostics);
}

// Solves, writes CSV and plot script, fills the simulation section.
// Returns the envelope check when a certificate is available.
std::optional<fdde::EnvelopeCheck> run_simulation(RunResult& res, const RunConfig& cfg,
                                                  const Certification& c, const fs::path& out_dir) {
  if (!cfg.has_state_system()) {
    throw InputError("analysis halanay-scalar has no state system to simulate");
  }
  const DelaySystem sys = cfg.system();
  const fdde::Trajectory traj = fdde::solve(sys, cfg.solver_config());
  std::optional<fdde::EnvelopeCheck> check;
  if (c.cert) check = fdde::check_envelope(traj, c.norm, c.envelope(sys.alpha), cfg.solver.tolerance);

  const fs::path csv = out_dir / cfg.output.csv_path;
  std::ostringstream os;
  fdde::write_csv(os, traj, check ? &*check : nullptr);
  write_text(csv, os.str(), res);
  fs::path script = csv;
  script.replace_extension(".gp");
  emit_plot_script(csv, script);
  res.written.push_back(script);

  json sim = {{"t_end", traj.t.back()},
              {"h", traj.h},
              {"steps", traj.size() - 1},
              {"corrector_iters", cfg.solver.corrector_iters},
              {"flagged_nodes", traj.flagged_nodes.size()},
              {"final_norm_l1", traj.norm_l1.back()},
              {"final_norm_l2", traj.norm_l2.back()},
              {"csv_path", csv.string()},
              {"plot_script", script.string()}};
  if (cfg.analysis == Analysis::Lmi) sim["lyapunov_max_violation"] = fdde::lyapunov_check(traj, sys.alpha);
  res.report["simulation"] = sim;
  if (!traj.flagged_nodes.empty()) {
    res.report["diagnostics"].push_back(
        "step size is not below the delay at some nodes; their delayed values used the current iterate");
  }
  if (check) {
    res.report["envelope_check"] = {
        {"norm", c.norm == fdde::Norm::L1 ? "l1" : "l2"},
        {"tolerance", check->tolerance},
        {"max_ratio", check->max_ratio},
        {"first_violation_t", check->first_violation_t ? json(*check->first_violation_t) : json(nullptr)},
        {"pass", check->pass()}};
  }
  return check;
}

}  // namespace

RunResult certify(const RunConfig& cfg, const fs::path& out_dir) {
  RunResult res;
  res.report = base_report(cfg, "certify");
  const Certification c = run_certification(cfg);
  apply_certification(res, c, cfg.alpha);
  res.exit_code = c.cert ? kExitPass : kExitViolation;
  finish(res, cfg, out_dir);
  return res;
}

RunResult simulate(const RunConfig& cfg, const fs::path& out_dir) {
  RunResult res;
  res.report = base_report(cfg, "simulate");
  if (!cfg.has_state_system()) throw InputError("analysis halanay-scalar has no state system to simulate");
  const Certification c = run_certification(cfg);
  apply_certification(res, c, cfg.alpha);
  run_simulation(res, cfg, c, out_dir);
  res.exit_code = kExitPass;
  finish(res, cfg, out_dir);
  return res;
}

RunResult verify(const RunConfig& cfg, const fs::path& out_dir) {
  RunResult res;
  res.report = base_report(cfg, "verify");
  if (!cfg.has_state_system()) throw InputError("analysis halanay-scalar has no state system to verify");
  const Certification c = run_certification(cfg);
  apply_certification(res, c, cfg.alpha);
  const auto check = run_simulation(res, cfg, c, out_dir);
  res.exit_code = (check && check->pass()) ? kExitPass : kExitViolation;
  if (!c.cert) res.report["diagnostics"].push_back("no certificate; envelope check skipped");
  finish(res, cfg, out_dir);
  return res;
}

int run_command(std::string_view command, const fs::path& config, const fs::path& out_dir,
                std::ostream& out, std::ostream& err) {
  try {
    const RunConfig cfg = load_config(config);
    RunResult res;
    if (command == "certify") res = certify(cfg, out_dir);
    else if (command == "simulate") res = simulate(cfg, out_dir);
    else if (command == "verify") res = verify(cfg, out_dir);
    else throw InputError("unknown command: " + std::string(command));

    for (const auto& d : res.report["diagnostics"]) err << d.get<std::string>() << '\n';
    const json& cert = res.report["certificate"];
    if (!cert.is_null()) {
      out << "certificate: case=" << cert["case"].get<std::string>()
          << " lambda*=" << cert["lambda_star"].get<double>() << " M=" << cert["M"].get<double>()
          << " w0=" << cert["w0"].get<double>() << '\n';
    } else {
      out << "no certificate\n";
    }
    const json& env = res.report["envelope_check"];
    if (!env.is_null()) {
      out << "envelope check: " << (env["pass"].get<bool>() ? "pass" : "FAIL")
          << " max_ratio=" << res.report["envelope_check"]["max_ratio"].get<double>() << '\n';
    }
    for (const auto& p : res.written) out << "wrote " << p.string() << '\n';
    return res.exit_code;
  } catch (const OverflowError& e) {
    err << "error: " << e.what() << '\n';
    return kExitViolation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  }
}

int run_mlf(double alpha, double beta, double x, std::ostream& out, std::ostream& err) {
  try {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", mlf::mittag_leffler(alpha, beta, x));
    out << buf << '\n';
    return kExitPass;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  }
}

void emit_plot_script(const fs::path& csv, const fs::path& script) {
  std::ifstream in(csv);
  if (!in) throw InputError("cannot open trajectory CSV: " + csv.string());
  std::string header;
  if (!std::getline(in, header) || header.rfind("t,", 0) != 0) {
    throw InputError("not a trajectory CSV (bad header): " + csv.string());
  }
  std::size_t cols = 1;
  for (char ch : header) cols += ch == ',' ? 1 : 0;
  if (cols < 6) throw InputError("trajectory CSV has too few columns: " + csv.string());
  const std::size_t d = cols - 5;
  const std::size_t env_col = d + 4;

  std::size_t rows = 0;
  bool has_envelope = false;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    ++rows;
    std::size_t pos = 0;
    for (std::size_t k = 1; k < env_col && pos != std::string::npos; ++k) pos = line.find(',', pos + 1);
    if (pos == std::string::npos) throw InputError("short row in trajectory CSV: " + csv.string());
    const double v = std::strtod(line.c_str() + pos + 1, nullptr);
    if (std::isfinite(v)) has_envelope = true;
  }
  if (rows == 0) throw InputError("trajectory CSV has no data rows: " + csv.string());

  const std::string name = csv.filename().string();
  std::ostringstream s;
  s << "# gnuplot script: state components of " << name << " against t\n"
    << "set datafile separator ','\n"
    << "set datafile missing 'nan'\n"
    << "set xlabel 't'\n"
    << "set ylabel 'x(t)'\n"
    << "set grid\n"
    << "set key outside right\n"
    << "plot '" << name << "' using 1:2 with lines title 'x1'";
  for (std::size_t i = 2; i <= d; ++i) {
    s << ", \\\n     '' using 1:" << (i + 1) << " with lines title 'x" << i << "'";
  }
  if (has_envelope) {
    s << ", \\\n     '' using 1:" << env_col << " with lines dashtype 2 lw 2 lc rgb 'black' title 'envelope'"
      << ", \\\n     '' using 1:(-$" << env_col << ") with lines dashtype 2 lw 2 lc rgb 'black' notitle";
  }
  s << '\n';

  if (script.has_parent_path()) fs::create_directories(script.parent_path());
  std::ofstream f(script);
  if (!f) throw InputError("cannot write plot script: " + script.string());
  f << s.str();
}

}  // namespace hcert::cli
