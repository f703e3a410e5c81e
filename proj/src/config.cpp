#include "hcert/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace hcert::cli {
namespace {

using nlohmann::json;

std::string join_issues(const std::vector<std::string>& issues) {
  std::string out = "invalid config:";
  for (const auto& s : issues) out += "\n  " + s;
  return out;
}

class Reader {
 public:
  std::vector<std::string> issues;

  void fail(const std::string& path, const std::string& msg) { issues.push_back(path + ": " + msg); }

  const json* find(const json& obj, const std::string& key) const {
    auto it = obj.find(key);
    return it == obj.end() || it->is_null() ? nullptr : &*it;
  }

  std::optional<double> number(const json& obj, const std::string& key, const std::string& path,
                               bool required) {
    const json* v = find(obj, key);
    if (!v) {
      if (required) fail(path, "required field is missing");
      return std::nullopt;
    }
    if (!v->is_number()) {
      fail(path, "expected a number");
      return std::nullopt;
    }
    const double d = v->get<double>();
    if (!std::isfinite(d)) {
      fail(path, "must be finite");
      return std::nullopt;
    }
    return d;
  }

  std::optional<bool> boolean(const json& obj, const std::string& key, const std::string& path) {
    const json* v = find(obj, key);
    if (!v) return std::nullopt;
    if (!v->is_boolean()) {
      fail(path, "expected true or false");
      return std::nullopt;
    }
    return v->get<bool>();
  }

  std::optional<expr::TimeExpr> expression(const json& v, const std::string& path,
                                           std::string_view var) {
    try {
      if (v.is_number()) return expr::TimeExpr::constant(v.get<double>(), var);
      if (v.is_string()) return expr::TimeExpr::parse(v.get<std::string>(), var);
      fail(path, "expected an expression string or a number");
    } catch (const std::exception& e) {
      fail(path, e.what());
    }
    return std::nullopt;
  }

  std::optional<expr::TimeExpr> expression(const json& obj, const std::string& key,
                                           const std::string& path, bool required,
                                           std::string_view var = "t") {
    const json* v = find(obj, key);
    if (!v) {
      if (required) fail(path, "required field is missing");
      return std::nullopt;
    }
    return expression(*v, path, var);
  }

  /// A string/number or an array of them.
  std::vector<expr::TimeExpr> expression_list(const json& obj, const std::string& key,
                                              const std::string& path, bool required,
                                              std::string_view var = "t") {
    std::vector<expr::TimeExpr> out;
    const json* v = find(obj, key);
    if (!v) {
      if (required) fail(path, "required field is missing");
      return out;
    }
    if (!v->is_array()) {
      if (auto e = expression(*v, path, var)) out.push_back(*e);
      return out;
    }
    for (std::size_t i = 0; i < v->size(); ++i) {
      if (auto e = expression((*v)[i], path + "[" + std::to_string(i) + "]", var)) out.push_back(*e);
    }
    if (v->empty()) fail(path, "must not be empty");
    return out;
  }

  /// d x d matrix given as nested rows, a flat row-major list, or (d = 1) a scalar.
  std::vector<expr::TimeExpr> matrix(const json& obj, const std::string& key,
                                     std::optional<std::size_t> dim) {
    std::vector<expr::TimeExpr> out;
    const json* v = find(obj, key);
    if (!v) {
      fail(key, "required field is missing");
      return out;
    }
    if (!dim) return out;
    const std::size_t d = *dim;
    const std::size_t before = issues.size();
    if (!v->is_array()) {
      if (d != 1) {
        fail(key, "a scalar is only accepted when dim = 1");
        return out;
      }
      if (auto e = expression(*v, key, "t")) out.push_back(*e);
      return out;
    }
    const bool nested = !v->empty() && (*v)[0].is_array();
    if (nested) {
      if (v->size() != d) {
        fail(key, "expected " + std::to_string(d) + " rows, got " + std::to_string(v->size()));
        return {};
      }
      for (std::size_t i = 0; i < d; ++i) {
        const json& row = (*v)[i];
        const std::string rp = key + "[" + std::to_string(i) + "]";
        if (!row.is_array() || row.size() != d) {
          fail(rp, "expected a row of " + std::to_string(d) + " entries");
          continue;
        }
        for (std::size_t j = 0; j < d; ++j) {
          if (auto e = expression(row[j], rp + "[" + std::to_string(j) + "]", "t")) out.push_back(*e);
        }
      }
    } else {
      if (v->size() != d * d) {
        fail(key, "expected " + std::to_string(d * d) + " entries, got " + std::to_string(v->size()));
        return {};
      }
      for (std::size_t i = 0; i < v->size(); ++i) {
        if (auto e = expression((*v)[i], key + "[" + std::to_string(i) + "]", "t")) out.push_back(*e);
      }
    }
    if (issues.size() != before) out.clear();
    return out;
  }

  void unknown_keys(const json& obj, const std::string& prefix, const std::set<std::string>& known) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      if (!known.count(it.key())) fail(prefix + it.key(), "unknown field");
    }
  }
};

json expr_json(const expr::TimeExpr& e) { return e.to_string(); }

json expr_list_json(const std::vector<expr::TimeExpr>& v) {
  json out = json::array();
  for (const auto& e : v) out.push_back(expr_json(e));
  return out;
}

json matrix_json(const std::vector<expr::TimeExpr>& m, std::size_t d) {
  json out = json::array();
  for (std::size_t i = 0; i < d; ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < d; ++j) row.push_back(expr_json(m[i * d + j]));
    out.push_back(row);
  }
  return out;
}

}  // namespace

std::string_view to_string(Analysis a) noexcept {
  switch (a) {
    case Analysis::Positive: return "positive";
    case Analysis::Lmi: return "lmi";
    case Analysis::HalanayScalar: return "halanay-scalar";
  }
  return "?";
}

ConfigError::ConfigError(std::vector<std::string> issues)
    : InputError(join_issues(issues)), issues_(std::move(issues)) {}

RunConfig parse_config(const json& j) {
  if (!j.is_object()) throw ConfigError({"(root): expected a JSON object"});
  Reader r;
  RunConfig cfg;

  r.unknown_keys(j, "", {"name", "description", "analysis", "alpha", "dim", "tau", "A", "B", "q",
                         "phi", "gamma", "sigma", "a", "b", "c", "a_bounded", "amplitude", "scan",
                         "solver", "output"});

  if (const json* an = r.find(j, "analysis")) {
    const std::string s = an->is_string() ? an->get<std::string>() : "";
    if (s == "positive") cfg.analysis = Analysis::Positive;
    else if (s == "lmi") cfg.analysis = Analysis::Lmi;
    else if (s == "halanay-scalar") cfg.analysis = Analysis::HalanayScalar;
    else r.fail("analysis", "expected one of positive, lmi, halanay-scalar");
  } else {
    r.fail("analysis", "required field is missing");
  }

  if (auto a = r.number(j, "alpha", "alpha", true)) {
    if (*a > 0.0 && *a <= 1.0) cfg.alpha = *a;
    else r.fail("alpha", "must lie in (0, 1]");
  }
  if (auto t = r.number(j, "tau", "tau", true)) {
    if (*t > 0.0) cfg.tau = *t;
    else r.fail("tau", "must be positive");
  }

  if (cfg.has_state_system()) {
    std::optional<std::size_t> dim;
    if (const json* d = r.find(j, "dim")) {
      if (d->is_number_integer() && d->get<long long>() >= 1) dim = d->get<std::size_t>();
      else r.fail("dim", "expected an integer >= 1");
    } else {
      r.fail("dim", "required field is missing");
    }
    if (dim) cfg.dim = *dim;
    cfg.A = r.matrix(j, "A", dim);
    cfg.B = r.matrix(j, "B", dim);
    cfg.q = r.expression_list(j, "q", "q", true);
    if (cfg.q.size() > 1) r.fail("q", "state systems take a single delay");
    const std::size_t before_phi = r.issues.size();
    cfg.phi = r.expression_list(j, "phi", "phi", true, "s");
    if (dim && r.issues.size() == before_phi && cfg.phi.size() != *dim) {
      r.fail("phi", "expected " + std::to_string(*dim) + " entries");
    }
    if (cfg.analysis == Analysis::Lmi) {
      cfg.gamma = r.expression(j, "gamma", "gamma", true);
      cfg.sigma = r.expression(j, "sigma", "sigma", true);
    }
  } else {
    cfg.a = r.expression(j, "a", "a", true);
    cfg.b = r.expression_list(j, "b", "b", true);
    cfg.q = r.expression_list(j, "q", "q", true);
    cfg.c = r.expression(j, "c", "c", false);
    if (r.find(j, "b") && r.find(j, "q") && cfg.b.size() != cfg.q.size()) {
      r.fail("q", "expected one delay per b term");
    }
  }

  cfg.a_bounded = r.boolean(j, "a_bounded", "a_bounded");
  if (auto m = r.number(j, "amplitude", "amplitude", false)) {
    if (cfg.analysis == Analysis::Lmi) r.fail("amplitude", "not used by the lmi analysis (M comes from phi)");
    else if (*m >= 0.0) cfg.amplitude = *m;
    else r.fail("amplitude", "must be >= 0");
  }

  if (const json* scan = r.find(j, "scan")) {
    if (!scan->is_object()) {
      r.fail("scan", "expected an object");
    } else {
      r.unknown_keys(*scan, "scan.", {"t_max", "n_points"});
      if (auto t = r.number(*scan, "t_max", "scan.t_max", false)) {
        if (*t > 0.0) cfg.scan.t_max = *t;
        else r.fail("scan.t_max", "must be positive");
      }
      if (const json* n = r.find(*scan, "n_points")) {
        if (n->is_number_integer() && n->get<long long>() >= 2) cfg.scan.n_points = n->get<std::size_t>();
        else r.fail("scan.n_points", "expected an integer >= 2");
      }
    }
  }

  if (const json* sol = r.find(j, "solver")) {
    if (!sol->is_object()) {
      r.fail("solver", "expected an object");
    } else {
      r.unknown_keys(*sol, "solver.", {"t_end", "h", "tolerance", "corrector_iters", "strict_delay"});
      if (auto t = r.number(*sol, "t_end", "solver.t_end", false)) cfg.solver.t_end = *t;
      if (auto h = r.number(*sol, "h", "solver.h", false)) cfg.solver.h = *h;
      if (auto tol = r.number(*sol, "tolerance", "solver.tolerance", false)) {
        if (*tol >= 0.0) cfg.solver.tolerance = *tol;
        else r.fail("solver.tolerance", "must be >= 0");
      }
      if (const json* it = r.find(*sol, "corrector_iters")) {
        if (it->is_number_integer() && it->get<long long>() >= 1 && it->get<long long>() <= 100) {
          cfg.solver.corrector_iters = it->get<int>();
        } else {
          r.fail("solver.corrector_iters", "expected an integer in [1, 100]");
        }
      }
      if (auto s = r.boolean(*sol, "strict_delay", "solver.strict_delay")) cfg.solver.strict_delay = *s;
      try {
        cfg.solver_config().validate();
      } catch (const std::exception& e) {
        r.fail("solver", e.what());
      }
    }
  }

  if (const json* out = r.find(j, "output")) {
    if (!out->is_object()) {
      r.fail("output", "expected an object");
    } else {
      r.unknown_keys(*out, "output.", {"csv_path", "report_path"});
      for (const char* key : {"csv_path", "report_path"}) {
        if (const json* v = r.find(*out, key)) {
          if (!v->is_string() || v->get<std::string>().empty()) {
            r.fail(std::string("output.") + key, "expected a non-empty path string");
          } else {
            (std::string(key) == "csv_path" ? cfg.output.csv_path : cfg.output.report_path) =
                v->get<std::string>();
          }
        }
      }
    }
  }

  if (!r.issues.empty()) throw ConfigError(std::move(r.issues));
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config file: " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError("config " + path.string() + " is not valid JSON: " + e.what());
  }
  return parse_config(j);
}

json to_json(const RunConfig& cfg) {
  json j;
  j["analysis"] = std::string(to_string(cfg.analysis));
  j["alpha"] = cfg.alpha;
  j["tau"] = cfg.tau;
  if (cfg.has_state_system()) {
    j["dim"] = cfg.dim;
    j["A"] = matrix_json(cfg.A, cfg.dim);
    j["B"] = matrix_json(cfg.B, cfg.dim);
    j["q"] = expr_json(cfg.q.at(0));
    j["phi"] = expr_list_json(cfg.phi);
    if (cfg.gamma) j["gamma"] = expr_json(*cfg.gamma);
    if (cfg.sigma) j["sigma"] = expr_json(*cfg.sigma);
  } else {
    j["a"] = expr_json(*cfg.a);
    j["b"] = expr_list_json(cfg.b);
    j["q"] = expr_list_json(cfg.q);
    if (cfg.c) j["c"] = expr_json(*cfg.c);
  }
  if (cfg.a_bounded) j["a_bounded"] = *cfg.a_bounded;
  if (cfg.amplitude) j["amplitude"] = *cfg.amplitude;
  j["scan"] = {{"t_max", cfg.scan.t_max}, {"n_points", cfg.scan.n_points}};
  j["solver"] = {{"t_end", cfg.solver.t_end},
                 {"h", cfg.solver.h},
                 {"tolerance", cfg.solver.tolerance},
                 {"corrector_iters", cfg.solver.corrector_iters},
                 {"strict_delay", cfg.solver.strict_delay}};
  j["output"] = {{"csv_path", cfg.output.csv_path}, {"report_path", cfg.output.report_path}};
  return j;
}

DelaySystem RunConfig::system() const {
  if (!has_state_system()) throw InputError("analysis halanay-scalar has no state system");
  DelaySystem sys;
  sys.alpha = mlf::FractionalOrder(alpha);
  sys.dim = dim;
  sys.A = A;
  sys.B = B;
  sys.q = q.at(0);
  sys.tau = tau;
  sys.phi = phi;
  return sys;
}

halanay::HalanayInput RunConfig::halanay_input() const {
  if (analysis != Analysis::HalanayScalar) throw InputError("not a halanay-scalar config");
  halanay::HalanayInput in;
  in.alpha = mlf::FractionalOrder(alpha);
  in.a = *a;
  in.b = b;
  in.q = q;
  in.c = c.value_or(expr::TimeExpr::constant(0.0));
  in.tau = tau;
  in.scan = scan;
  in.a_bounded = a_bounded;
  return in;
}

lmi::LmiInput RunConfig::lmi_input() const {
  if (analysis != Analysis::Lmi) throw InputError("not an lmi config");
  return lmi::LmiInput{system(), *gamma, *sigma, scan};
}

fdde::SolverConfig RunConfig::solver_config() const {
  fdde::SolverConfig sc;
  sc.t_end = solver.t_end;
  sc.h = solver.h;
  sc.corrector_iters = solver.corrector_iters;
  sc.strict_delay = solver.strict_delay;
  return sc;
}

}  // namespace hcert::cli
