#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "hcert/errors.hpp"
#include "hcert/fdde.hpp"
#include "hcert/halanay.hpp"
#include "hcert/lmi.hpp"
#include "hcert/scan_grid.hpp"
#include "hcert/system.hpp"

namespace hcert::cli {

enum class Analysis { Positive, Lmi, HalanayScalar };

std::string_view to_string(Analysis a) noexcept;

/// Every problem found while reading a config, one "field.path: message" each.
class ConfigError : public InputError {
 public:
  explicit ConfigError(std::vector<std::string> issues);
  const std::vector<std::string>& issues() const noexcept { return issues_; }

 private:
  std::vector<std::string> issues_;
};

struct SolverSection {
  double t_end = 20.0;
  double h = 1e-2;
  double tolerance = 0.02;  // relative slack of the envelope check
  int corrector_iters = 1;
  bool strict_delay = false;
  bool operator==(const SolverSection&) const = default;
};

struct OutputSection {
  std::string csv_path = "trajectory.csv";
  std::string report_path = "report.json";
  bool operator==(const OutputSection&) const = default;
};

struct RunConfig {
  Analysis analysis = Analysis::Positive;
  double alpha = 1.0;
  std::size_t dim = 1;
  double tau = 1.0;
  std::vector<expr::TimeExpr> A;  // row-major dim*dim
  std::vector<expr::TimeExpr> B;
  /// One delay for state systems; one per b term for halanay-scalar.
  std::vector<expr::TimeExpr> q;
  std::vector<expr::TimeExpr> phi;  // expressions in s
  std::optional<expr::TimeExpr> gamma;
  std::optional<expr::TimeExpr> sigma;
  // halanay-scalar coefficients
  std::optional<expr::TimeExpr> a;
  std::vector<expr::TimeExpr> b;
  std::optional<expr::TimeExpr> c;
  std::optional<bool> a_bounded;
  /// Overrides the sampled sup norm of phi (must not be smaller than it).
  std::optional<double> amplitude;
  ScanGrid scan;
  SolverSection solver;
  OutputSection output;

  bool has_state_system() const noexcept { return analysis != Analysis::HalanayScalar; }
  DelaySystem system() const;
  halanay::HalanayInput halanay_input() const;
  lmi::LmiInput lmi_input() const;
  fdde::SolverConfig solver_config() const;

  bool operator==(const RunConfig&) const = default;
};

/// Parses and validates; throws ConfigError listing every offending field.
RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::filesystem::path& path);

/// Inverse of parse_config; expressions are written in canonical form.
nlohmann::json to_json(const RunConfig& cfg);

}  // namespace hcert::cli
