#pragma once

#include <filesystem>
#include <iosfwd>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "hcert/config.hpp"

namespace hcert::cli {

inline constexpr int kExitPass = 0;
inline constexpr int kExitInputError = 1;
inline constexpr int kExitViolation = 2;

inline constexpr std::string_view kToolName = "halanay-certify";
inline constexpr std::string_view kToolVersion = "1.0.0";

struct RunResult {
  int exit_code = kExitPass;
  nlohmann::json report;
  std::vector<std::filesystem::path> written;
};

/// Verdicts and certificate; writes the report. Exit 2 when nothing certifies.
RunResult certify(const RunConfig& cfg, const std::filesystem::path& out_dir);
/// Trajectory CSV (envelope columns filled when a certificate exists), plot
/// script and report. Exit 0 whenever the trajectory was produced.
RunResult simulate(const RunConfig& cfg, const std::filesystem::path& out_dir);
/// certify + simulate + envelope check. Exit 2 on no certificate or a violation.
RunResult verify(const RunConfig& cfg, const std::filesystem::path& out_dir);

/// Loads the config and runs "certify", "simulate" or "verify". Input
/// problems are reported on err and yield exit code 1.
int run_command(std::string_view command, const std::filesystem::path& config,
                const std::filesystem::path& out_dir, std::ostream& out, std::ostream& err);

/// Prints E_{alpha,beta}(x) with 17 significant digits.
int run_mlf(double alpha, double beta, double x, std::ostream& out, std::ostream& err);

/// Writes a gnuplot script plotting every state column of the CSV and the
/// envelope (when present) against t. The script refers to the CSV by file
/// name, so it runs from the directory holding both. Throws InputError if the
/// CSV is missing, malformed or has no data rows.
void emit_plot_script(const std::filesystem::path& csv, const std::filesystem::path& script);

}  // namespace hcert::cli
