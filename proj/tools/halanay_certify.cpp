// halanay-certify <certify|simulate|verify> --config <path> [--out <dir>]
// halanay-certify mlf <alpha> <beta> <x>

#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "hcert/run.hpp"

int main(int argc, char** argv) {
  namespace cli = hcert::cli;

  CLI::App app{"Mittag-Leffler stability certificates for fractional delay systems"};
  app.set_version_flag("--version", std::string(cli::kToolVersion));
  app.require_subcommand(1);

  std::string config;
  std::string out_dir = ".";
  for (const char* name : {"certify", "simulate", "verify"}) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config, "JSON run configuration")->required();
    sub->add_option("--out", out_dir, "directory for report, CSV and plot script");
  }
  app.get_subcommand("certify")->description("certify stability and write the report");
  app.get_subcommand("simulate")->description("integrate the system and write the trajectory CSV");
  app.get_subcommand("verify")->description("certify, simulate and check the envelope");

  double alpha = 0.0;
  double beta = 0.0;
  double x = 0.0;
  CLI::App* mlf = app.add_subcommand("mlf", "print E_{alpha,beta}(x)");
  mlf->add_option("alpha", alpha)->required();
  mlf->add_option("beta", beta)->required();
  mlf->add_option("x", x)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return cli::kExitInputError;
  }

  if (mlf->parsed()) return cli::run_mlf(alpha, beta, x, std::cout, std::cerr);
  for (CLI::App* sub : app.get_subcommands()) {
    return cli::run_command(sub->get_name(), config, out_dir, std::cout, std::cerr);
  }
  return cli::kExitInputError;
}
