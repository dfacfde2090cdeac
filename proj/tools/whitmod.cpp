#include <CLI11.hpp>
#include <iostream>
#include <string>

#include "whitmod/runner.hpp"

namespace {

void add_common_flags(CLI::App* sub, whitmod::RunOptions& opt,
                      std::string& out_dir, bool& out_given,
                      std::uint64_t& seed, bool& seed_given, double& tol,
                      bool& tol_given) {
  sub->add_option("--config", opt.config_path, "Config file (.toml or .json)")
      ->required();
  sub->add_option("--out", out_dir, "Output directory (default: .)")
      ->each([&](const std::string&) { out_given = true; });
  sub->add_option("--seed", seed, "Seed for randomized checks")
      ->each([&](const std::string&) { seed_given = true; });
  sub->add_option("--tol", tol, "Override the refinement tolerance")
      ->each([&](const std::string&) { tol_given = true; });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Modulation characteristics, coalescence scans, and the "
               "reduced long-wave equation"};
  app.require_subcommand(1);

  whitmod::RunOptions opt;
  std::string out_dir;
  std::uint64_t seed = 0;
  double tol = 0.0, K_flag = 0.0, nu_flag = 0.0;
  bool out_given = false, seed_given = false, tol_given = false;
  bool K_given = false, nu_given = false;

  CLI::App* c_char = app.add_subcommand(
      "characteristics", "Characteristic speeds and sign data at one point");
  add_common_flags(c_char, opt, out_dir, out_given, seed, seed_given, tol,
                   tol_given);
  c_char->add_flag("--curve", opt.curve,
                   "Also write the determinant sign curve CSV");

  CLI::App* c_scan = app.add_subcommand(
      "scan", "Sweep a parameter path and refine collision candidates");
  add_common_flags(c_scan, opt, out_dir, out_given, seed, seed_given, tol,
                   tol_given);

  CLI::App* c_reduce = app.add_subcommand(
      "reduce", "Normalize reduction coefficients into the long-wave setup");
  add_common_flags(c_reduce, opt, out_dir, out_given, seed, seed_given, tol,
                   tol_given);
  c_reduce->add_option("--K", K_flag, "Dispersion coefficient override")
      ->each([&](const std::string&) { K_given = true; });
  c_reduce->add_option("--nu", nu_flag, "Unfolding coefficient override")
      ->each([&](const std::string&) { nu_given = true; });

  CLI::App* c_sim = app.add_subcommand(
      "simulate", "Integrate the normalized long-wave equation");
  add_common_flags(c_sim, opt, out_dir, out_given, seed, seed_given, tol,
                   tol_given);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (out_given) opt.out_dir = out_dir;
  if (seed_given) opt.seed = seed;
  if (tol_given) opt.tol = tol;
  if (K_given) opt.K_override = K_flag;
  if (nu_given) opt.nu_override = nu_flag;

  if (c_char->parsed()) {
    return whitmod::cmd_characteristics(opt, std::cout, std::cerr);
  }
  if (c_scan->parsed()) return whitmod::cmd_scan(opt, std::cout, std::cerr);
  if (c_reduce->parsed()) return whitmod::cmd_reduce(opt, std::cout, std::cerr);
  if (c_sim->parsed()) return whitmod::cmd_simulate(opt, std::cout, std::cerr);
  return 2;
}
