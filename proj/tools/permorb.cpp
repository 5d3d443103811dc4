#include <iostream>

#include <CLI11.hpp>

#include "permorb/cli.hpp"

namespace pc = permorb::cli;

namespace {

void add_run_flags(CLI::App* cmd, pc::RunConfig& cfg, std::string& cutoff) {
  cmd->add_option("--k", cfg.ks, "values of k")->delimiter(',');
  cmd->add_option("--cutoff", cutoff, "weight cutoff for test states (half-integers allowed)");
  cmd->add_option("--window", cfg.window, "exponent window size for x, x0, x1, x2 and modes");
  cmd->add_option("--z0", cfg.z0_order, "z0 order for the conjugation check");
  cmd->add_option("--seed", cfg.seed, "seed for sampled test vectors");
  cmd->add_option("--jobs", cfg.jobs, "worker threads");
  cmd->add_option("--output,-o", cfg.output, "report file (default: $PERMORB_REPORT_DIR)");
}

int emit_run(const pc::RunConfig& cfg, const std::string& prefix, bool summary_only) {
  pc::RunResult res = pc::run(cfg);
  const std::string lines = res.jsonl();
  const std::string summary = res.summary().dump() + "\n";
  pc::write_file(pc::report_path(cfg.output, pc::report_stem(prefix, cfg)), lines);
  std::cout << (summary_only ? summary : lines);
  return res.exit_status();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact checks for permutation-twisted free fermion modules"};
  app.require_subcommand(1);

  int k = 3, order = 6, theta_n = 4, x_order = 5, twice = 8;
  std::string cutoff;

  auto* coeffs = app.add_subcommand("coeffs", "a_j coefficients of the change of variables");
  coeffs->add_option("--k", k)->required();
  coeffs->add_option("--order", order);

  auto* theta = app.add_subcommand("theta", "Theta_j closed forms and the Theta_0 convention");
  theta->add_option("--k", k)->required();
  theta->add_option("--order", theta_n, "number of Theta_j");
  theta->add_option("--x-order", x_order, "truncation in x");

  auto* chr = app.add_subcommand("char", "graded dimensions of the twisted module");
  chr->add_option("--k", k)->required();
  chr->add_option("--cutoff", cutoff, "weight cutoff of the fermion basis");

  pc::RunConfig cfg;
  std::string which = "all";
  auto* check = app.add_subcommand("check", "run a check suite");
  check->add_option("name", which, "delta | rep | conjugation | supercomm | jacobi | lminus1 | "
                                   "grading | roundtrip | char | even-obstruction | all")
      ->required();
  add_run_flags(check, cfg, cutoff);

  auto* report = app.add_subcommand("report", "run checks and print a summary");
  report->add_option("--checks", cfg.checks, "check names (default all)")->delimiter(',');
  add_run_flags(report, cfg, cutoff);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? pc::kPass : pc::kConfig;
  }

  try {
    if (*coeffs) {
      std::cout << pc::coeffs_json(k, order).dump() << "\n";
      return pc::kPass;
    }
    if (*theta) {
      auto j = pc::theta_json(k, theta_n, x_order);
      std::cout << j.dump() << "\n";
      return j["status"] == "pass" ? pc::kPass : pc::kFail;
    }
    if (*chr) {
      if (!cutoff.empty()) twice = pc::parse_twice_weight(cutoff);
      std::cout << pc::char_json(k, twice).dump() << "\n";
      return pc::kPass;
    }
    if (!cutoff.empty()) cfg.twice_cutoff = pc::parse_twice_weight(cutoff);
    if (*check) {
      cfg.checks = {which};
      cfg.validate();
      return emit_run(cfg, "check", false);
    }
    cfg.validate();
    return emit_run(cfg, "report", true);
  } catch (const pc::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return pc::kConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return pc::kFail;
  }
}
