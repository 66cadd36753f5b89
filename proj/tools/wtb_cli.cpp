#include "wtb/scenario.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace {

int run_curve_cmd(wtb::cli::ScenarioConfig cfg, bool strict) {
  const auto rows = wtb::cli::run_curve(cfg);
  std::ofstream out(cfg.out_path);
  if (!out.good()) {
    std::cerr << "error: cannot write " << cfg.out_path << "\n";
    return 2;
  }
  wtb::cli::write_csv(rows, out);
  bool all_ok = true;
  for (const auto& r : rows)
    if (r.status != wtb::PointStatus::kOk) all_ok = false;
  std::cout << "wrote " << rows.size() << " rows to " << cfg.out_path << "\n";
  if (strict && !all_ok) {
    std::cerr << "strict: some points were infeasible or capped\n";
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"finite-blocklength secrecy bounds for wiretap channels"};
  app.require_subcommand(1);

  std::string config_path, out_override;
  std::uint64_t seed = 0;
  std::size_t mc_samples = 0;
  bool strict = false;
  bool have_seed = false, have_mc = false;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "scenario config file")->required();
    cmd->add_option("--seed", seed, "override master seed")
        ->each([&](const std::string&) { have_seed = true; });
    cmd->add_option("--mc-samples", mc_samples, "override Monte Carlo sample count")
        ->each([&](const std::string&) { have_mc = true; });
    cmd->add_option("--out", out_override, "override output path");
    cmd->add_flag("--strict", strict, "nonzero exit on infeasible points");
  };

  auto* curve = app.add_subcommand("curve", "rate-vs-blocklength curve to CSV");
  add_common(curve);

  auto* asym = app.add_subcommand("asymptotic", "second-order approximation table");
  add_common(asym);

  auto* verify = app.add_subcommand("verify", "run the exhaustive certification corpus");
  std::uint64_t vseed = 1;
  long vcount = 100;
  std::string vout;
  verify->add_option("--seed", vseed, "corpus seed");
  verify->add_option("--count", vcount, "number of random instances")
      ->check(CLI::PositiveNumber);
  verify->add_option("--out", vout, "also write the report to a file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // flag/usage problems are configuration errors
  }

  try {
    if (verify->parsed()) {
      const auto rep = wtb::smallscale::run_certifications(vseed, vcount);
      wtb::cli::write_verify_report(rep, std::cout);
      if (!vout.empty()) {
        std::ofstream out(vout);
        wtb::cli::write_verify_report(rep, out);
      }
      return rep.pass() ? 0 : 1;
    }
    auto cfg = wtb::cli::parse_config_file(config_path);
    if (have_seed) cfg.seed = seed;
    if (have_mc) cfg.mc_samples = mc_samples;
    if (!out_override.empty()) cfg.out_path = out_override;
    if (curve->parsed()) return run_curve_cmd(cfg, strict);
    // asymptotic
    const auto table = wtb::cli::run_asymptotic(cfg);
    wtb::cli::write_asymptotic(table, std::cout, /*csv=*/false);
    std::ofstream out(cfg.out_path);
    if (!out.good()) {
      std::cerr << "error: cannot write " << cfg.out_path << "\n";
      return 2;
    }
    wtb::cli::write_asymptotic(table, out, /*csv=*/true);
    return 0;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
}
