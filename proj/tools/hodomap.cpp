#include "hodomap/scenario.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

using namespace hodomap;

namespace {

void print_status(const nlohmann::json& report) {
  const auto& st = report["status"];
  for (const auto& c : st["checks"])
    std::printf("  %-44s %s\n", c["name"].get<std::string>().c_str(), c["pass"].get<bool>() ? "ok" : "FAIL");
  if (!st["stage"].get<std::string>().empty())
    std::printf("  stage %s: %s\n", st["stage"].get<std::string>().c_str(),
                st["message"].get<std::string>().c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hodograph pipeline for harmonic functions vanishing on a boundary arc"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  unsigned long long seed = 0;
  bool verbose = false;

  auto* run = app.add_subcommand("run", "run a scenario and write report.json, CSVs and figure.svg");
  run->add_option("config", config_path, "scenario INI file")->required()->check(CLI::ExistingFile);
  auto* out_opt = run->add_option("--out", out_dir, "output directory (default: scenario.output)");
  auto* seed_opt = run->add_option("--seed", seed, "override scenario.seed");
  run->add_flag("--verbose,-v", verbose, "stage timings on stderr");

  auto* verify = app.add_subcommand("verify", "run the invariant checks only");
  verify->add_option("config", config_path, "scenario INI file")->required()->check(CLI::ExistingFile);
  verify->add_flag("--verbose,-v", verbose, "stage timings on stderr");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // usage errors are hard errors; --help exits 0
    return app.exit(e) == 0 ? 0 : 1;
  }

  ScenarioConfig cfg;
  try {
    cfg = parse_config(config_path);
  } catch (const Error& e) {
    std::fprintf(stderr, "%s: %s\n", e.stage().c_str(), e.what());
    return 1;
  }
  if (*seed_opt) cfg.seed = seed;

  if (*run) {
    std::string dir = *out_opt ? out_dir : cfg.output;
    auto res = run_scenario(cfg, verbose);
    try {
      write_outputs(res, dir);
    } catch (const std::exception& e) {
      std::fprintf(stderr, "%s\n", e.what());
      return 1;
    }
    std::printf("%s -> %s (exit %d)\n", cfg.name.c_str(), dir.c_str(), res.exit_code);
    print_status(res.report);
    return res.exit_code;
  }
  auto res = verify_scenario(cfg, verbose);
  std::printf("%s verify (exit %d)\n", cfg.name.c_str(), res.exit_code);
  print_status(res.report);
  return res.exit_code;
}
