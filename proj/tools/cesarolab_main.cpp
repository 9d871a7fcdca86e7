#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "cesarolab/checks.hpp"
#include "cesarolab/common.hpp"
#include "cesarolab/experiments.hpp"
#include "cesarolab/parallel.hpp"

using namespace cesarolab;

namespace {

enum Exit { ok = 0, invariant = 1, config = 2, runtime = 3 };

int exit_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::config_parse:
    case ErrorCode::config_validation:
      return config;
    default:
      return runtime;
  }
}

int cmd_run(const std::string& path, const std::optional<std::string>& out,
            const std::optional<std::uint64_t>& seed) {
  ExperimentConfig cfg;
  try {
    cfg = load_config(path);
    if (seed) cfg.seed = *seed;
    if (out) cfg.output_dir = *out;
    if (cfg.output_dir.empty())
      fail(ErrorCode::config_validation, "output_dir: missing (set it in the config or pass --out)");
    validate_config(cfg);
  } catch (const Error& e) {
    std::cerr << "config error (" << to_string(e.code()) << "): " << e.what() << '\n';
    return e.code() == ErrorCode::io ? runtime : config;
  }

  try {
    const RunResult r = run_experiment(cfg, cfg.output_dir);
    for (const auto& f : r.files) std::cout << f.string() << '\n';
    for (const auto& f : r.failures) std::cerr << "invariant failed: " << f << '\n';
    return r.invariants_ok ? ok : invariant;
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.code()) << "): " << e.what() << '\n';
    return exit_for(e);
  }
}

int cmd_list() {
  for (const auto& e : experiment_registry()) {
    std::printf("%-16s %s\n", e.name.c_str(), e.description.c_str());
  }
  return ok;
}

int cmd_check(std::uint64_t seed, const std::optional<std::string>& out) {
  CheckOptions opts;
  opts.seed = seed;
  if (out) opts.out = *out;
  try {
    bool all = true;
    for (const auto& r : run_checks(opts)) {
      std::cout << format_result(r) << '\n';
      all = all && r.passed;
    }
    std::cout << (all ? "all checks passed" : "some checks failed") << '\n';
    return all ? ok : invariant;
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.code()) << "): " << e.what() << '\n';
    return runtime;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cesaro means of linear operators: experiments and invariant checks"};
  app.require_subcommand(1);
  unsigned threads = 1;
  app.add_option("--threads", threads, "worker threads (results do not depend on it)")
      ->check(CLI::Range(1u, 1024u));

  auto* run = app.add_subcommand("run", "run one experiment from a JSON config");
  std::string config_path;
  std::optional<std::string> run_out;
  std::optional<std::uint64_t> run_seed;
  run->add_option("--config", config_path, "config file")->required();
  run->add_option("--out", run_out, "output directory (overrides output_dir)");
  run->add_option("--seed", run_seed, "seed (overrides the config)");

  app.add_subcommand("list", "list registered experiments");

  auto* check = app.add_subcommand("check", "run the invariant suite; exit 1 on any failure");
  std::uint64_t check_seed = 42;
  std::optional<std::string> check_out;
  check->add_option("--seed", check_seed, "seed for randomized checks");
  check->add_option("--out", check_out, "write series and summary CSVs here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? ok : config;
  }
  set_thread_count(threads);

  if (run->parsed()) return cmd_run(config_path, run_out, run_seed);
  if (check->parsed()) return cmd_check(check_seed, check_out);
  return cmd_list();
}
