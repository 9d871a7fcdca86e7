#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cesarolab/common.hpp"
#include "cesarolab/operator.hpp"

namespace cesarolab {

struct OperatorSpec {
  std::string family;  // shift | assani | dense-file
  std::optional<double> beta;
  std::optional<std::size_t> dim;
  std::string matrix_file;
};

/// Flat JSON object. Keys:
///   experiment (string, required), family (string, required),
///   beta (number > 0), dim (integer >= 1), matrix_file (string),
///   alpha (array of numbers > 0), p (array of numbers >= 1 or "inf"),
///   N (integer), strategy ("basis" | "random" | "witness" | "all"),
///   probe_count (integer), seed (unsigned 64-bit integer), mode, output_dir.
/// Unknown keys are rejected.
struct ExperimentConfig {
  std::string experiment;
  OperatorSpec op;
  std::vector<double> alpha;
  std::vector<NormIndex> p;
  std::optional<std::size_t> N;
  std::string strategy = "basis";
  std::size_t probe_count = 0;
  std::optional<std::uint64_t> seed;
  std::string mode = "diff";
  std::string output_dir;

  /// Canonical JSON text (sorted keys, output_dir left out).
  std::string canonical() const;
  /// fnv1a_hex of canonical().
  std::string hash() const;
};

/// Parse errors carry line and column; violations name the field.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Per-experiment checks: required fields, families and module preconditions
/// that can be decided before running. Throws ErrorCode::config_validation.
void validate_config(const ExperimentConfig& cfg);

struct ExperimentInfo {
  std::string name;
  std::string description;
};

const std::vector<ExperimentInfo>& experiment_registry();

LinearOperator build_operator(const ExperimentConfig& cfg);

struct RunResult {
  std::vector<std::filesystem::path> files;
  bool invariants_ok = true;
  std::vector<std::string> failures;
};

/// Runs one experiment into `out_dir`. Any library error is recorded in
/// out_dir/error.json and rethrown.
RunResult run_experiment(const ExperimentConfig& cfg, const std::filesystem::path& out_dir);

}  // namespace cesarolab
