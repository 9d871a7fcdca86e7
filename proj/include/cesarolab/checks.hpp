#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace cesarolab {

struct Measurement {
  std::string name;
  double value = 0.0;
  double limit = 0.0;  // the threshold the value was compared against
};

struct CriterionResult {
  int id = 0;
  std::string title;
  bool passed = false;
  std::vector<Measurement> measurements;
  std::string detail;  // first failing sub-check, empty when passed
};

struct CheckOptions {
  std::uint64_t seed = 42;
  std::optional<std::filesystem::path> out;  // series and summary CSVs
};

/// The invariant suite behind `cesarolab check`: kernel, shift norms, growth
/// fit, absolute sup plateau, witness divergence, Assani closed forms, mean
/// identities, mean stability, ergodic probe. Ids 1..9. Output files depend
/// only on the seed.
std::vector<CriterionResult> run_checks(const CheckOptions& opts);

/// One line: "criterion <id> PASS|FAIL <title> [name=value (limit) ...]".
std::string format_result(const CriterionResult& r);

}  // namespace cesarolab
