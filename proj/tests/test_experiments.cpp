#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"

#include "cesarolab/experiments.hpp"
#include "cesarolab/parallel.hpp"
#include "cesarolab/report.hpp"

using namespace cesarolab;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("cesarolab_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

ErrorCode code_of(const std::string& text) {
  try {
    validate_config(parse_config(text));
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("config accepted: " << text);
  return ErrorCode::domain;
}

std::string message_of(const std::string& text) {
  try {
    validate_config(parse_config(text));
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

const char* kMinimal =
    R"({"experiment": "abs-bound-sweep", "family": "shift", "beta": 0.3, "dim": 2048,
        "alpha": [0.5], "p": [1], "N": 1024, "seed": 42})";

}  // namespace

TEST_CASE("config: minimal shift config is valid") {
  const ExperimentConfig cfg = parse_config(kMinimal);
  CHECK_NOTHROW(validate_config(cfg));
  CHECK(*cfg.op.beta == 0.3);
  CHECK(*cfg.op.dim == 2048);
  CHECK(cfg.alpha == std::vector<double>{0.5});
  CHECK(cfg.p.size() == 1);
  CHECK(*cfg.N == 1024);
  CHECK(*cfg.seed == 42);
  CHECK(cfg.hash().size() == 16);
  // the same operator is too small for the power-norm table
  ExperimentConfig growth = cfg;
  growth.experiment = "shift-growth";
  CHECK_THROWS_AS(validate_config(growth), Error);
}

TEST_CASE("config: validation errors") {
  CHECK(message_of(R"({"experiment": "shift-growth", "family": "shift", "beta": 0, "dim": 8,
                       "p": [1], "N": 2})")
            .find("beta must be positive") != std::string::npos);
  CHECK(code_of(R"({"experiment": "shift-growth", "family": "shift", "beta": 0, "dim": 8,
                    "p": [1], "N": 2})") == ErrorCode::config_validation);
  const std::string gamma = message_of(
      R"({"experiment": "assani", "family": "assani", "N": 10, "gamma": 1})");
  CHECK(gamma.find("gamma") != std::string::npos);
  CHECK(gamma.find("unknown key") != std::string::npos);

  CHECK(code_of(R"({"experiment": "nope", "family": "assani", "N": 3})") ==
        ErrorCode::config_validation);
  CHECK(code_of(R"({"family": "assani", "N": 3})") == ErrorCode::config_validation);
  CHECK(code_of(R"({"experiment": "assani", "family": "shift", "N": 3})") ==
        ErrorCode::config_validation);
  // dim below 2(N+1)
  CHECK(message_of(R"({"experiment": "mean-stability", "family": "shift", "beta": 0.3,
                       "dim": 100, "alpha": [0.5], "p": [1], "N": 64})")
            .find("2(N+1)") != std::string::npos);
  // random strategy without a seed
  CHECK(message_of(R"({"experiment": "abs-bound-sweep", "family": "shift", "dim": 100,
                       "alpha": [0.5], "p": [1], "N": 10, "strategy": "random",
                       "probe_count": 5})")
            .find("seed") != std::string::npos);
  CHECK(code_of(R"({"experiment": "prop21", "family": "shift", "alpha": [1], "p": [2],
                    "N": 7})") == ErrorCode::config_validation);
  CHECK(code_of(R"({"experiment": "assani", "family": "assani", "N": -3})") ==
        ErrorCode::config_validation);
  CHECK(code_of(R"({"experiment": "assani", "family": "assani", "N": 3, "seed": -1})") ==
        ErrorCode::config_validation);
  CHECK(code_of(R"({"experiment": "kreiss", "family": "assani", "p": [0.5]})") ==
        ErrorCode::config_validation);
  CHECK(code_of(R"({"experiment": "mean-stability", "family": "assani", "alpha": [1],
                    "p": ["inf"], "N": 3, "mode": "sideways"})") ==
        ErrorCode::config_validation);
  CHECK_NOTHROW(validate_config(parse_config(
      R"({"experiment": "mean-stability", "family": "assani", "alpha": [1], "p": ["inf"],
          "N": 3, "mode": "kt_power"})")));
}

TEST_CASE("config: parse errors carry line and column") {
  try {
    parse_config("{\n  \"experiment\": \"assani\",\n  \"N\": ,\n}");
    FAIL("expected parse error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::config_parse);
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    CHECK(std::string(e.what()).find("column 8") != std::string::npos);
  }
  CHECK(code_of("[1, 2]") == ErrorCode::config_parse);
  try {
    load_config("/nonexistent/config.json");
    FAIL("expected io error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::io);
  }
}

TEST_CASE("config hash ignores the output directory and tracks the seed") {
  ExperimentConfig a = parse_config(kMinimal);
  ExperimentConfig b = a;
  b.output_dir = "elsewhere";
  CHECK(a.hash() == b.hash());
  b.seed = 43;
  CHECK(a.hash() != b.hash());
}

TEST_CASE("registry") {
  const auto& reg = experiment_registry();
  REQUIRE(reg.size() == 9);
  for (const char* name : {"kernel-checks", "shift-growth", "abs-bound-sweep", "prop21",
                           "mean-stability", "identities", "kreiss", "assani", "ergodic"}) {
    bool found = false;
    for (const auto& e : reg) found = found || (e.name == name && !e.description.empty());
    CHECK_MESSAGE(found, name);
  }
}

TEST_CASE("csv format") {
  SeriesReport empty("empty", {"n", "value"});
  CHECK(to_csv(empty, {"00ff", 7}) == "# cesarolab v1, config=00ff, seed=7\nn,value\n");
  SeriesReport two("two", {"n", "value"});
  two.add_row({0.0, 0.1});
  two.add_row({1.0, 1.0 / 3.0});
  CHECK(to_csv(two, {"abc", 1}) ==
        "# cesarolab v1, config=abc, seed=1\nn,value\n0,0.10000000000000001\n"
        "1,0.33333333333333331\n");
  SeriesReport bad("bad", {"n", "value"});
  bad.add_row({0.0, INFINITY});
  CHECK_THROWS_AS(bad.validate(), Error);
  SeriesReport unordered("unordered", {"n", "value"});
  unordered.add_row({2.0, 1.0});
  unordered.add_row({1.0, 1.0});
  CHECK_THROWS_AS(unordered.validate(), Error);
  CHECK_THROWS_AS(write_csv(two, "/nonexistent/dir/x.csv", {"a", 0}), Error);
}

TEST_CASE("kernel-checks experiment") {
  const fs::path out = scratch("kernel");
  const auto cfg = parse_config(
      R"({"experiment": "kernel-checks", "family": "assani", "alpha": [0.5, 1.7], "N": 10000})");
  const RunResult r = run_experiment(cfg, out);
  CHECK(r.invariants_ok);
  CHECK(fs::exists(out / "kernel_bounds_a0.5.csv"));
  CHECK(fs::exists(out / "kernel_asymptotics_a1.7.csv"));
  CHECK(fs::exists(out / "kernel_semigroup_a0.5.csv"));
  const std::string text = slurp(out / "kernel_bounds_a0.5.csv");
  CHECK(text.rfind("# cesarolab v1, config=" + cfg.hash() + ", seed=0\n", 0) == 0);
  const auto meta = nlohmann::json::parse(slurp(out / "kernel_bounds_a0.5.json"));
  CHECK(meta["meta"]["all_within"] == "true");
}

TEST_CASE("assani experiment reproduces the closed forms") {
  const fs::path out = scratch("assani");
  const RunResult r = run_experiment(
      parse_config(R"({"experiment": "assani", "family": "assani", "N": 200})"), out);
  CHECK(r.invariants_ok);
  CHECK(fs::exists(out / "assani_powers.csv"));
  CHECK(fs::exists(out / "assani_means_a1.csv"));
  CHECK(fs::exists(out / "assani_kreiss.csv"));
  CHECK(fs::exists(out / "spectrum.json"));
}

TEST_CASE("prop21 experiment") {
  const fs::path out = scratch("prop21");
  const RunResult r = run_experiment(
      parse_config(
          R"({"experiment": "prop21", "family": "shift", "alpha": [1.5], "p": [2], "N": 256})"),
      out);
  REQUIRE(r.files.size() == 1);
  const auto meta = nlohmann::json::parse(slurp(out / "prop21_a1.5_p2.json"));
  CHECK(meta["columns"] == nlohmann::json({"N", "value", "log_term", "ratio", "fit"}));
  CHECK(meta["meta"].contains("log_fit_slope"));
}

TEST_CASE("every experiment runs on a small config") {
  const char* configs[] = {
      R"({"experiment": "shift-growth", "family": "shift", "beta": 0.3, "dim": 80,
          "alpha": [0.5], "p": [1, 2, "inf", 3], "N": 32, "seed": 1})",
      R"({"experiment": "abs-bound-sweep", "family": "shift", "dim": 66, "alpha": [0.5],
          "p": [1, 2], "N": 32, "strategy": "all", "probe_count": 10, "seed": 5})",
      R"({"experiment": "mean-stability", "family": "shift", "beta": 0.3, "dim": 66,
          "alpha": [0.5, 1], "p": [1], "N": 32, "mode": "times_TminusI_sq"})",
      R"({"experiment": "identities", "family": "shift", "beta": 0.3, "dim": 12,
          "alpha": [0.5, 1, 1.6], "N": 10})",
      R"({"experiment": "kreiss", "family": "shift", "beta": 0.3, "dim": 12, "p": [2],
          "N": 5})",
      R"({"experiment": "ergodic", "family": "shift", "beta": 0.3, "dim": 200,
          "alpha": [0.5], "p": [2], "N": 100, "seed": 3})",
  };
  int i = 0;
  for (const char* text : configs) {
    const fs::path out = scratch("small" + std::to_string(i++));
    const RunResult r = run_experiment(parse_config(text), out);
    CHECK_MESSAGE(r.invariants_ok, text);
    CHECK_MESSAGE(!r.files.empty(), text);
    for (const auto& f : r.files) CHECK(fs::file_size(f) > 0);
  }
}

TEST_CASE("dense-file family") {
  const fs::path dir = scratch("dense");
  fs::create_directories(dir);
  std::ofstream(dir / "m.txt") << "2\n0.5,0 1,0\n0,0 0.5,0\n";
  const std::string text = R"({"experiment": "mean-stability", "family": "dense-file",
      "matrix_file": ")" + (dir / "m.txt").string() +
                           R"(", "alpha": [1], "p": [2], "N": 20})";
  const RunResult r = run_experiment(parse_config(text), dir / "out");
  CHECK(r.files.size() == 1);

  const std::string missing = R"({"experiment": "mean-stability", "family": "dense-file",
      "matrix_file": "/nonexistent.txt", "alpha": [1], "p": [2], "N": 20})";
  CHECK_THROWS_AS(run_experiment(parse_config(missing), dir / "out2"), Error);
  const auto err = nlohmann::json::parse(slurp(dir / "out2" / "error.json"));
  CHECK(err["error"] == "io");
  CHECK(err["experiment"] == "mean-stability");
}

TEST_CASE("runtime errors leave an error record") {
  // configs edited after loading are validated again by the runner
  const fs::path out = scratch("error");
  ExperimentConfig cfg = parse_config(
      R"({"experiment": "ergodic", "family": "shift", "beta": 0.3, "dim": 200,
          "alpha": [0.5], "p": [2], "N": 100, "seed": 3})");
  cfg.op.dim = 50;
  CHECK_THROWS_AS(run_experiment(cfg, out), Error);
  const auto err = nlohmann::json::parse(slurp(out / "error.json"));
  CHECK(err["error"] == "config_validation");
  CHECK(err["config"] == cfg.hash());
}

TEST_CASE("outputs are byte-identical across runs and thread counts") {
  const char* text =
      R"({"experiment": "abs-bound-sweep", "family": "shift", "dim": 130, "alpha": [0.5],
          "p": [1.5], "N": 64, "strategy": "all", "probe_count": 25, "seed": 11})";
  const fs::path a = scratch("det_a"), b = scratch("det_b");
  set_thread_count(1);
  const RunResult ra = run_experiment(parse_config(text), a);
  set_thread_count(4);
  const RunResult rb = run_experiment(parse_config(text), b);
  set_thread_count(1);
  REQUIRE(ra.files.size() == rb.files.size());
  for (std::size_t i = 0; i < ra.files.size(); ++i) {
    CHECK(ra.files[i].filename() == rb.files[i].filename());
    CHECK(slurp(ra.files[i]) == slurp(rb.files[i]));
  }
}
