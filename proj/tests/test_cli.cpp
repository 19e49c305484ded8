#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "acceptance.hpp"
#include "fractail/error.hpp"
#include "fractail/parallel.hpp"
#include "runner.hpp"
#include "scenario.hpp"

using namespace fractail;
using namespace fractail::cli;
namespace fs = std::filesystem;

namespace {

const std::string kScenarios = FRACTAIL_SCENARIO_DIR;
const std::string kBinary = FRACTAIL_BINARY;

std::string config_message(const std::string& text) {
  try {
    parse_scenario(text, "inline.json");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ConfigError);
    return e.what();
  }
  FAIL("expected a ConfigError");
  return {};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

int exit_code(const std::string& args) {
  const int status = std::system((kBinary + " " + args + " > /dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("fractail-test-" + name);
  fs::remove_all(p);
  return p;
}

const std::string kForward = R"({
  "experiment": "forward",
  "alpha": 0.5,
  "operator": {"kind": "laplacian", "modes": 4},
  "source": {"t0": 1.0, "mu": {"constant": 1.0}},
  "time_grid": {"t_min": 2.0, "t_max": 100.0}
})";

}  // namespace

TEST_CASE("every shipped scenario parses") {
  int count = 0;
  for (const auto& entry : fs::directory_iterator(kScenarios)) {
    if (entry.path().extension() != ".json") continue;
    CAPTURE(entry.path().string());
    CHECK_NOTHROW(load_scenario(entry.path().string()));
    ++count;
  }
  CHECK(count >= 7);
}

TEST_CASE("field-level configuration errors") {
  auto replace = [](std::string s, const std::string& from, const std::string& to) {
    s.replace(s.find(from), from.size(), to);
    return s;
  };
  CHECK(config_message(replace(kForward, "\"t_min\": 2.0", "\"t_min\": 0.5")).find("time_grid.t_min") !=
        std::string::npos);
  CHECK(config_message(replace(kForward, "\"modes\": 4", "\"modes\": 4, \"mode\": 3")).find("operator.mode") !=
        std::string::npos);
  CHECK(config_message(replace(kForward, "\"alpha\": 0.5", "\"alpha\": 1.0")).find("alpha") != std::string::npos);
  CHECK(config_message(replace(kForward, "\"alpha\": 0.5", "\"alpha\": \"half\"")).find("expected a number") !=
        std::string::npos);
  CHECK(config_message(replace(kForward, "forward", "backward")).find("experiment") != std::string::npos);
  CHECK(config_message(replace(kForward, "\"constant\": 1.0", "\"constant\": 1.0, \"polynomial\": [1]"))
            .find("source.mu") != std::string::npos);
  CHECK(config_message(replace(kForward, "}\n}", "},\n  \"tolerances\": {\"a_rel\": 0.1}\n}")).find("tolerances.a_rel") !=
        std::string::npos);
  CHECK(config_message("{\"experiment\": \"extract\", \"alpha\": 0.5}").find("operator") != std::string::npos);
  CHECK(config_message("{ not json").find("not valid JSON") != std::string::npos);
}

TEST_CASE("tolerance defaults and overrides") {
  const auto s = parse_scenario(kForward, "inline.json");
  CHECK(s.tolerance("route_consistency") == 1e-10);
  CHECK(s.grid->points_per_decade == 16);
  const auto e = load_scenario(kScenarios + "/extract.json");
  CHECK(e.tolerance("a_rel") == 1e-2);
  CHECK(e.K == 6);
}

TEST_CASE("digest depends only on the file bytes") {
  const auto a = parse_scenario(kForward, "one.json");
  const auto b = parse_scenario(kForward, "two.json");
  CHECK(a.digest == b.digest);
  CHECK(a.digest.size() == 16);
  CHECK(parse_scenario(kForward + "\n", "x").digest != a.digest);
}

TEST_CASE("runs are deterministic and write versioned CSV") {
  const auto s = load_scenario(kScenarios + "/extract_noisy.json");
  const auto d1 = scratch("det1"), d2 = scratch("det2");
  const auto r1 = run_scenario(s, {d1.string(), true});
  const auto r2 = run_scenario(s, {d2.string(), false});
  CHECK(r1.passed());
  int csv = 0;
  for (const auto& entry : fs::directory_iterator(d1)) {
    if (entry.path().extension() != ".csv") continue;
    ++csv;
    const auto body = slurp(entry.path());
    CHECK(body.rfind("# fractail-csv v1\n", 0) == 0);
    CHECK(body == slurp(d2 / entry.path().filename()));
  }
  CHECK(csv >= 2);
  CHECK(fs::exists(d1 / "recovery.svg"));
  CHECK_FALSE(fs::exists(d2 / "recovery.svg"));
  CHECK(slurp(d1 / "report.txt").find("digest: fnv1a64:" + s.digest) != std::string::npos);
}

TEST_CASE("shipped scenarios meet their declared tolerances") {
  for (const char* name : {"forward", "tail", "extract", "scalar", "uniqueness", "heat_contrast", "mlf_table"}) {
    CAPTURE(name);
    const auto s = load_scenario(kScenarios + "/" + name + ".json");
    const auto r = run_scenario(s, {scratch(name).string(), false});
    CHECK(r.passed());
    CHECK_FALSE(r.checks.empty());
  }
}

TEST_CASE("orthogonal observation is reported, not failed") {
  const auto s = load_scenario(kScenarios + "/uniqueness_orthogonal.json");
  const auto r = run_scenario(s, {scratch("orth").string(), false});
  CHECK(r.text.find("indistinguishable") != std::string::npos);
}

TEST_CASE("suite table") {
  CHECK(acceptance::suite_criteria("all")->size() == 9);
  CHECK(*acceptance::suite_criteria("inverse") == std::vector<int>{5, 9});
  CHECK_FALSE(acceptance::suite_criteria("unknown").has_value());
}

TEST_CASE("thread cap") {
  setenv("FRACTAIL_THREADS", "1", 1);
  CHECK(worker_count() == 1);
  unsetenv("FRACTAIL_THREADS");
  CHECK(worker_count() >= 1);
}

TEST_CASE("command line exit codes") {
  CHECK(exit_code("verify unknown") == 2);
  CHECK(exit_code("verify") == 2);
  CHECK(exit_code("frobnicate") == 2);
  CHECK(exit_code("mlf --alpha 0.5 --beta 1 --x -1 --check") == 0);
  CHECK(exit_code("run " + kScenarios + "/forward.json --out " + scratch("cli").string()) == 0);
  const auto bad = scratch("bad.json");
  std::ofstream(bad) << "{\"experiment\": \"forward\", \"alpha\": 0.5, \"typo\": 1}";
  CHECK(exit_code("run " + bad.string()) == 2);
  CHECK(exit_code("run /nonexistent/scenario.json") == 2);
}
