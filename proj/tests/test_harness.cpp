#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>

#include "floerlab/errors.hpp"
#include "floerlab/harness.hpp"

using namespace floerlab;

namespace {

namespace fs = std::filesystem;

fs::path scratch(const std::string& name) { return fs::temp_directory_path() / ("floerlab_test_" + name); }

void write_file(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

int run_cli(const std::string& args) {
  const std::string cmd = std::string(FLOERLAB_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("defaults survive an empty config") {
  const RunConfig c = parse_config(nlohmann::json::object());
  CHECK(c.N == std::vector<int>{16, 32, 64, 128, 256});
  CHECK(c.s == std::vector<double>{0.6, 0.75, 0.9});
  CHECK(c.seed == 7);
  CHECK(c.tol.hessian == 1e-6);
  CHECK_FALSE(c.negative_controls);
}

TEST_CASE("config values override defaults") {
  const RunConfig c = parse_config(nlohmann::json::parse(
      R"({"N": [16, 32], "s": [0.75], "seed": 3, "suites": ["pullback"], "tolerances": {"gap": 0.01}})"));
  CHECK(c.N == std::vector<int>{16, 32});
  CHECK(c.seed == 3);
  CHECK(c.suites == std::vector<std::string>{"pullback"});
  CHECK(c.tol.gap == 0.01);
  CHECK(parse_config(to_json(c)).N == c.N);
}

TEST_CASE("invalid configs are rejected") {
  for (const char* bad : {R"({"N": []})", R"({"N": [24]})", R"({"N": [1024]})", R"({"s": [0.5]})",
                          R"({"s": [1.0]})", R"({"suites": ["nope"]})", R"({"typo": 1})"})
    CHECK_THROWS_AS(parse_config(nlohmann::json::parse(bad)), ConfigError);
  CHECK_THROWS_AS(load_config(scratch("missing.json").string()), ConfigError);
  write_file(scratch("broken.json"), "{ not json");
  CHECK_THROWS_AS(load_config(scratch("broken.json").string()), ConfigError);
}

TEST_CASE("suite names are sorted and unknown demos throw") {
  const auto& names = suite_names();
  CHECK(std::is_sorted(names.begin(), names.end()));
  CHECK(names.size() == 5);
  CHECK_THROWS_AS(run_demo("nope"), ConfigError);
}

TEST_CASE("CSV rows use round-trip precision and a blank level") {
  const std::string csv = to_csv({{"a", 16, 0.75, "norm", 0.1}, {"b", 32, std::nan(""), "gap", 1.0 / 3.0}});
  CHECK(csv.rfind("suite,N,s,quantity,value\n", 0) == 0);
  CHECK(csv.find("a,16,0.75,norm,0.10000000000000001\n") != std::string::npos);
  CHECK(csv.find("b,32,,gap,0.33333333333333331\n") != std::string::npos);
}

TEST_CASE("verify report does not depend on the worker count") {
  RunConfig c = parse_config(nlohmann::json::parse(R"({"N": [16, 32], "s": [0.75], "suites": ["pullback", "floer_function"]})"));
  const VerifyResult one = run_verify(c, 1);
  const VerifyResult two = run_verify(c, 2);
  CHECK(one.report.dump() == two.report.dump());
  CHECK(one.report["suites"].size() == 2);
}

TEST_CASE("CLI exit codes") {
  const fs::path empty = scratch("empty_n.json");
  write_file(empty, R"({"N": []})");
  CHECK(run_cli("verify --config " + empty.string()) == 2);
  const fs::path broken = scratch("broken_cli.json");
  write_file(broken, "{ not json");
  CHECK(run_cli("verify --config " + broken.string()) == 2);
  CHECK(run_cli("demo nope") == 2);
  CHECK(run_cli("frobnicate") == 2);
  CHECK(run_cli("demo pullback") == 0);

  const fs::path small = scratch("small.json");
  write_file(small, R"({"N": [16, 32], "s": [0.75], "suites": ["pullback"]})");
  const fs::path out = scratch("small.csv");
  CHECK(run_cli("sweep --config " + small.string() + " --out " + out.string()) == 0);
  std::ifstream in(out);
  std::string header;
  std::getline(in, header);
  CHECK(header == "suite,N,s,quantity,value");
}
