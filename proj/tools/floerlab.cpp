#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include "floerlab/errors.hpp"
#include "floerlab/harness.hpp"

namespace {

void emit(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw floerlab::ConfigError("cannot write " + path);
  out << text;
}

floerlab::RunConfig config_from(const std::string& path) {
  return path.empty() ? floerlab::parse_config(nlohmann::json::object()) : floerlab::load_config(path);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical evidence for Floer maps, Floer functions and loop atlases"};
  app.require_subcommand(1);

  std::string config_path, out_path, demo;
  auto* verify = app.add_subcommand("verify", "Run the verification suites and write a JSON report");
  verify->add_option("--config", config_path, "JSON run configuration");
  verify->add_option("--out", out_path, "Report path (default: stdout)");
  auto* sweep = app.add_subcommand("sweep", "Run truncation sweeps and write CSV");
  sweep->add_option("--config", config_path, "JSON run configuration");
  sweep->add_option("--out", out_path, "CSV path (default: stdout)");
  auto* demo_cmd = app.add_subcommand("demo", "Print a walkthrough (pullback, atlas)");
  demo_cmd->add_option("name", demo, "Demo name")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*verify) {
      const auto result = floerlab::run_verify(config_from(config_path), floerlab::worker_count());
      emit(result.report.dump(2) + "\n", out_path);
      return result.pass ? 0 : 1;
    }
    if (*sweep) {
      const auto rows = floerlab::run_sweep(config_from(config_path), floerlab::worker_count());
      emit(floerlab::to_csv(rows), out_path);
      return 0;
    }
    std::cout << floerlab::run_demo(demo);
    return 0;
  } catch (const floerlab::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
