#pragma once

#include <cstdint>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

namespace floerlab {

// ============================================================================
// Run configuration
// ============================================================================

struct Tolerances {
  double gradient = 1e-7;
  double hessian = 1e-6;
  double symmetry = 1e-10;
  double stable = 0.05;
  double gap = 0.02;
  double holder = 0.10;
  double cocycle = 1e-10;
  double cocycle_dphi = 1e-9;
  double leibniz_slope = 0.2;
};

struct RunConfig {
  std::vector<int> N{16, 32, 64, 128, 256};
  std::vector<double> s{0.6, 0.75, 0.9};
  std::uint64_t seed = 7;
  Tolerances tol;
  std::vector<std::string> suites;  // empty: all
  bool negative_controls = false;
  int samples = 2;  // random samples per suite, on top of the fixed ones
};

/// Suite names in report order.
const std::vector<std::string>& suite_names();

/// Missing keys keep their defaults. Throws ConfigError on unknown keys, an empty N
/// list, N outside the powers of two in [16, 512], s outside (1/2, 1) or an unknown suite.
RunConfig parse_config(const nlohmann::json& j);
/// Throws ConfigError when the file is missing or is not valid JSON.
RunConfig load_config(const std::string& path);
nlohmann::json to_json(const RunConfig& c);

/// FLOERLAB_WORKERS if set to a positive integer, else the hardware concurrency.
int worker_count();

// ============================================================================
// Commands
// ============================================================================

struct SuiteResult {
  std::string name;
  nlohmann::json report;
  bool pass = false;
};

SuiteResult run_suite(const std::string& name, const RunConfig& config);

struct VerifyResult {
  nlohmann::json report;  // {config, suites: {name: report}, verdict}
  bool pass = false;
};

/// Runs the selected suites on up to `workers` threads; the report does not depend on it.
VerifyResult run_verify(const RunConfig& config, int workers = 1);

struct CsvRow {
  std::string suite;
  int N = 0;
  double s = 0.0;  // NaN where the quantity has no level
  std::string quantity;
  double value = 0.0;
};

std::vector<CsvRow> run_sweep(const RunConfig& config, int workers = 1);
/// Header "suite,N,s,quantity,value"; a blank s field where s is NaN.
std::string to_csv(const std::vector<CsvRow>& rows);

const std::vector<std::string>& demo_names();
/// Printable walkthrough. Throws ConfigError for an unknown name.
std::string run_demo(const std::string& name);

}  // namespace floerlab
