#include "floerlab/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <sstream>
#include <thread>

#include "floerlab/errors.hpp"
#include "floerlab/floer_function.hpp"
#include "floerlab/floer_map.hpp"
#include "floerlab/loop_atlas.hpp"
#include "floerlab/pullback.hpp"
#include "floerlab/sobolev_evidence.hpp"

namespace floerlab {

// ============================================================================
// Configuration
// ============================================================================

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {"floer_function", "floer_map", "loop_atlas", "pullback",
                                                 "sobolev_evidence"};
  return names;
}

namespace {

bool power_of_two_in_range(int n) { return n >= 16 && n <= 512 && (n & (n - 1)) == 0; }

template <class T>
T field(const nlohmann::json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad value for ") + key + ": " + e.what());
  }
}

void reject_unknown(const nlohmann::json& j, const std::vector<std::string>& known, const std::string& where) {
  for (const auto& [key, value] : j.items())
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw ConfigError("unknown key " + key + " in " + where);
}

}  // namespace

RunConfig parse_config(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  reject_unknown(j, {"N", "s", "seed", "tolerances", "suites", "negative_controls", "samples"}, "config");
  RunConfig c;
  c.N = field(j, "N", c.N);
  c.s = field(j, "s", c.s);
  c.seed = field(j, "seed", c.seed);
  c.suites = field(j, "suites", c.suites);
  c.negative_controls = field(j, "negative_controls", c.negative_controls);
  c.samples = field(j, "samples", c.samples);

  if (j.contains("tolerances")) {
    const auto& t = j.at("tolerances");
    if (!t.is_object()) throw ConfigError("tolerances must be an object");
    reject_unknown(t,
                   {"gradient", "hessian", "symmetry", "stable", "gap", "holder", "cocycle", "cocycle_dphi",
                    "leibniz_slope"},
                   "tolerances");
    c.tol.gradient = field(t, "gradient", c.tol.gradient);
    c.tol.hessian = field(t, "hessian", c.tol.hessian);
    c.tol.symmetry = field(t, "symmetry", c.tol.symmetry);
    c.tol.stable = field(t, "stable", c.tol.stable);
    c.tol.gap = field(t, "gap", c.tol.gap);
    c.tol.holder = field(t, "holder", c.tol.holder);
    c.tol.cocycle = field(t, "cocycle", c.tol.cocycle);
    c.tol.cocycle_dphi = field(t, "cocycle_dphi", c.tol.cocycle_dphi);
    c.tol.leibniz_slope = field(t, "leibniz_slope", c.tol.leibniz_slope);
  }

  if (c.N.empty()) throw ConfigError("N list is empty");
  for (int n : c.N)
    if (!power_of_two_in_range(n)) throw ConfigError("N must be powers of two in [16, 512], got " + std::to_string(n));
  std::sort(c.N.begin(), c.N.end());
  c.N.erase(std::unique(c.N.begin(), c.N.end()), c.N.end());
  if (c.s.empty()) throw ConfigError("s list is empty");
  for (double s : c.s)
    if (!(s > 0.5 && s < 1.0)) throw ConfigError("s values must lie in (1/2, 1)");
  for (const auto& name : c.suites)
    if (std::find(suite_names().begin(), suite_names().end(), name) == suite_names().end())
      throw ConfigError("unknown suite " + name);
  if (c.samples < 0 || c.samples > 16) throw ConfigError("samples must lie in [0, 16]");
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("malformed config " + path + ": " + e.what());
  }
  return parse_config(j);
}

nlohmann::json to_json(const RunConfig& c) {
  return {{"N", c.N},
          {"s", c.s},
          {"seed", c.seed},
          {"suites", c.suites.empty() ? suite_names() : c.suites},
          {"negative_controls", c.negative_controls},
          {"samples", c.samples},
          {"tolerances",
           {{"gradient", c.tol.gradient},
            {"hessian", c.tol.hessian},
            {"symmetry", c.tol.symmetry},
            {"stable", c.tol.stable},
            {"gap", c.tol.gap},
            {"holder", c.tol.holder},
            {"cocycle", c.tol.cocycle},
            {"cocycle_dphi", c.tol.cocycle_dphi},
            {"leibniz_slope", c.tol.leibniz_slope}}}};
}

int worker_count() {
  if (const char* env = std::getenv("FLOERLAB_WORKERS")) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && n > 0) return static_cast<int>(std::min(n, 64L));
  }
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

// ============================================================================
// Suites
// ============================================================================

namespace {

std::vector<Level> levels(const std::vector<double>& s) {
  std::vector<Level> out;
  for (double v : s) out.emplace_back(v);
  return out;
}

/// Mode-1 circle of radius r around (cx, 0).
FourierLoop planar_circle(int N, double r, double cx) {
  FourierLoop q(2, N);
  const int b = block_size(N);
  q.coords()(0) = cx;
  q.coords()(1) = r / std::sqrt(2.0);
  q.coords()(b + 2) = r / std::sqrt(2.0);
  return q;
}

std::vector<FourierLoop> planar_samples(const RunConfig& c, std::uint64_t salt, int N, double amplitude) {
  std::vector<FourierLoop> out{planar_circle(N, 0.15, 0.1)};
  for (int i = 0; i < c.samples; ++i)
    out.push_back(random_loop(mix_seed(mix_seed(c.seed, salt), static_cast<std::uint64_t>(i)), 2, N, 2.0, amplitude));
  return out;
}

AxiomOptions axiom_options(const RunConfig& c) {
  AxiomOptions o;
  o.sweep = c.N;
  o.stable_tol = c.tol.stable;
  o.seed = c.seed;
  return o;
}

CheckOptions check_options(const RunConfig& c) {
  CheckOptions o;
  o.seed = c.seed;
  o.gradient_tol = c.tol.gradient;
  o.hessian_tol = c.tol.hessian;
  o.symmetry_tol = c.tol.symmetry;
  o.sweep = c.N;
  o.stable_tol = c.tol.stable;
  o.fredholm.gap_tolerance = c.tol.gap;
  return o;
}

nlohmann::json control_entry(nlohmann::json report, bool failed_as_expected) {
  return {{"report", std::move(report)}, {"verdict", failed_as_expected ? "expected-fail" : "unexpected-pass"}};
}

SuiteResult suite_floer_map(const RunConfig& c) {
  SuiteResult r{"floer_map", nlohmann::json::object(), true};
  const AxiomOptions opts = axiom_options(c);
  const auto samples = planar_samples(c, 1, 8, 0.2);
  const std::vector<Level> ss = levels(c.s);

  nlohmann::json maps = nlohmann::json::object();
  for (const DiffeoChart& chart : {shear_chart(), rotation_chart()}) {
    nlohmann::json per_s = nlohmann::json::array();
    for (const auto& rep : verify_floer_axioms(SuperpositionMap(chart), samples, ss, opts)) {
      per_s.push_back(to_json(rep));
      r.pass = r.pass && rep.pass();
    }
    maps[chart.name()] = per_s;
  }
  r.report["maps"] = maps;

  nlohmann::json leibniz = nlohmann::json::array();
  const FourierLoop q = samples.front().resized(16);
  const FourierLoop xi = random_direction(mix_seed(c.seed, 11), 2, 16, Level(1.0));
  const FourierLoop eta = random_direction(mix_seed(c.seed, 12), 2, 16, Level(1.0));
  const SuperpositionMap shear(shear_chart()), rot(rotation_chart());
  for (const auto& [name, psi, phi] : {std::tuple{"rotation∘shear", rot, shear}, std::tuple{"shear∘rotation", shear, rot}}) {
    const LeibnizSweep sw = leibniz_sweep(psi, phi, q, xi, eta);
    const bool ok = std::abs(sw.slope - 2.0) <= c.tol.leibniz_slope;
    leibniz.push_back({{"composite", name}, {"h", sw.h}, {"residual", sw.residual}, {"slope", sw.slope},
                       {"verdict", ok ? "pass" : "fail"}});
    r.pass = r.pass && ok;
  }
  r.report["leibniz"] = leibniz;

  if (c.negative_controls) {
    const FloerAxiomReport bad = verify_floer_axioms(SuperpositionMap(broken_c1_chart()), samples, opts);
    r.report["negative_controls"] = {{"broken-c1", control_entry(to_json(bad), !bad.pass())}};
    r.pass = r.pass && !bad.pass();
  }
  return r;
}

SuiteResult suite_floer_function(const RunConfig& c) {
  SuiteResult r{"floer_function", nlohmann::json::object(), true};
  const CheckOptions opts = check_options(c);
  std::vector<FourierLoop> samples;
  for (int i = 0; i < std::max(1, c.samples); ++i)
    samples.push_back(random_loop(mix_seed(mix_seed(c.seed, 2), static_cast<std::uint64_t>(i)), 2, 16, 2.0, 0.3));

  nlohmann::json functions = nlohmann::json::object();
  for (const HamiltonianData& h : {harmonic_hamiltonian(), anharmonic_hamiltonian()}) {
    const FloerFunctionNumeric F = symplectic_action(h);
    const FunctionReport g = gradient_axiom_check(F, samples, opts);
    const FunctionReport hs = hessian_axiom_check(F, samples, opts);
    functions[F.name] = {{"gradient", to_json(g)}, {"hessian", to_json(hs)}};
    r.pass = r.pass && g.pass() && hs.pass();
  }
  r.report["functions"] = functions;

  if (c.negative_controls) {
    auto iota = [](int N) { return identity_operator(2, N).with_levels(Level(1.0), Level(0.0)); };
    FredholmOptions fo;
    fo.gap_tolerance = c.tol.gap;
    const FredholmReport rep = fredholm_diagnostic(iota, Level(1.0), Level(0.0), c.N, fo);
    const bool expected = !rep.fredholm() && rep.sigma_min_decay >= 4.0;
    r.report["negative_controls"] = {{"inclusion", control_entry(to_json(rep), expected)}};
    r.pass = r.pass && expected;
  }
  return r;
}

SuiteResult suite_pullback(const RunConfig& c) {
  SuiteResult r{"pullback", nlohmann::json::object(), true};
  const FloerFunctionNumeric F = symplectic_action(harmonic_hamiltonian());
  const auto samples = planar_samples(c, 3, 16, 0.2);
  const SuperpositionMap phi(shear_chart(), Level(0.75));
  const PullbackReport rep = certify_pullback(F, phi, samples, check_options(c));
  r.report["certificate"] = to_json(rep);
  r.pass = rep.pass();

  std::vector<int> kappa_sweep;
  for (int n : c.N)
    if (n >= 32) kappa_sweep.push_back(n);
  if (kappa_sweep.empty()) kappa_sweep = c.N;
  nlohmann::json kappa = nlohmann::json::array();
  for (double s : c.s) {
    const KappaReport k = kappa_bound_check(F, phi.with_s(Level(s)), samples.front(), Level(s), kappa_sweep);
    kappa.push_back(to_json(k));
    r.pass = r.pass && k.holds;
  }
  r.report["kappa"] = kappa;
  return r;
}

FourierLoop smooth_factor() {
  FourierLoop g(1, 1);
  g.coords()(0) = 2.0;
  g.coords()(2) = 1.0 / std::sqrt(2.0);  // 2 + sin(2 pi t)
  return g;
}

std::vector<FourierLoop> holder_samples(const RunConfig& c, int N) {
  std::vector<FourierLoop> out;
  for (int i = 0; i < std::max(1, c.samples); ++i)
    out.push_back(random_loop(mix_seed(mix_seed(c.seed, 5), static_cast<std::uint64_t>(i)), 1, N, 2.5));
  return out;
}

SuiteResult suite_sobolev(const RunConfig& c) {
  SuiteResult r{"sobolev_evidence", nlohmann::json::object(), true};
  nlohmann::json mult = nlohmann::json::array();
  for (const auto& sig : all_signatures()) {
    const MultSweepReport m = mult_norm_sweep(smooth_factor(), sig, c.N, c.tol.stable);
    mult.push_back(to_json(m));
    r.pass = r.pass && m.bounded();
  }
  r.report["multiplication"] = mult;

  const InterpolationSuite sw = stein_weiss_check(50, mix_seed(c.seed, 4), 24, {0.25, 0.5, 0.75});
  r.report["stein_weiss"] = to_json(sw);
  r.pass = r.pass && sw.holds;

  const auto samples = holder_samples(c, c.N.back());
  nlohmann::json holder = nlohmann::json::array();
  for (double s : c.s) {
    const HolderReport h = holder_embedding_check(Level(s), samples, c.N, c.tol.holder);
    holder.push_back(to_json(h));
    r.pass = r.pass && h.pass();
  }
  r.report["holder"] = holder;

  if (c.negative_controls) {
    const MultSweepReport rough = mult_norm_sweep(power_law_factor(c.N.back(), 0.6), MultSignature::h1(), c.N,
                                                  c.tol.stable);
    const bool rough_ok = !rough.bounded() && rough.growth >= 2.0;
    const HolderReport endpoint = holder_embedding_check(Level(0.5), samples, c.N, c.tol.holder);
    r.report["negative_controls"] = {{"rough-factor", control_entry(to_json(rough), rough_ok)},
                                     {"holder-endpoint", control_entry(to_json(endpoint), endpoint.pass())}};
    r.pass = r.pass && rough_ok && endpoint.pass();
  }
  return r;
}

AtlasOptions atlas_options(const RunConfig& c) {
  AtlasOptions o;
  o.s_values = levels(c.s);
  o.axioms = axiom_options(c);
  return o;
}

SuiteResult suite_loop_atlas(const RunConfig& c) {
  SuiteResult r{"loop_atlas", nlohmann::json::object(), true};
  const Atlas A = sphere_small_loop_atlas();
  const Atlas B = rotated_atlas(A, axis_rotation({1.0, 0.0, 0.0}, 0.35), "sphere-rot-x");
  const Atlas C = rotated_atlas(A, axis_rotation({0.0, 1.0, 0.0}, 0.45), "sphere-rot-y");
  const auto corpus = equatorial_corpus(2 + c.samples, mix_seed(c.seed, 6));
  AtlasOptions opts = atlas_options(c);

  r.report["atlas"] = to_json(A);
  r.report["corpus"] = to_json(corpus);
  const CompatibilityReport self = check_compatibility(A, A, corpus, opts);
  r.report["self"] = to_json(self);
  r.pass = self.compatible;

  AtlasOptions single = opts;
  single.s_values = {A.s};
  const CompatibilityReport rotated = check_compatibility(A, B, corpus, single);
  r.report["rotated"] = to_json(rotated);
  r.pass = r.pass && rotated.compatible;

  single.axioms.sweep = {c.N.front(), c.N.size() > 1 ? c.N[1] : c.N.front()};
  const TransitivityReport trans = check_transitivity(A, B, C, corpus, single, c.tol.cocycle, c.tol.cocycle_dphi);
  r.report["transitivity"] = to_json(trans);
  r.pass = r.pass && trans.pass;

  if (c.negative_controls) {
    single.axioms.sweep = c.N;
    const CompatibilityReport broken = check_compatibility(A, broken_sphere_atlas(), corpus, single);
    r.report["negative_controls"] = {{"broken-atlas", control_entry(to_json(broken), !broken.compatible)}};
    r.pass = r.pass && !broken.compatible;
  }
  return r;
}

template <class Job>
void run_jobs(std::size_t count, int workers, const Job& job) {
  std::atomic<std::size_t> next{0};
  auto loop = [&] {
    for (std::size_t i = next++; i < count; i = next++) job(i);
  };
  const int n = std::max(1, std::min<int>(workers, static_cast<int>(count)));
  std::vector<std::thread> pool;
  for (int t = 1; t < n; ++t) pool.emplace_back(loop);
  loop();
  for (auto& t : pool) t.join();
}

std::vector<std::string> selected(const RunConfig& c) {
  std::vector<std::string> names = c.suites.empty() ? suite_names() : c.suites;
  std::sort(names.begin(), names.end());
  names.erase(std::unique(names.begin(), names.end()), names.end());
  return names;
}

}  // namespace

SuiteResult run_suite(const std::string& name, const RunConfig& config) {
  SuiteResult r;
  if (name == "floer_map")
    r = suite_floer_map(config);
  else if (name == "floer_function")
    r = suite_floer_function(config);
  else if (name == "pullback")
    r = suite_pullback(config);
  else if (name == "sobolev_evidence")
    r = suite_sobolev(config);
  else if (name == "loop_atlas")
    r = suite_loop_atlas(config);
  else
    throw ConfigError("unknown suite " + name);
  r.report["verdict"] = r.pass ? "pass" : "fail";
  return r;
}

VerifyResult run_verify(const RunConfig& config, int workers) {
  const std::vector<std::string> names = selected(config);
  std::vector<SuiteResult> results(names.size());
  std::vector<std::string> errors(names.size());
  run_jobs(names.size(), workers, [&](std::size_t i) {
    try {
      results[i] = run_suite(names[i], config);
    } catch (const std::exception& e) {
      results[i] = {names[i], {{"error", e.what()}, {"verdict", "fail"}}, false};
    }
  });

  VerifyResult out;
  out.pass = true;
  nlohmann::json suites = nlohmann::json::object();
  for (const auto& r : results) {
    suites[r.name] = r.report;
    out.pass = out.pass && r.pass;
  }
  out.report = {{"config", to_json(config)}, {"suites", suites}, {"verdict", out.pass ? "pass" : "fail"}};
  return out;
}

// ============================================================================
// Sweeps
// ============================================================================

std::vector<CsvRow> run_sweep(const RunConfig& config, int workers) {
  const double none = std::numeric_limits<double>::quiet_NaN();
  std::vector<std::function<std::vector<CsvRow>()>> jobs;

  jobs.push_back([&] {
    std::vector<CsvRow> rows;
    auto iota = [](int N) { return identity_operator(2, N).with_levels(Level(1.0), Level(0.0)); };
    for (const auto& e : fredholm_diagnostic(iota, Level(1.0), Level(0.0), config.N).sweep)
      rows.push_back({"fredholm", e.N, none, "iota_sigma_min", e.sigma_min});
    const FloerFunctionNumeric F = symplectic_action(harmonic_hamiltonian());
    const FourierLoop q = planar_circle(16, 0.15, 0.1);
    FredholmOptions fo;
    fo.gap_tolerance = config.tol.gap;
    for (const auto& e :
         fredholm_diagnostic([&](int N) { return F.hess(q.resized(N)); }, Level(1.0), Level(0.0), config.N, fo).sweep)
      rows.push_back({"fredholm", e.N, none, "hessian_gap_H1_H0", e.gap});
    for (const auto& e :
         fredholm_diagnostic([&](int N) { return F.hess2(q.resized(N)); }, Level(2.0), Level(1.0), config.N, fo).sweep)
      rows.push_back({"fredholm", e.N, none, "hessian_gap_H2_H1", e.gap});
    return rows;
  });

  jobs.push_back([&] {
    std::vector<CsvRow> rows;
    for (const auto& sig : all_signatures())
      for (const auto& p : mult_norm_sweep(smooth_factor(), sig, config.N).sweep)
        rows.push_back({"multiplication", p.N, none, "norm" + sig.label, p.value});
    for (const auto& p : mult_norm_sweep(power_law_factor(config.N.back(), 0.6), MultSignature::h1(), config.N).sweep)
      rows.push_back({"multiplication", p.N, none, "rough_norm(1,1->1)", p.value});
    return rows;
  });

  jobs.push_back([&] {
    std::vector<CsvRow> rows;
    const FloerFunctionNumeric F = symplectic_action(harmonic_hamiltonian());
    const FourierLoop q = planar_circle(16, 0.15, 0.1);
    for (double s : config.s) {
      const SuperpositionMap phi(shear_chart(), Level(s));
      for (const auto& e : kappa_bound_check(F, phi, q, Level(s), config.N).sweep) {
        rows.push_back({"kappa", e.N, s, "kappa", e.kappa});
        rows.push_back({"kappa", e.N, s, "K_norm", e.k_norm});
      }
    }
    return rows;
  });

  std::vector<std::vector<CsvRow>> parts(jobs.size());
  run_jobs(jobs.size(), workers, [&](std::size_t i) { parts[i] = jobs[i](); });
  std::vector<CsvRow> rows;
  for (auto& p : parts) rows.insert(rows.end(), p.begin(), p.end());
  return rows;
}

std::string to_csv(const std::vector<CsvRow>& rows) {
  std::ostringstream out;
  out << "suite,N,s,quantity,value\n";
  char buf[64];
  for (const auto& r : rows) {
    out << r.suite << ',' << r.N << ',';
    if (!std::isnan(r.s)) {
      std::snprintf(buf, sizeof buf, "%.17g", r.s);
      out << buf;
    }
    std::snprintf(buf, sizeof buf, "%.17g", r.value);
    out << ',' << r.quantity << ',' << buf << '\n';
  }
  return out.str();
}

// ============================================================================
// Demos
// ============================================================================

const std::vector<std::string>& demo_names() {
  static const std::vector<std::string> names = {"atlas", "pullback"};
  return names;
}

namespace {

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string demo_pullback() {
  std::ostringstream out;
  const FloerFunctionNumeric F = symplectic_action(harmonic_hamiltonian());
  const SuperpositionMap phi(shear_chart(), Level(0.75));
  const FloerFunctionNumeric G = pull_back(F, phi);
  const FourierLoop q = planar_circle(32, 0.15, 0.1);
  out << "Pull-back of the harmonic action through the shear (x, y) -> (x, y + x^2), s = 0.75, N = 32\n\n";

  out << "Gradient\n";
  const FourierLoop g = G.grad(q);
  for (int d = 0; d < 3; ++d) {
    const FourierLoop xi = random_direction(mix_seed(91, static_cast<std::uint64_t>(d)), 2, 32, Level(1.0));
    const double an = inner(g, xi, Level(0.0));
    const double fd = fd_directional(G.eval, q, xi);
    out << "  <grad, xi_" << d << ">_0 = " << fmt("%+.12e", an) << "   finite difference " << fmt("%+.12e", fd)
        << "   rel " << fmt("%.1e", relative_error(an, fd)) << "\n";
  }

  out << "\nHessian\n";
  const LevelOperator A = G.hess(q);
  const Eigen::MatrixXd W = level_weights(2, 32, Level(0.0)).asDiagonal() * A.matrix;
  out << "  level-0 symmetry residual " << fmt("%.2e", (W - W.transpose()).norm() / W.norm()) << "\n";
  for (int d = 0; d < 3; ++d) {
    const FourierLoop xi = random_direction(mix_seed(92, static_cast<std::uint64_t>(d)), 2, 32, Level(1.0));
    const FourierLoop eta = random_direction(mix_seed(93, static_cast<std::uint64_t>(d)), 2, 32, Level(1.0));
    const double an = inner(A.apply(xi), eta, Level(0.0));
    const double fd = fd_second(G.eval, q, xi, eta);
    out << "  <A xi_" << d << ", eta_" << d << ">_0 = " << fmt("%+.12e", an) << "   stencil " << fmt("%+.12e", fd)
        << "   rel " << fmt("%.1e", relative_error(an, fd)) << "\n";
  }
  const LevelOperator K = riesz_correction(F, phi, q, phi.s());
  out << "  ||conjugated term||_(1,0) = " << fmt("%.6f", op_norm(LevelOperator(A.matrix - K.matrix, Level(1.0), Level(0.0), 2, 32), Level(1.0), Level(0.0)))
      << "   ||K||_(s,0) = " << fmt("%.6f", op_norm(K, phi.s(), Level(0.0))) << "\n";

  out << "\nkappa\n";
  for (double s : {0.6, 0.75, 0.9}) {
    const KappaReport k = kappa_bound_check(F, phi.with_s(Level(s)), q, Level(s), {32, 64, 128});
    out << "  s = " << fmt("%.2f", s) << ":";
    for (const auto& e : k.sweep) out << "  N=" << e.N << " " << fmt("%.4f", e.k_norm) << " <= " << fmt("%.4f", e.kappa);
    out << (k.holds ? "   holds" : "   VIOLATED") << "\n";
  }

  out << "\nFredholm\n";
  const auto rep = fredholm_diagnostic([&](int N) { return G.hess(q.resized(N)); }, Level(1.0), Level(0.0),
                                       {16, 32, 64, 128});
  for (const auto& e : rep.sweep)
    out << "  N=" << e.N << "  ker " << e.ker_dim << "  coker " << e.coker_dim << "  gap " << fmt("%.6f", e.gap)
        << "\n";
  out << "  verdict " << rep.verdict << "\n";
  return out.str();
}

std::string demo_atlas() {
  std::ostringstream out;
  const Atlas A = sphere_small_loop_atlas();
  const auto corpus = equatorial_corpus(4, 3);
  out << "Stereographic atlas of S^2: charts N and S with 150 degree caps, transition x -> x/|x|^2\n\n";
  out << "Cocycle residuals on corpus loops (N = 16)\n";
  out << "  loop  |phi_SN(phi_NS q) - q|/|q|   |phi_NS q - x/|x|^2 q|\n";
  const SuperpositionMap ns = transition(A, "N", "S"), sn = transition(A, "S", "N");
  const SuperpositionMap inversion(stereographic_transition_chart());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const FourierLoop q = chart_loop(A.charts[0], corpus[i], 16);
    const FourierLoop p = ns.apply(q);
    out << "  " << i << "     " << fmt("%.3e", sobolev_norm(sn.apply(p) - q, Level(0.0)) / sobolev_norm(q, Level(0.0)))
        << "                   " << fmt("%.3e", sobolev_norm(p - inversion.apply(q), Level(0.0))) << "\n";
  }
  const Atlas B = rotated_atlas(A, axis_rotation({1.0, 0.0, 0.0}, 0.35), "sphere-rot-x");
  const Atlas C = rotated_atlas(A, axis_rotation({0.0, 1.0, 0.0}, 0.45), "sphere-rot-y");
  AtlasOptions opts;
  opts.axioms.sweep = {16, 32};
  const TransitivityReport t = check_transitivity(A, B, C, corpus, opts);
  out << "\nTransitivity across sphere, sphere-rot-x, sphere-rot-y\n";
  out << "  triples " << t.triples << "  apply " << fmt("%.2e", t.cocycle_apply) << "  dphi "
      << fmt("%.2e", t.cocycle_dphi) << "  inverse " << fmt("%.2e", t.inverse_residual) << "  local/global "
      << (t.local_global ? "agree" : "DISAGREE") << "\n";
  return out.str();
}

}  // namespace

std::string run_demo(const std::string& name) {
  if (name == "pullback") return demo_pullback();
  if (name == "atlas") return demo_atlas();
  throw ConfigError("unknown demo " + name);
}

}  // namespace floerlab
