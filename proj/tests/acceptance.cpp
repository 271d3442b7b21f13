// Acceptance run: one [PASS]/[FAIL] line per criterion.

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "floerlab/floer_function.hpp"
#include "floerlab/floer_map.hpp"
#include "floerlab/harness.hpp"
#include "floerlab/level_operator.hpp"
#include "floerlab/loop_atlas.hpp"
#include "floerlab/pullback.hpp"
#include "floerlab/sobolev_evidence.hpp"

using namespace floerlab;

namespace {

using ld = long double;
constexpr double kPi = std::numbers::pi;
constexpr ld kPiL = std::numbers::pi_v<ld>;

int failures = 0;

void report(int id, const std::string& title, bool ok, const std::string& detail, double seconds) {
  std::printf("[%s] %d %s: %s (%.1fs)\n", ok ? "PASS" : "FAIL", id, title.c_str(), detail.c_str(), seconds);
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

double rel(double a, double b) {
  const double m = std::max(std::abs(a), std::abs(b));
  return m == 0.0 ? 0.0 : std::abs(a - b) / m;
}

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(); }
};

// ----------------------------------------------------------------------------
// Long-double evaluation of the harmonic action after the shear, on the
// 2N+1 collocation nodes, by direct trigonometric sums.
// ----------------------------------------------------------------------------

class ShearActionOracle {
 public:
  explicit ShearActionOracle(int N) : N_(N), L_(2 * N + 1), cos_(L_ * (N + 1)), sin_(L_ * (N + 1)) {
    for (int l = 0; l < L_; ++l)
      for (int k = 0; k <= N_; ++k) {
        const ld a = 2.0L * kPiL * static_cast<ld>((static_cast<long>(k) * l) % L_) / L_;
        cos_[l * (N_ + 1) + k] = std::cos(a);
        sin_[l * (N_ + 1) + k] = std::sin(a);
      }
  }

  /// f(Phi(q + a xi + b eta)) with Phi(x, y) = (x, y + x^2) and H = |x|^2 / 2.
  ld operator()(const FourierLoop& q, const FourierLoop* xi = nullptr, ld a = 0, const FourierLoop* eta = nullptr,
                ld b = 0) const {
    const int B = block_size(N_);
    std::vector<ld> c(2 * B);
    for (int j = 0; j < 2 * B; ++j) {
      c[j] = q.coords()(j);
      if (xi) c[j] += a * xi->coords()(j);
      if (eta) c[j] += b * eta->coords()(j);
    }
    std::vector<ld> x(L_), y(L_);
    for (int l = 0; l < L_; ++l) {
      x[l] = nodal(c.data(), l);
      y[l] = nodal(c.data() + B, l);
      y[l] += x[l] * x[l];
    }
    const std::vector<ld> vx = transform(x), vy = transform(y);
    // <J0 v, v'>_0 with J0 v = (-v_y, v_x)
    ld sympl = 0;
    for (int k = 1; k <= N_; ++k) {
      const ld w = 2.0L * kPiL * k;
      const ld dxc = w * vx[2 * k], dxs = -w * vx[2 * k - 1];
      const ld dyc = w * vy[2 * k], dys = -w * vy[2 * k - 1];
      sympl += -vy[2 * k - 1] * dxc - vy[2 * k] * dxs + vx[2 * k - 1] * dyc + vx[2 * k] * dys;
    }
    ld h = 0;
    for (int l = 0; l < L_; ++l) h += 0.5L * (x[l] * x[l] + y[l] * y[l]);
    return -0.5L * sympl - h / L_;
  }

 private:
  ld nodal(const ld* c, int l) const {
    ld s = 0;
    for (int k = 1; k <= N_; ++k) s += c[2 * k - 1] * cos_[l * (N_ + 1) + k] + c[2 * k] * sin_[l * (N_ + 1) + k];
    return c[0] + std::sqrt(2.0L) * s;
  }
  std::vector<ld> transform(const std::vector<ld>& v) const {
    std::vector<ld> out(block_size(N_), 0.0L);
    for (int l = 0; l < L_; ++l) {
      out[0] += v[l];
      for (int k = 1; k <= N_; ++k) {
        out[2 * k - 1] += v[l] * cos_[l * (N_ + 1) + k];
        out[2 * k] += v[l] * sin_[l * (N_ + 1) + k];
      }
    }
    out[0] /= L_;
    for (int j = 1; j < block_size(N_); ++j) out[j] *= std::sqrt(2.0L) / L_;
    return out;
  }

  int N_, L_;
  std::vector<ld> cos_, sin_;
};

/// Richardson-extrapolated central difference; exact for quartics up to roundoff.
ld oracle_first(const ShearActionOracle& f, const FourierLoop& q, const FourierLoop& xi, ld h) {
  auto d = [&](ld s) { return (f(q, &xi, s) - f(q, &xi, -s)) / (2 * s); };
  return (4 * d(h / 2) - d(h)) / 3;
}

ld oracle_second(const ShearActionOracle& f, const FourierLoop& q, const FourierLoop& xi, const FourierLoop& eta,
                 ld h) {
  auto d = [&](ld s) {
    return (f(q, &xi, s, &eta, s) - f(q, &xi, s, &eta, -s) - f(q, &xi, -s, &eta, s) + f(q, &xi, -s, &eta, -s)) /
           (4 * s * s);
  };
  return (4 * d(h / 2) - d(h)) / 3;
}

/// Weighted spectral norm from an explicit weight formula and a dense symmetric eigensolve.
double dense_norm(const Eigen::MatrixXd& T, int N, double a, double b) {
  const int B = block_size(N);
  Eigen::VectorXd wa(T.cols()), wb(T.rows());
  for (Eigen::Index i = 0; i < T.cols(); ++i) {
    const int k = mode_of(static_cast<int>(i % B));
    wa(i) = std::pow(1.0 + 4.0 * kPi * kPi * k * k, -a / 2.0);
    wb(i) = std::pow(1.0 + 4.0 * kPi * kPi * k * k, b / 2.0);
  }
  const Eigen::MatrixXd S = wb.asDiagonal() * T * wa.asDiagonal();
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S.transpose() * S, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

double lsq_slope(const std::vector<double>& h, const std::vector<double>& r) {
  double mx = 0, my = 0;
  const double n = static_cast<double>(h.size());
  for (std::size_t i = 0; i < h.size(); ++i) {
    mx += std::log(h[i]) / n;
    my += std::log(r[i]) / n;
  }
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    sxy += (std::log(h[i]) - mx) * (std::log(r[i]) - my);
    sxx += (std::log(h[i]) - mx) * (std::log(h[i]) - mx);
  }
  return sxy / sxx;
}

FourierLoop sample_q(std::uint64_t i, int N) { return random_loop(mix_seed(1001, i), 2, N, 2.0, 0.3); }
FourierLoop sample_dir(std::uint64_t salt, std::uint64_t i, int N) {
  return random_direction(mix_seed(salt, i), 2, N, Level(1.0));
}

// ----------------------------------------------------------------------------

void criterion_1() {
  Timer t;
  const int N = 128;
  const FloerFunctionNumeric F = symplectic_action(harmonic_hamiltonian());
  const SuperpositionMap phi(shear_chart());
  const ShearActionOracle f(N);
  double worst = 0.0;
  for (std::uint64_t i = 0; i < 100; ++i) {
    const FourierLoop q = sample_q(i, N);
    const FourierLoop xi = sample_dir(2002, i, N);
    const double an = inner(pull_back_gradient(F, phi, q), xi, Level(0.0));
    worst = std::max(worst, rel(an, static_cast<double>(oracle_first(f, q, xi, 1e-3L))));
  }
  report(1, "pull-back gradient", worst <= 1e-7, "max rel err " + fmt("%.2e", worst) + " over 100 (q, xi), N=128",
         t.seconds());
}

void criterion_2() {
  Timer t;
  const int N = 64;
  const FloerFunctionNumeric F = symplectic_action(harmonic_hamiltonian());
  const SuperpositionMap phi(shear_chart());
  const ShearActionOracle f(N);
  double worst = 0.0, worst_sym = 0.0;
  for (std::uint64_t i = 0; i < 100; ++i) {
    const FourierLoop q = sample_q(i, N);
    const FourierLoop xi = sample_dir(3003, i, N);
    const FourierLoop eta = sample_dir(4004, i, N);
    const LevelOperator A = pull_back_hessian(F, phi, q, phi.s());
    const double an = inner(A.apply(xi), eta, Level(0.0));
    worst = std::max(worst, rel(an, static_cast<double>(oracle_second(f, q, xi, eta, 1e-2L))));
    worst_sym = std::max(worst_sym, (A.matrix - A.matrix.transpose()).norm() / A.matrix.norm());
  }
  report(2, "pull-back Hessian", worst <= 1e-6 && worst_sym <= 1e-10,
         "max rel err " + fmt("%.2e", worst) + ", symmetry " + fmt("%.2e", worst_sym) + " over 100 pairs, N=64",
         t.seconds());
}

void criterion_3() {
  Timer t;
  const FloerFunctionNumeric F = symplectic_action(harmonic_hamiltonian());
  const SuperpositionMap phi(shear_chart());
  double worst = 0.0;
  for (std::uint64_t i = 0; i < 20; ++i) {
    const int N = 32;
    const FourierLoop q = sample_q(i, N);
    const FourierLoop xi = sample_dir(5005, i, N);
    const FourierLoop eta = sample_dir(6006, i, N);
    const LevelOperator K = riesz_correction(F, phi, q, Level(0.75));
    // grad f(v) = J0 v' - v for H = |x|^2 / 2; D^2 Phi(xi, eta) = (0, 2 xi_x eta_x) nodally
    const FourierLoop v = phi.apply(q);
    const FourierLoop dv = v.derivative();
    const int B = block_size(N);
    FourierLoop g(2, N);
    g.coords().head(B) = -dv.coords().tail(B) - v.coords().head(B);
    g.coords().tail(B) = dv.coords().head(B) - v.coords().tail(B);
    const Eigen::MatrixXd X = nodal_values(xi), Y = nodal_values(eta);
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(X.rows(), 2);
    D.col(1) = 2.0 * X.col(0).cwiseProduct(Y.col(0));
    const double lhs = inner(K.apply(xi), eta, Level(0.0));
    const double rhs = inner(g, interpolate(D, N), Level(0.0));
    worst = std::max(worst, rel(lhs, rhs));
  }
  bool kappa_ok = true;
  double worst_ratio = 0.0;
  for (double s : {0.6, 0.75, 0.9}) {
    const KappaReport k = kappa_bound_check(F, phi.with_s(Level(s)), sample_q(0, 16), Level(s), {32, 64, 128, 256});
    kappa_ok = kappa_ok && k.holds;
    worst_ratio = std::max(worst_ratio, k.worst_ratio);
  }
  report(3, "Riesz correction", worst <= 1e-10 && kappa_ok,
         "pairing rel err " + fmt("%.2e", worst) + ", max ||K||/kappa " + fmt("%.3f", worst_ratio) +
             " over N 32..256, s 0.6/0.75/0.9",
         t.seconds());
}

void criterion_4() {
  Timer t;
  const FloerFunctionNumeric F = symplectic_action(harmonic_hamiltonian());
  const std::vector<int> sweep{16, 32, 64, 128, 256};
  // per-mode blocks of J0 d/dt - 1 have singular values |2 pi k +- 1| / sqrt(1 + 4 pi^2 k^2) at both level pairs
  auto closed_min = [](int N) {
    double m = 1.0;
    for (int k = 1; k <= N; ++k) m = std::min(m, std::abs(2.0 * kPi * k - 1.0) / std::sqrt(1.0 + 4.0 * kPi * kPi * k * k));
    return m;
  };
  bool ok = true;
  double spread = 0.0, oracle_err = 0.0;
  for (auto [a, b, lvl2] : {std::tuple{1.0, 0.0, false}, std::tuple{2.0, 1.0, true}}) {
    const OperatorFamily fam = [&](int N) {
      const FourierLoop q = sample_q(0, 8).resized(N);
      return lvl2 ? F.hess2(q) : F.hess(q);
    };
    const FredholmReport r = fredholm_diagnostic(fam, Level(a), Level(b), sweep);
    for (const FredholmEntry& e : r.sweep) {
      ok = ok && e.ker_dim == e.coker_dim;
      oracle_err = std::max(oracle_err, rel(e.sigma_min, closed_min(e.N)));
    }
    double lo = 1e300, hi = 0.0;
    for (const FredholmEntry& e : r.sweep)
      if (e.N >= 64) lo = std::min(lo, e.gap), hi = std::max(hi, e.gap);
    spread = std::max(spread, (hi - lo) / hi);
    ok = ok && r.fredholm();
  }
  const FredholmReport incl = fredholm_diagnostic([](int N) { return identity_operator(2, N); }, Level(1.0),
                                                  Level(0.0), {32, 64, 128, 256});
  const double decay = incl.sweep.front().sigma_min / incl.sweep.back().sigma_min;
  const double closed_decay = std::sqrt((1.0 + 4.0 * kPi * kPi * 256 * 256) / (1.0 + 4.0 * kPi * kPi * 32 * 32));
  ok = ok && spread <= 0.02 && oracle_err <= 1e-10 && decay >= 4.0 && !incl.fredholm() &&
       rel(decay, closed_decay) <= 1e-8;
  report(4, "Fredholm index zero", ok,
         "gap spread " + fmt("%.2e", spread) + ", sigma_min vs per-mode oracle " + fmt("%.1e", oracle_err) +
             ", inclusion decay " + fmt("%.2f", decay) + "x",
         t.seconds());
}

void criterion_5() {
  Timer t;
  const int N = 24;
  double worst = -1e300;
  for (std::uint64_t i = 0; i < 50; ++i) {
    FourierLoop g = random_loop(mix_seed(7007, i), 1, 6, 3.0);
    g.coords()(0) += 1.0;
    const Eigen::MatrixXd T = mult_operator(g, MultSignature::h1_on_l2(), N).matrix;
    const double n0 = dense_norm(T, N, 0.0, 0.0), n1 = dense_norm(T, N, 1.0, 1.0);
    for (double s : {0.25, 0.5, 0.75})
      worst = std::max(worst, dense_norm(T, N, s, s) - std::pow(n0, 1.0 - s) * std::pow(n1, s));
  }
  const InterpolationSuite lib = stein_weiss_check(50, 4242, N, {0.25, 0.5, 0.75});
  report(5, "Stein-Weiss interpolation", worst <= 1e-10 && lib.holds,
         "max excess " + fmt("%.2e", worst) + " (dense oracle), " + fmt("%.2e", lib.worst_excess) +
             " (library) over 50 operators",
         t.seconds());
}

void criterion_6() {
  Timer t;
  FourierLoop g(1, 1);
  g.coords()(0) = 2.0;
  g.coords()(2) = 1.0 / std::sqrt(2.0);
  bool ok = true;
  double spread = 0.0;
  double l2_norm = 0.0;
  for (const MultSignature& sig : all_signatures()) {
    const MultSweepReport r = mult_norm_sweep(g, sig);
    ok = ok && r.bounded() && r.spread <= 0.05;
    spread = std::max(spread, r.spread);
    if (sig.label == "(1,0->0)") l2_norm = r.sweep.back().value;
  }
  // sup |2 + sin| = 3 is the L2 multiplier norm
  ok = ok && std::abs(l2_norm - 3.0) <= 0.03;
  const MultSweepReport rough = mult_norm_sweep(power_law_factor(256, 0.6), MultSignature::h1());
  ok = ok && !rough.bounded() && rough.growth >= 2.0;
  report(6, "Sobolev multiplication", ok,
         "max spread " + fmt("%.2e", spread) + ", L2 norm " + fmt("%.4f", l2_norm) + ", rough growth " +
             fmt("%.2f", rough.growth) + "x",
         t.seconds());
}

void criterion_7() {
  Timer t;
  FourierLoop q(2, 16);
  q.coords()(0) = 0.1;
  q.coords()(1) = 0.15 / std::sqrt(2.0);
  q.coords()(block_size(16) + 2) = 0.15 / std::sqrt(2.0);
  const SuperpositionMap shear(shear_chart()), rot(rotation_chart());
  bool ok = true;
  std::string detail;
  for (std::uint64_t i = 0; i < 3; ++i) {
    const FourierLoop xi = sample_dir(8008, i, 16), eta = sample_dir(9009, i, 16);
    for (const auto& [psi, phi] : {std::pair{shear, rot}, std::pair{rot, shear}}) {
      const LeibnizSweep sw = leibniz_sweep(psi, phi, q, xi, eta);
      const double slope = lsq_slope(sw.h, sw.residual);
      ok = ok && std::abs(slope - 2.0) <= 0.2 && std::abs(slope - sw.slope) <= 1e-12;
      if (i == 0) detail += (detail.empty() ? "slopes " : ", ") + fmt("%.3f", slope);
    }
  }
  report(7, "Leibniz rule", ok, detail + " (shear/rotation composites, 3 directions each)", t.seconds());
}

void criterion_8() {
  Timer t;
  const std::vector<int> sweep{16, 32, 64, 128, 256};
  std::vector<FourierLoop> samples;
  for (std::uint64_t i = 0; i < 3; ++i) samples.push_back(random_loop(mix_seed(1111, i), 1, 256, 2.5));

  // direct evaluation of the dyadic seminorm at N = 16 on a 128-point grid
  const FourierLoop u = samples[0].resized(16);
  double direct = 0.0;
  for (int j = 1; j <= 7; ++j) {
    const double y = std::ldexp(1.0, -j);
    for (int x = 0; x < 128; ++x) {
      const double d = std::abs(u.evaluate((x + 128.0 * y) / 128.0)(0) - u.evaluate(x / 128.0)(0));
      direct = std::max(direct, d / std::pow(y, 0.25));
    }
  }
  const double seminorm_err = rel(direct, holder_seminorm(u, 0.25));

  bool ok = seminorm_err <= 1e-12;
  double spread = 0.0;
  for (double s : {0.6, 0.75, 0.9}) {
    const HolderReport r = holder_embedding_check(Level(s), samples, sweep, 0.10);
    ok = ok && r.pass();
    spread = std::max({spread, r.spread, r.track_spread});
  }
  const HolderReport e = holder_embedding_check(Level(0.5), samples, sweep, 0.10);
  ok = ok && e.monotone_growth && e.pass();
  report(8, "Hölder embedding", ok,
         "max spread " + fmt("%.3f", spread) + ", endpoint kernel growth " +
             fmt("%.2f", e.kernel_ratio.back().value / e.kernel_ratio.front().value) + "x, seminorm vs direct " +
             fmt("%.1e", seminorm_err),
         t.seconds());
}

void criterion_9() {
  Timer t;
  const Atlas A = sphere_small_loop_atlas();
  const auto corpus = equatorial_corpus(4, mix_seed(7, 6));
  AtlasOptions opts;
  opts.s_values = {Level(0.6), Level(0.75), Level(0.9)};
  const CompatibilityReport self = check_compatibility(A, A, corpus, opts);

  // closed-form transition x / |x|^2 between the two projections
  double closed = 0.0;
  const SuperpositionMap ns = transition(A, "N", "S");
  for (const Eigen::Vector3d& p : fibonacci_sphere(400))
    if (A.chart("N").covers(p) && A.chart("S").covers(p)) {
      const Eigen::Vector2d x = A.chart("N").project(p);
      closed = std::max(closed, (ns.chart().value(x) - x / x.squaredNorm()).norm());
    }

  const Atlas B = rotated_atlas(A, axis_rotation({1.0, 0.0, 0.0}, 0.35), "sphere-rot-x");
  const Atlas C = rotated_atlas(A, axis_rotation({0.0, 1.0, 0.0}, 0.45), "sphere-rot-y");
  AtlasOptions trans = opts;
  trans.s_values = {A.s};
  trans.axioms.sweep = {16, 32};
  const TransitivityReport tr = check_transitivity(A, B, C, corpus, trans);
  const bool ok = self.compatible && closed <= 1e-12 && tr.pass && tr.cocycle_apply <= 1e-10 &&
                  tr.cocycle_dphi <= 1e-10 && tr.local_global;
  report(9, "sphere atlas", ok,
         "axioms " + std::string(self.compatible ? "pass" : "fail") + " at s 0.6/0.75/0.9, cocycle " +
             fmt("%.1e", std::max(tr.cocycle_apply, tr.cocycle_dphi)) + ", " + std::to_string(tr.triples) +
             " triples, local-global " + (tr.local_global ? "consistent" : "inconsistent"),
         t.seconds());
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void criterion_10() {
  Timer t;
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "floerlab_acceptance";
  fs::create_directories(dir);
  std::ofstream(dir / "config.json") << R"({"N": [16, 32, 64], "s": [0.75], "seed": 7})";
  int codes[2];
  for (int i = 0; i < 2; ++i) {
    const std::string cmd = std::string(FLOERLAB_CLI) + " verify --config " + (dir / "config.json").string() +
                            " --out " + (dir / ("run" + std::to_string(i) + ".json")).string();
    codes[i] = std::system(cmd.c_str());
  }
  const std::string a = slurp(dir / "run0.json"), b = slurp(dir / "run1.json");
  const bool ok = codes[0] == 0 && codes[1] == 0 && !a.empty() && a == b;
  report(10, "determinism", ok, std::to_string(a.size()) + " bytes, " + (a == b ? "identical" : "different"),
         t.seconds());
}

}  // namespace

int main() {
  const std::vector<std::function<void()>> criteria{criterion_1, criterion_2, criterion_3, criterion_4,
                                                    criterion_5, criterion_6, criterion_7, criterion_8,
                                                    criterion_9, criterion_10};
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    try {
      criteria[i]();
    } catch (const std::exception& e) {
      std::printf("[FAIL] %zu raised: %s\n", i + 1, e.what());
      ++failures;
    }
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
