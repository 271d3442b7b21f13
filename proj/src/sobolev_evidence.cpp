#include "floerlab/sobolev_evidence.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "floerlab/errors.hpp"

namespace floerlab {

MultSignature MultSignature::h1() { return {"(1,1->1)", Level(1.0), Level(1.0), false, false}; }
MultSignature MultSignature::c0() { return {"(C0,0->0)", Level(0.0), Level(0.0), false, true}; }
MultSignature MultSignature::h1_on_l2() { return {"(1,0->0)", Level(0.0), Level(0.0), false, false}; }
MultSignature MultSignature::dual_h1() { return {"(-1,1->-1)", Level(-1.0), Level(-1.0), true, false}; }

MultSignature MultSignature::parse(const std::string& label) {
  for (const auto& s : all_signatures())
    if (s.label == label) return s;
  throw ConfigError("unknown multiplication signature " + label);
}

const std::vector<MultSignature>& all_signatures() {
  static const std::vector<MultSignature> sigs = {MultSignature::h1(), MultSignature::c0(),
                                                  MultSignature::h1_on_l2(), MultSignature::dual_h1()};
  return sigs;
}

namespace {

void require_scalar(const FourierLoop& g) {
  if (g.dim() != 1) throw DimensionMismatch("multiplication factor must be a scalar loop");
}

}  // namespace

FourierLoop multiply(const FourierLoop& g, const FourierLoop& h) {
  require_scalar(g);
  const Eigen::MatrixXd G = nodal_values(g.resized(h.order()));
  Eigen::MatrixXd H = nodal_values(h);
  for (int c = 0; c < h.dim(); ++c) H.col(c).array() *= G.col(0).array();
  return interpolate(H, h.order());
}

DualFunctional multiply(const DualFunctional& f, const FourierLoop& g) {
  const LevelOperator T = mult_operator(g, MultSignature::dual_h1(), f.order(), f.dim());
  return DualFunctional(T.apply(f.representative()));
}

LevelOperator mult_operator(const FourierLoop& g, const MultSignature& sig, int N, int dim) {
  require_scalar(g);
  const Eigen::VectorXd values = nodal_values(g.resized(N)).col(0);
  Eigen::MatrixXd field = Eigen::MatrixXd::Zero(values.size(), dim * dim);
  for (int c = 0; c < dim; ++c) field.col(c * dim + c) = values;
  LevelOperator M = multiplication_operator(field, dim, N, sig.in, sig.out);
  if (sig.dual) M.matrix.transposeInPlace();
  return M;
}

LevelOperator mult_operator(const FourierLoop& g, const MultSignature& sig) {
  return mult_operator(g, sig, g.order());
}

double sup_norm(const FourierLoop& g) {
  const GridBridge grid(g.order(), std::max(4 * g.order(), 2));
  return grid.samples(g).cwiseAbs().maxCoeff();
}

MultSweepReport mult_norm_sweep(const FourierLoop& g, const MultSignature& sig, const std::vector<int>& sweep,
                                double rel_tol, int from_N) {
  MultSweepReport r;
  r.signature = sig.label;
  for (int N : sweep) r.sweep.push_back({N, op_norm(mult_operator(g, sig, N), sig.in, sig.out)});
  if (r.sweep.empty()) throw ConfigError("empty truncation sweep");
  r.spread = stabilization_spread(r.sweep, from_N);
  if (r.sweep.front().value > 0.0) r.growth = r.sweep.back().value / r.sweep.front().value;
  const FourierLoop gN = g.resized(sweep.back());
  const double factor = sig.continuous_factor ? sup_norm(gN) : sobolev_norm(gN, Level(1.0));
  r.constant = factor > 0.0 ? r.sweep.back().value / factor : 0.0;
  r.verdict = r.spread <= rel_tol ? "bounded" : "unbounded";
  return r;
}

nlohmann::json to_json(const MultSweepReport& r) {
  return {{"signature", r.signature},
          {"sweep", to_json(r.sweep, "norm")},
          {"spread", r.spread},
          {"growth", r.growth},
          {"constant", r.constant},
          {"verdict", r.verdict}};
}

FourierLoop power_law_factor(int N, double decay) {
  FourierLoop g(1, N);
  g.coords()(0) = 1.0;
  for (int k = 1; k <= N; ++k) g.coords()(2 * k - 1) = std::pow(static_cast<double>(k), -decay);
  return g;
}

// ----------------------------------------------------------------------------

InterpolationSuite stein_weiss_check(int count, std::uint64_t seed, int N, const std::vector<double>& s_values,
                                     double slack) {
  InterpolationSuite r;
  r.operators = count;
  r.s_values = s_values;
  r.holds = true;
  r.worst_excess = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < count; ++i) {
    FourierLoop g = random_loop(mix_seed(seed, static_cast<std::uint64_t>(i)), 1, N, 3.0);
    g.coords()(0) += 1.0;
    const LevelOperator T = mult_operator(g, MultSignature::h1_on_l2());
    for (double s : s_values) {
      const InterpolationReport ir = check_interpolation(T, s, slack);
      r.worst_excess = std::max(r.worst_excess, ir.norm_s - ir.bound);
      r.holds = r.holds && ir.holds;
    }
  }
  return r;
}

nlohmann::json to_json(const InterpolationSuite& r) {
  return {{"operators", r.operators}, {"s", r.s_values}, {"worst_excess", r.worst_excess}, {"holds", r.holds}};
}

// ============================================================================
// Hölder embedding
// ============================================================================

FourierLoop extremal_kernel(int N, Level s) {
  FourierLoop K(1, N);
  K.coords()(0) = 1.0;
  for (int k = 1; k <= N; ++k) K.coords()(2 * k - 1) = std::sqrt(2.0) / mode_weight(k, s);
  return K;
}

double holder_seminorm(const FourierLoop& u, double alpha) {
  // A power-of-two grid makes every dyadic offset a whole number of grid steps.
  const int points = static_cast<int>(std::bit_ceil(static_cast<unsigned>(8 * std::max(u.order(), 1))));
  const GridBridge grid(u.order(), points / 2);
  const Eigen::MatrixXd v = grid.samples(u);
  double best = 0.0;
  for (int shift = points / 2; shift >= 1; shift /= 2) {
    const double y = static_cast<double>(shift) / points;
    const double scale = std::pow(y, -alpha);
    for (int x = 0; x < points; ++x) {
      const double d = (v.row((x + shift) % points) - v.row(x)).norm();
      best = std::max(best, d * scale);
    }
  }
  return best;
}

HolderReport holder_embedding_check(Level s, const std::vector<FourierLoop>& samples, const std::vector<int>& sweep,
                                    double rel_tol, int from_N) {
  if (s.value() < 0.5 || s.value() >= 1.5) throw LevelError("Hölder embedding needs 1/2 <= s < 3/2");
  if (sweep.empty()) throw ConfigError("empty truncation sweep");
  HolderReport r;
  r.s = s.value();
  r.alpha = s.value() - 0.5;
  r.endpoint = s.value() == 0.5;
  std::vector<Sweep> tracks(samples.size() + 1);
  for (int N : sweep) {
    auto ratio_of = [&](const FourierLoop& u) {
      const double n = sobolev_norm(u, s);
      return n > 0.0 ? holder_seminorm(u, r.alpha) / n : 0.0;
    };
    tracks[0].push_back({N, ratio_of(extremal_kernel(N, s))});
    for (std::size_t i = 0; i < samples.size(); ++i) tracks[i + 1].push_back({N, ratio_of(samples[i].resized(N))});
    double ratio = 0.0;
    for (const Sweep& t : tracks) ratio = std::max(ratio, t.back().value);
    r.ratio.push_back({N, ratio});
    r.constant = std::max(r.constant, ratio);
  }
  r.kernel_ratio = tracks[0];
  r.spread = stabilization_spread(r.ratio, from_N);
  for (const Sweep& t : tracks)
    if (t.back().value > 0.0) r.track_spread = std::max(r.track_spread, stabilization_spread(t, from_N));
  r.stable = r.spread <= rel_tol && r.track_spread <= rel_tol;
  r.monotone_growth = r.kernel_ratio.size() >= 2;
  for (std::size_t i = 1; i < r.kernel_ratio.size(); ++i)
    r.monotone_growth = r.monotone_growth && r.kernel_ratio[i].value > r.kernel_ratio[i - 1].value;
  if (r.stable && !r.endpoint)
    r.verdict = "stable";
  else if (r.endpoint && r.monotone_growth)
    r.verdict = "divergent";
  else
    r.verdict = "fail";
  return r;
}

nlohmann::json to_json(const HolderReport& r) {
  return {{"s", r.s},
          {"alpha", r.alpha},
          {"ratio", to_json(r.ratio, "ratio")},
          {"kernel_ratio", to_json(r.kernel_ratio, "ratio")},
          {"constant", r.constant},
          {"spread", r.spread},
          {"track_spread", r.track_spread},
          {"monotone_growth", r.monotone_growth},
          {"endpoint", r.endpoint},
          {"verdict", r.verdict}};
}

}  // namespace floerlab
