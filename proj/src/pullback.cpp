#include "floerlab/pullback.hpp"

#include <algorithm>
#include <cmath>

#include "floerlab/errors.hpp"

namespace floerlab {

FourierLoop pull_back_gradient(const FloerFunctionNumeric& F, const SuperpositionMap& phi, const FourierLoop& q) {
  const LevelOperator D = phi.dphi(q);
  return adjoint(D, Level(0.0)).apply(F.grad(phi.apply(q)));
}

LevelOperator riesz_correction(const FloerFunctionNumeric& F, const SuperpositionMap& phi, const FourierLoop& q,
                               Level s) {
  const FourierLoop g = F.grad(phi.apply(q));
  const Eigen::MatrixXd form = phi.d2phi(q).form_against(g);
  // Level-0 Riesz map: solve <K xi, eta>_0 = form(xi, eta) through the Gram weight.
  const Eigen::VectorXd w0 = level_weights(q.dim(), q.order(), Level(0.0));
  Eigen::MatrixXd K = w0.cwiseInverse().asDiagonal() * form.transpose();
  return LevelOperator(std::move(K), s, Level(0.0), q.dim(), q.order());
}

namespace {

Eigen::MatrixXd conjugated(const LevelOperator& D, const LevelOperator& A) {
  return adjoint(D, Level(0.0)).matrix * A.matrix * D.matrix;
}

}  // namespace

LevelOperator pull_back_hessian(const FloerFunctionNumeric& F, const SuperpositionMap& phi, const FourierLoop& q,
                                Level s) {
  const LevelOperator D = phi.dphi(q);
  const LevelOperator A = F.hess(phi.apply(q));
  const LevelOperator K = riesz_correction(F, phi, q, s);
  return LevelOperator(conjugated(D, A) + K.matrix, Level(1.0), Level(0.0), q.dim(), q.order());
}

LevelOperator pull_back_hessian_level2(const FloerFunctionNumeric& F, const SuperpositionMap& phi,
                                       const FourierLoop& q, Level s) {
  if (!std::isfinite(sobolev_norm(q, Level(2.0)))) throw InvalidLoop("base point is not in H_2");
  const LevelOperator D = phi.dphi(q);
  const LevelOperator A2 = F.hess2(phi.apply(q));
  const LevelOperator K = riesz_correction(F, phi, q, Level(std::min(2.0, 1.0 + s.value())));
  return LevelOperator(conjugated(D, A2) + K.matrix, Level(2.0), Level(1.0), q.dim(), q.order());
}

FloerFunctionNumeric pull_back(const FloerFunctionNumeric& F, const SuperpositionMap& phi) {
  FloerFunctionNumeric G;
  G.name = F.name + "∘" + phi.chart().name();
  G.dim = phi.dim();
  G.domain = [F, phi](const FourierLoop& q) { return phi.defined_at(q) && (!F.domain || F.domain(phi.apply(q))); };
  G.eval = [F, phi](const FourierLoop& q) { return F.eval(phi.apply(q)); };
  G.grad = [F, phi](const FourierLoop& q) { return pull_back_gradient(F, phi, q); };
  G.grad2 = G.grad;
  G.hess = [F, phi](const FourierLoop& q) { return pull_back_hessian(F, phi, q, phi.s()); };
  G.hess2 = [F, phi](const FourierLoop& q) { return pull_back_hessian_level2(F, phi, q, phi.s()); };
  G.principal_split = [F, phi](const FourierLoop& q) {
    const LevelOperator D = phi.dphi(q);
    const auto [P, C] = F.principal_split(phi.apply(q));
    const LevelOperator K = riesz_correction(F, phi, q, phi.s());
    return std::pair{LevelOperator(conjugated(D, P), Level(1.0), Level(0.0), q.dim(), q.order()),
                     LevelOperator(conjugated(D, C) + K.matrix, Level(1.0), Level(0.0), q.dim(), q.order())};
  };
  return G;
}

// ============================================================================
// kappa bound
// ============================================================================

KappaReport kappa_bound_check(const FloerFunctionNumeric& F, const SuperpositionMap& phi, const FourierLoop& q,
                              Level s, const std::vector<int>& sweep, const AlternatingOptions& opts, double slack) {
  KappaReport rep;
  rep.s = s.value();
  rep.holds = true;
  const Level top(1.0 + s.value());
  for (int N : sweep) {
    const FourierLoop qN = q.resized(N);
    const FourierLoop g = F.grad(phi.apply(qN));
    const double trilinear = bilinear_norm_estimate(phi.d2phi(qN), top, Level(-1.0), Level(-1.0), opts);
    KappaEntry e;
    e.N = N;
    e.kappa = sobolev_norm(g, Level(1.0)) * trilinear;
    e.k_norm = op_norm(riesz_correction(F, phi, qN, top), top, Level(1.0));
    rep.holds = rep.holds && e.k_norm <= e.kappa + slack;
    if (e.kappa > 0) rep.worst_ratio = std::max(rep.worst_ratio, e.k_norm / e.kappa);
    rep.sweep.push_back(e);
  }
  return rep;
}

nlohmann::json to_json(const KappaReport& r) {
  nlohmann::json sweep = nlohmann::json::array();
  for (const auto& e : r.sweep) sweep.push_back({{"N", e.N}, {"kappa", e.kappa}, {"K_norm", e.k_norm}});
  return {{"s", r.s}, {"sweep", std::move(sweep)}, {"worst_ratio", r.worst_ratio}, {"holds", r.holds}};
}

// ============================================================================
// Certification
// ============================================================================

std::vector<TailPoint> compact_tail(const LevelOperator& T, Level a, Level b) {
  const Eigen::VectorXd sigma = compactness_profile(T, a, b);
  std::vector<TailPoint> out;
  for (int k = 1; k <= T.N; k *= 2) {
    const Eigen::Index idx = static_cast<Eigen::Index>(T.dim) * block_size(k);
    if (idx >= sigma.size()) break;
    out.push_back({k, sigma(idx)});
  }
  return out;
}

bool PullbackReport::pass() const {
  return gradient.pass() && hessian.pass() && conjugated.fredholm() && tail_decays;
}

PullbackReport certify_pullback(const FloerFunctionNumeric& F, const SuperpositionMap& phi,
                                const std::vector<FourierLoop>& samples, const CheckOptions& opts) {
  PullbackReport rep;
  const FloerFunctionNumeric G = pull_back(F, phi);
  rep.gradient = gradient_axiom_check(G, samples, opts);
  rep.hessian = hessian_axiom_check(G, samples, opts);
  if (samples.empty()) return rep;

  const FourierLoop& q = samples.front();
  const Level s = phi.s();
  const Level top(1.0 + s.value());
  const LevelOperator K = riesz_correction(F, phi, q, s);
  rep.k_norm = op_norm(riesz_correction(F, phi, q, top), top, Level(1.0));
  rep.kappa = sobolev_norm(F.grad(phi.apply(q)), Level(1.0)) *
              bilinear_norm_estimate(phi.d2phi(q), top, Level(-1.0), Level(-1.0));

  // K^q ∘ iota_s read H_1 -> H_0.
  const LevelOperator K_iota = K.with_levels(Level(1.0), Level(0.0));
  rep.tail = compact_tail(K_iota, Level(1.0), Level(0.0));
  const double top_sigma = op_norm(K_iota, Level(1.0), Level(0.0));
  rep.tail_decays = true;
  if (top_sigma > 0.0) {
    for (std::size_t i = 1; i < rep.tail.size(); ++i)
      rep.tail_decays = rep.tail_decays && rep.tail[i].sigma <= rep.tail[i - 1].sigma;
    rep.tail_decays = rep.tail_decays && !rep.tail.empty() && rep.tail.back().sigma <= 0.1 * top_sigma;
  }

  rep.conjugated = fredholm_diagnostic(
      [&](int N) {
        const FourierLoop qN = q.resized(N);
        const LevelOperator D = phi.dphi(qN);
        return LevelOperator(conjugated(D, F.hess(phi.apply(qN))), Level(1.0), Level(0.0), qN.dim(), N);
      },
      Level(1.0), Level(0.0), opts.sweep, opts.fredholm);
  return rep;
}

nlohmann::json to_json(const PullbackReport& r) {
  nlohmann::json tail = nlohmann::json::array();
  for (const auto& t : r.tail) tail.push_back({{"mode", t.mode}, {"sigma", t.sigma}});
  return {{"gradient", to_json(r.gradient)},
          {"hessian", to_json(r.hessian)},
          {"pullback",
           {{"kappa", r.kappa},
            {"K_norm", r.k_norm},
            {"compact_tail", std::move(tail)},
            {"tail_decays", r.tail_decays},
            {"conjugated_fredholm", to_json(r.conjugated)}}},
          {"verdict", r.pass() ? "pass" : "fail"}};
}

}  // namespace floerlab
