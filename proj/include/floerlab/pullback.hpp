#pragma once

#include <Eigen/Dense>
#include <nlohmann/json.hpp>
#include <vector>

#include "floerlab/floer_function.hpp"
#include "floerlab/floer_map.hpp"
#include "floerlab/level_operator.hpp"

namespace floerlab {

// ============================================================================
// Pull-back of a Floer function f through a superposition map phi
// ============================================================================

/// Level-0 adjoint of dphi|_q applied to grad f(phi(q)).
FourierLoop pull_back_gradient(const FloerFunctionNumeric& F, const SuperpositionMap& phi, const FourierLoop& q);

/// K^q with <K^q xi, eta>_0 = <grad f(phi(q)), D^2 phi|_q(xi, eta)>_0, annotated H_s -> H_0.
LevelOperator riesz_correction(const FloerFunctionNumeric& F, const SuperpositionMap& phi, const FourierLoop& q,
                               Level s);

/// dphi^* A^{phi(q)} dphi + K^q ∘ iota_s, annotated H_1 -> H_0.
LevelOperator pull_back_hessian(const FloerFunctionNumeric& F, const SuperpositionMap& phi, const FourierLoop& q,
                                Level s);
/// The same operator read H_2 -> H_1 (the K term through iota_{1+s}).
LevelOperator pull_back_hessian_level2(const FloerFunctionNumeric& F, const SuperpositionMap& phi,
                                       const FourierLoop& q, Level s);

/// The pulled-back function f∘phi with its gradient, Hessians and split, at level phi.s().
FloerFunctionNumeric pull_back(const FloerFunctionNumeric& F, const SuperpositionMap& phi);

// ----------------------------------------------------------------------------
// kappa bound: ||K^q||_{L(H_{1+s}, H_1)} <= ||grad f(phi(q))||_1 * ||D^2 phi|_q||_{L(H_{1+s}, H_-1; H_-1)}
// ----------------------------------------------------------------------------

struct KappaEntry {
  int N = 0;
  double kappa = 0.0;
  double k_norm = 0.0;
};

struct KappaReport {
  double s = 0.0;
  std::vector<KappaEntry> sweep;
  double worst_ratio = 0.0;  // max k_norm / kappa
  bool holds = false;
};

KappaReport kappa_bound_check(const FloerFunctionNumeric& F, const SuperpositionMap& phi, const FourierLoop& q,
                              Level s, const std::vector<int>& sweep = {32, 64, 128, 256},
                              const AlternatingOptions& opts = {}, double slack = 1e-8);

nlohmann::json to_json(const KappaReport& r);

// ----------------------------------------------------------------------------
// Certification
// ----------------------------------------------------------------------------

struct TailPoint {
  int mode = 0;
  double sigma = 0.0;
};

/// Largest weighted singular value of T: H_a -> H_b beyond the first dim*(2k+1) for k = 1, 2, 4, ...
std::vector<TailPoint> compact_tail(const LevelOperator& T, Level a, Level b);

struct PullbackReport {
  FunctionReport gradient;
  FunctionReport hessian;
  double kappa = 0.0;
  double k_norm = 0.0;
  std::vector<TailPoint> tail;
  bool tail_decays = false;
  FredholmReport conjugated;

  bool pass() const;
};

/// Runs the gradient and Hessian checks on f∘phi, the Fredholm check on the
/// conjugated summand and the compactness profile of K^q ∘ iota_s at the first sample.
PullbackReport certify_pullback(const FloerFunctionNumeric& F, const SuperpositionMap& phi,
                                const std::vector<FourierLoop>& samples, const CheckOptions& opts = {});

nlohmann::json to_json(const PullbackReport& r);

}  // namespace floerlab
