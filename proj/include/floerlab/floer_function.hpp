#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <nlohmann/json.hpp>
#include <string>
#include <utility>
#include <vector>

#include "floerlab/fourier_loop.hpp"
#include "floerlab/level_operator.hpp"

namespace floerlab {

// ============================================================================
// Hamiltonians on R^{2m}
// ============================================================================

/// J0 = [[0, -I], [I, 0]] on R^{2m}.
Eigen::MatrixXd standard_complex_structure(int dim);

struct HamiltonianData {
  std::string name;
  int dim = 2;
  std::function<double(double t, const Eigen::VectorXd& x)> H;
  std::function<Eigen::VectorXd(double t, const Eigen::VectorXd& x)> grad;
  std::function<Eigen::MatrixXd(double t, const Eigen::VectorXd& x)> hess;
  std::function<Eigen::VectorXd(double t, const Eigen::VectorXd& x)> dt_grad;

  Eigen::MatrixXd J0() const { return standard_complex_structure(dim); }
};

HamiltonianData zero_hamiltonian(int dim = 2);
/// H = |x|^2 / 2.
HamiltonianData harmonic_hamiltonian(int dim = 2);
/// H = |x|^2 / 2 + eps |x|^4 / 4 + eps cos(2 pi t) x_0.
HamiltonianData anharmonic_hamiltonian(int dim = 2, double eps = 0.1);

// ============================================================================
// Floer functions
// ============================================================================

struct FloerFunctionNumeric {
  std::string name;
  int dim = 0;
  std::function<double(const FourierLoop&)> eval;
  std::function<FourierLoop(const FourierLoop&)> grad;   // H_0-valued on U_1
  std::function<FourierLoop(const FourierLoop&)> grad2;  // H_1-valued on U_2
  std::function<LevelOperator(const FourierLoop&)> hess;   // H_1 -> H_0
  std::function<LevelOperator(const FourierLoop&)> hess2;  // H_2 -> H_1
  /// hess(q) = P + C with P the declared isomorphism part, C the compact part.
  std::function<std::pair<LevelOperator, LevelOperator>(const FourierLoop&)> principal_split;
  std::function<bool(const FourierLoop&)> domain;
};

/// f(u) = -1/2 int <J0 u, u'> - int H(t, u), grad = J0 u' - grad_x H(t, u),
/// hess = J0 d/dt - hess_x H(t, u), split with P = J0 d/dt - c Id.
/// Throws DimensionMismatch for odd dimension.
FloerFunctionNumeric symplectic_action(const HamiltonianData& h, double shift = 1.0);

/// f(u) = <L u, u>_0 / 2 with L taken from the family at the loop's truncation order.
/// Throws AsymmetricOperator when L is not symmetric at level 0.
FloerFunctionNumeric quadratic_spectral(const OperatorFamily& family, int dim, std::string name = "quadratic");
/// Single-operator form: defined only at L.N.
FloerFunctionNumeric quadratic_spectral(const LevelOperator& L, std::string name = "quadratic");

/// J0 d/dt on R^dim loops, annotated H_1 -> H_0.
LevelOperator symplectic_derivative(int dim, int N);

// ============================================================================
// Finite-difference oracles
// ============================================================================

using ScalarMap = std::function<double(const FourierLoop&)>;

/// |a - b| / max(|a|, |b|); zero when both vanish.
double relative_error(double a, double b);
/// Central difference of f along xi, Richardson-extrapolated from steps h and h/2.
double fd_directional(const ScalarMap& f, const FourierLoop& q, const FourierLoop& xi, double h = 1e-3);
/// Four-point second difference of f along (xi, eta), Richardson-extrapolated from h and h/2.
double fd_second(const ScalarMap& f, const FourierLoop& q, const FourierLoop& xi, const FourierLoop& eta,
                 double h = 1e-3);

// ============================================================================
// Axiom checks
// ============================================================================

struct CheckOptions {
  int directions = 4;  // random directions per sample
  std::uint64_t seed = 11;
  double h = 1e-3;
  double gradient_tol = 1e-7;
  double hessian_tol = 1e-6;
  double consistency_tol = 1e-6;
  double symmetry_tol = 1e-10;
  double restriction_tol = 1e-12;
  std::vector<int> sweep = default_sweep();
  double stable_tol = 0.05;
  int stable_from = 64;
  double continuity_h = 1e-2;
  FredholmOptions fredholm{};
  int fredholm_samples = 1;
};

struct ClauseReport {
  std::string clause;
  double residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  nlohmann::json detail = nlohmann::json::object();
};

struct FunctionReport {
  std::string function;
  std::vector<ClauseReport> clauses;

  bool pass() const;
  const ClauseReport& clause(const std::string& name) const;
};

/// Clauses "(H0-gradient)", "(Restriction)", "(Differentiability)".
FunctionReport gradient_axiom_check(const FloerFunctionNumeric& F, const std::vector<FourierLoop>& samples,
                                    const CheckOptions& opts = {});
/// Clauses "(H0-Hessian)", "(Restriction)", "(Continuity)", "(Fredholm)".
FunctionReport hessian_axiom_check(const FloerFunctionNumeric& F, const std::vector<FourierLoop>& samples,
                                   const CheckOptions& opts = {});

nlohmann::json to_json(const FunctionReport& r);

}  // namespace floerlab
