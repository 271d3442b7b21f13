#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "floerlab/fourier_loop.hpp"
#include "floerlab/jet.hpp"
#include "floerlab/level.hpp"
#include "floerlab/level_operator.hpp"

namespace floerlab {

// ============================================================================
// Diffeomorphisms of R^n (n <= 3) with derivatives through order three
// ============================================================================

using JetVec = std::vector<Jet>;

/// Value, Jacobian and higher derivatives of a chart at one point.
/// jac(i, j) = d_j Phi_i; second(i, j*n + k) = d_j d_k Phi_i;
/// third(i, (j*n + k)*n + l) = d_j d_k d_l Phi_i.
struct ChartDerivatives {
  Eigen::VectorXd value;
  Eigen::MatrixXd jac;
  Eigen::MatrixXd second;
  Eigen::MatrixXd third;
};

class DiffeoChart {
 public:
  using ValueFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
  using JetFn = std::function<JetVec(const JetVec&)>;
  using DomainFn = std::function<bool(const Eigen::VectorXd&)>;

  DiffeoChart() = default;
  /// An empty domain predicate means the chart is defined on all of R^n.
  DiffeoChart(std::string name, int dim, ValueFn value, JetFn jet, DomainFn domain = {});

  const std::string& name() const noexcept { return name_; }
  int dim() const noexcept { return dim_; }

  Eigen::VectorXd value(const Eigen::VectorXd& x) const;
  JetVec jet(const JetVec& x) const { return jet_(x); }
  bool contains(const Eigen::VectorXd& x) const;
  ChartDerivatives derivatives(const Eigen::VectorXd& x) const;

  bool has_inverse() const noexcept { return static_cast<bool>(inverse_); }
  /// Returns a copy carrying `inv` as its inverse.
  DiffeoChart with_inverse(const DiffeoChart& inv) const;
  /// The inverse chart, whose own inverse is this chart. Throws MissingInverse.
  DiffeoChart inverted() const;
  /// The same chart without inverse information.
  DiffeoChart bare() const;

 private:
  std::string name_;
  int dim_ = 0;
  ValueFn value_;
  JetFn jet_;
  DomainFn domain_;
  std::shared_ptr<const DiffeoChart> inverse_;
};

/// Builds a chart from one generic formula `f(const std::vector<T>&) -> std::vector<T>`
/// that is evaluated on double and on Jet.
template <class F>
DiffeoChart make_chart(std::string name, int dim, F f, DiffeoChart::DomainFn domain = {}) {
  DiffeoChart::ValueFn value = [f](const Eigen::VectorXd& x) {
    const std::vector<double> in(x.data(), x.data() + x.size());
    const std::vector<double> out = f(in);
    return Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(out.data(), static_cast<Eigen::Index>(out.size())));
  };
  DiffeoChart::JetFn jet = [f](const JetVec& x) { return f(x); };
  return DiffeoChart(std::move(name), dim, std::move(value), std::move(jet), std::move(domain));
}

/// Composite chart outer ∘ inner; its inverse is inner^-1 ∘ outer^-1 when both exist.
DiffeoChart compose_charts(const DiffeoChart& outer, const DiffeoChart& inner);

// Built-in charts.
DiffeoChart identity_chart(int n);
/// x -> M x; carries M^-1 as inverse.
DiffeoChart linear_chart(const Eigen::MatrixXd& M);
/// (x, y) -> (x, y + x^2), inverse (x, y - x^2).
DiffeoChart shear_chart();
/// x -> R(|x|^2) x with R(a) the rotation by angle a; inverse y -> R(-|y|^2) y.
DiffeoChart rotation_chart();
/// Transition between the two stereographic charts of S^2: x -> x / |x|^2 on
/// 0 < r_min < |x| < 1/r_min; it is its own inverse.
DiffeoChart stereographic_transition_chart(double r_min = 0.05);
/// (x, y) -> (x, y + x|x|): C^1 but not C^2 across x = 0. Negative control.
DiffeoChart broken_c1_chart();

// ============================================================================
// Superposition maps u -> Phi ∘ u on truncated loops
// ============================================================================

/// Chart derivatives sampled at the collocation nodes of a loop. Field layouts
/// match multiplication_operator (n^2 columns) and BilinearLevelMap (n^3 columns).
struct NodalJets {
  Eigen::MatrixXd values;  // L x n
  Eigen::MatrixXd jac;     // L x n^2, column i*n + j
  Eigen::MatrixXd second;  // L x n^3, column (i*n + j)*n + k
  Eigen::MatrixXd third;   // L x n^4, column ((i*n + j)*n + k)*n + l
};

class SuperpositionMap {
 public:
  SuperpositionMap() = default;
  /// Throws LevelError unless 1/2 < s < 1.
  explicit SuperpositionMap(DiffeoChart chart, Level s = Level(0.75));

  const DiffeoChart& chart() const noexcept { return chart_; }
  Level s() const noexcept { return s_; }
  int dim() const noexcept { return chart_.dim(); }
  SuperpositionMap with_s(Level s) const { return SuperpositionMap(chart_, s); }

  /// Throws OutOfChartError naming the first collocation node outside the chart domain.
  NodalJets nodal(const FourierLoop& u, int order = 3) const;
  bool defined_at(const FourierLoop& u) const;

  /// Interpolant of t -> Phi(u(t)).
  FourierLoop apply(const FourierLoop& u) const;
  /// xi -> dPhi(u) xi as a multiplication operator, annotated H_1 -> H_1. The same
  /// matrix is D phi on H_0 and its extension to H_-1.
  LevelOperator dphi(const FourierLoop& u) const;
  /// (xi, eta) -> d^2 Phi(u)(xi, eta), annotated (H_1, H_1; H_1).
  BilinearLevelMap d2phi(const FourierLoop& u) const;
  /// (xi, eta) -> d^3 Phi(u)(zeta, xi, eta) for a fixed zeta.
  BilinearLevelMap d3phi(const FourierLoop& u, const FourierLoop& zeta) const;

 private:
  void check_shape(const FourierLoop& u) const;

  DiffeoChart chart_;
  Level s_{0.75};
};

/// psi ∘ phi with the composite chart differentiated through order three.
SuperpositionMap compose(const SuperpositionMap& psi, const SuperpositionMap& phi);
/// Throws MissingInverse when the chart has none.
SuperpositionMap invert(const SuperpositionMap& phi);

/// H_0 norm of
///   dD(psi∘phi)|_q(xi, eta) - dDpsi|_{phi(q)}(dphi|_q xi, Dphi|_q eta) - Dpsi|_{phi(q)} dDphi|_q(xi, eta)
/// where the first term is a central difference of q -> D(psi∘phi)|_q eta with step h along xi.
double leibniz_check(const SuperpositionMap& psi, const SuperpositionMap& phi, const FourierLoop& q,
                     const FourierLoop& xi, const FourierLoop& eta, double h);

struct LeibnizSweep {
  std::vector<double> h;
  std::vector<double> residual;
  double slope = 0.0;  // least-squares slope of log residual against log h
};

LeibnizSweep leibniz_sweep(const SuperpositionMap& psi, const SuperpositionMap& phi, const FourierLoop& q,
                           const FourierLoop& xi, const FourierLoop& eta,
                           const std::vector<double>& hs = {4e-3, 2e-3, 1e-3, 5e-4});

// ============================================================================
// Floer-map axioms
// ============================================================================

struct AxiomOptions {
  std::vector<int> sweep = default_sweep();
  double stable_tol = 0.05;
  int stable_from = 64;
  int continuity_N = 32;
  double continuity_h = 1e-4;
  double continuity_tol = 1e-4;
  std::uint64_t seed = 7;
  AlternatingOptions hopm{2, 40, 1e-8};
};

struct AxiomReport {
  std::string axiom;  // "(i)1", "(i)2", "(ii)1", "(ii)2"
  double s = 0.0;
  Sweep sweep;
  double spread = 0.0;         // of the sweep of maxima over samples
  double sample_spread = 0.0;  // largest spread of a single sample's sweep
  double continuity_modulus = 0.0;  // sampled divided-difference modulus
  double continuity_residual = 0.0;  // relative defect against the next derivative
  bool bounded = false;
  bool stable = false;
  bool continuous = false;
  std::string verdict;  // "pass" or "fail"

  bool pass() const { return verdict == "pass"; }
};

struct FloerAxiomReport {
  std::string map;
  double s = 0.0;
  std::vector<AxiomReport> axioms;

  bool pass() const;
  const AxiomReport& axiom(const std::string& name) const;
};

/// Checks the four Floer-map axioms of phi at level phi.s() on the samples. Samples
/// are zero-padded or truncated to each sweep order; they must lie in the chart.
FloerAxiomReport verify_floer_axioms(const SuperpositionMap& phi, const std::vector<FourierLoop>& samples,
                                     const AxiomOptions& opts = {});
/// One report per s; the s-independent first-derivative axioms are computed once.
std::vector<FloerAxiomReport> verify_floer_axioms(const SuperpositionMap& phi,
                                                  const std::vector<FourierLoop>& samples,
                                                  const std::vector<Level>& s_values, const AxiomOptions& opts = {});

/// Report of the union of two sample sets from the reports of the pieces.
FloerAxiomReport merge(const FloerAxiomReport& a, const FloerAxiomReport& b, const AxiomOptions& opts = {});

/// Structural agreement of two reports: same verdicts, sweeps equal to rel_tol.
bool reports_agree(const FloerAxiomReport& a, const FloerAxiomReport& b, double rel_tol = 1e-12);

nlohmann::json to_json(const AxiomReport& r);
nlohmann::json to_json(const FloerAxiomReport& r);

}  // namespace floerlab
