#pragma once

#include <Eigen/Dense>
#include <functional>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "floerlab/fourier_loop.hpp"
#include "floerlab/level.hpp"

namespace floerlab {

// ============================================================================
// LevelOperator: a matrix on the coordinate space of dim x N loops, annotated
// with the levels it is read between. The same matrix realizes every arrow of
// an extension tower; only the annotation changes.
// ============================================================================

struct LevelOperator {
  Eigen::MatrixXd matrix;
  Level dom;
  Level cod;
  int dim = 0;
  int N = 0;

  LevelOperator() = default;
  LevelOperator(Eigen::MatrixXd m, Level dom, Level cod, int dim, int N);

  FourierLoop apply(const FourierLoop& u) const;
  LevelOperator with_levels(Level d, Level c) const { return LevelOperator(matrix, d, c, dim, N); }
};

LevelOperator identity_operator(int dim, int N, Level level = Level(0.0));
/// d/dt, annotated H_1 -> H_0.
LevelOperator derivative_operator(int dim, int N);
/// Block (i,j) of an n x n constant matrix applied to each mode: u(t) -> M u(t).
LevelOperator constant_matrix_operator(const Eigen::MatrixXd& M, int N, Level level = Level(0.0));
/// Collocation multiplication u(t) -> G(t) u(t) by an n x n matrix field given at
/// the 2N+1 collocation nodes; field has L rows and n*n columns, column i*n+j
/// holding G_ij.
LevelOperator multiplication_operator(const Eigen::MatrixXd& field, int dim, int N, Level dom, Level cod);
/// Scalar field version for dim = 1 loops, field of length L.
LevelOperator scalar_multiplication_operator(const Eigen::VectorXd& field, int N, Level dom, Level cod);

/// S∘T, annotated T.dom -> S.cod.
LevelOperator compose(const LevelOperator& S, const LevelOperator& T);
LevelOperator operator+(const LevelOperator& a, const LevelOperator& b);

/// sup_{||xi||_a = 1} ||T xi||_b, the largest singular value of W_b^{1/2} T W_a^{-1/2}.
double op_norm(const LevelOperator& T, Level a, Level b);
/// Singular values of W_b^{1/2} T W_a^{-1/2}, descending.
Eigen::VectorXd weighted_singular_values(const LevelOperator& T, Level a, Level b);
/// Weighted matrix W_b^{1/2} T W_a^{-1/2}.
Eigen::MatrixXd weighted_matrix(const LevelOperator& T, Level a, Level b);

/// Level-s adjoint W_s^{-1} T^T W_s: <T xi, eta>_s = <xi, T* eta>_s.
LevelOperator adjoint(const LevelOperator& T, Level s);

// ----------------------------------------------------------------------------
// Sweeps over the truncation order
// ----------------------------------------------------------------------------

using OperatorFamily = std::function<LevelOperator(int N)>;

struct SweepPoint {
  int N = 0;
  double value = 0.0;
};
using Sweep = std::vector<SweepPoint>;

const std::vector<int>& default_sweep();

/// Every entry with N >= from_N lies within rel_tol of the final entry (relative
/// to it). When fewer than two entries reach from_N the last two are compared.
bool stabilizes(const Sweep& sweep, double rel_tol, int from_N = 64);
/// Largest relative deviation from the final value over the entries stabilizes() inspects.
double stabilization_spread(const Sweep& sweep, int from_N = 64);

nlohmann::json to_json(const Sweep& sweep, const char* key = "norm");

// ----------------------------------------------------------------------------
// Interpolation, extension towers, compactness
// ----------------------------------------------------------------------------

struct InterpolationReport {
  double s = 0.0;
  double norm0 = 0.0;
  double norm1 = 0.0;
  double norm_s = 0.0;
  double bound = 0.0;  // norm0^{1-s} norm1^s
  bool holds = false;
};

/// Checks op_norm(T,s,s) <= op_norm(T,0,0)^{1-s} op_norm(T,1,1)^s + slack.
InterpolationReport check_interpolation(const LevelOperator& T, double s, double slack = 1e-10);

struct ExtensionEntry {
  Level level;
  Sweep sweep;
  bool bounded = false;
};

struct ExtensionReport {
  bool same_matrix = false;
  std::vector<ExtensionEntry> levels;
};

ExtensionReport extension_consistency(const LevelOperator& T, const std::vector<Level>& levels);
ExtensionReport extension_consistency(const OperatorFamily& family, const std::vector<Level>& levels,
                                      const std::vector<int>& sweep = default_sweep(), double rel_tol = 0.05);

/// Weighted singular values of T: H_a -> H_b in decreasing order; decay to zero is
/// the finite-dimensional signature of compactness.
Eigen::VectorXd compactness_profile(const LevelOperator& T, Level a, Level b);

// ----------------------------------------------------------------------------
// Fredholm diagnostics
// ----------------------------------------------------------------------------

struct FredholmOptions {
  double kernel_threshold = 1e-8;  // relative to the largest singular value
  double gap_tolerance = 0.02;
  int stable_from = 64;
};

struct FredholmEntry {
  int N = 0;
  double sigma_min = 0.0;
  double sigma_max = 0.0;
  double gap = 0.0;  // (ker_dim + 1)-th smallest singular value
  int ker_dim = 0;
  int coker_dim = 0;
};

struct FredholmReport {
  Level a;
  Level b;
  std::vector<FredholmEntry> sweep;
  int index_estimate = 0;
  bool index_zero = false;
  bool gap_stable = false;
  double gap_spread = 0.0;
  double sigma_min_decay = 1.0;  // sigma_min(first N) / sigma_min(last N)
  std::string verdict;           // "fredholm-index-0" or "not-fredholm"

  bool fredholm() const { return verdict == "fredholm-index-0"; }
};

FredholmReport fredholm_diagnostic(const OperatorFamily& family, Level a, Level b,
                                   const std::vector<int>& sweep = default_sweep(),
                                   const FredholmOptions& opts = {});

nlohmann::json to_json(const FredholmReport& r);

// ============================================================================
// BilinearLevelMap: (xi, eta) -> I_N[ T(t)(xi(t), eta(t)) ], with T an
// R^n-valued bilinear form on R^n given at the collocation nodes.
// ============================================================================

class BilinearLevelMap {
 public:
  BilinearLevelMap() = default;
  /// tensors has L rows and n^3 columns; column (i*n + j)*n + k holds the
  /// coefficient of output component i for inputs xi_j, eta_k.
  BilinearLevelMap(int dim, int N, Eigen::MatrixXd tensors, Level first, Level second, Level cod);

  int dim() const noexcept { return dim_; }
  int order() const noexcept { return N_; }
  Level first() const noexcept { return first_; }
  Level second() const noexcept { return second_; }
  Level cod() const noexcept { return cod_; }
  const Eigen::MatrixXd& tensors() const noexcept { return tensors_; }
  double tensor(int node, int i, int j, int k) const { return tensors_(node, (i * dim_ + j) * dim_ + k); }

  BilinearLevelMap with_levels(Level first, Level second, Level cod) const;

  FourierLoop operator()(const FourierLoop& xi, const FourierLoop& eta) const;
  /// eta -> B(xi, eta), annotated second -> cod.
  LevelOperator partial(const FourierLoop& xi) const;
  /// Matrix F with xi^T F eta = <a, B(xi, eta)>_0.
  Eigen::MatrixXd form_against(const FourierLoop& a) const;

  /// sup_{|x| = |y| = 1} |T_node(x, y)| on R^n.
  double nodal_norm(int node) const;

  BilinearLevelMap operator-(const BilinearLevelMap& o) const;
  BilinearLevelMap scaled(double a) const;

 private:
  int dim_ = 0;
  int N_ = 0;
  Eigen::MatrixXd tensors_;
  Level first_, second_, cod_;
};

/// Exact norm of B in L(H_s, H_0; H_0) for the collocation model:
/// max_nodes |T_l| * sqrt(sum_{|k| <= N} w_k(s)^{-1}).
double collocation_l2_bilinear_norm(const BilinearLevelMap& B, Level s);

/// sqrt(sum_{|k| <= N} w_k(s)^{-1}): norm of point evaluation on H_s.
double point_evaluation_norm(int N, Level s);

struct AlternatingOptions {
  int starts = 3;  // seed nodes per ranking (largest tensor, largest jump)
  int iterations = 60;
  double rel_tol = 1e-10;
};

/// Lower estimate of ||B||_{L(H_a, H_b; H_c)} by multi-start alternating
/// maximization of the trilinear form <zeta, B(xi, eta)>_c over unit balls.
double bilinear_norm_estimate(const BilinearLevelMap& B, Level a, Level b, Level c,
                              const AlternatingOptions& opts = {});

}  // namespace floerlab
