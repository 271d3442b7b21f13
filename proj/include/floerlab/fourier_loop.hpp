#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <nlohmann/json.hpp>
#include <vector>

#include "floerlab/level.hpp"

namespace floerlab {

// ============================================================================
// Truncated Fourier model of loops S^1 -> R^n
// ============================================================================
//
// A loop u(t) = sum_{|k|<=N} u_k e^{2 pi i k t} is stored through its
// coordinates in the real L2-orthonormal basis
//
//   1, sqrt2 cos(2 pi k t), sqrt2 sin(2 pi k t),   k = 1..N,
//
// one block of 2N+1 entries per component. Inside a block, index 0 is the
// mean, index 2k-1 the cosine and index 2k the sine coefficient of mode k.
// Real-valuedness (u_{-k} = conj u_k) therefore holds by construction, and
// every level norm is a diagonal weighting of this vector.

/// Number of real coordinates per component at truncation N.
constexpr int block_size(int N) noexcept { return 2 * N + 1; }

/// Fourier mode carried by real coordinate j of a block.
constexpr int mode_of(int j) noexcept { return (j + 1) / 2; }

class FourierLoop {
 public:
  FourierLoop() = default;
  FourierLoop(int dim, int N);
  FourierLoop(int dim, int N, Eigen::VectorXd coords);

  static FourierLoop zero(int dim, int N) { return FourierLoop(dim, N); }
  static FourierLoop constant(const Eigen::VectorXd& value, int N);
  /// Builds a loop from complex modes, modes[c][k+N] for k = -N..N; throws InvalidLoop on
  /// a reality violation larger than `tol` (relative to the largest modulus).
  static FourierLoop from_modes(const std::vector<std::vector<std::complex<double>>>& modes,
                                double tol = 1e-12);

  int dim() const noexcept { return dim_; }
  int order() const noexcept { return N_; }
  Eigen::Index size() const noexcept { return coords_.size(); }

  const Eigen::VectorXd& coords() const noexcept { return coords_; }
  Eigen::VectorXd& coords() noexcept { return coords_; }

  /// Complex coefficient u_k of component c, k ∈ [-N, N].
  std::complex<double> mode(int c, int k) const;
  void set_mode(int c, int k, std::complex<double> value);

  /// Zero-padded (or truncated) copy at another truncation order.
  FourierLoop resized(int N) const;

  /// Point value u(t).
  Eigen::VectorXd evaluate(double t) const;
  /// Time derivative, exact on the truncated space.
  FourierLoop derivative() const;

  bool finite() const { return coords_.allFinite(); }

  FourierLoop& operator+=(const FourierLoop& o);
  FourierLoop& operator-=(const FourierLoop& o);
  FourierLoop& operator*=(double a);

  friend FourierLoop operator+(FourierLoop a, const FourierLoop& b) { return a += b; }
  friend FourierLoop operator-(FourierLoop a, const FourierLoop& b) { return a -= b; }
  friend FourierLoop operator*(double a, FourierLoop u) { return u *= a; }

 private:
  int dim_ = 0;
  int N_ = 0;
  Eigen::VectorXd coords_;
};

/// Element of H_{-1} = (H_1)^*, acting on loops through the L2 pairing.
class DualFunctional {
 public:
  DualFunctional() = default;
  explicit DualFunctional(FourierLoop representative) : rep_(std::move(representative)) {}

  const FourierLoop& representative() const noexcept { return rep_; }
  int dim() const noexcept { return rep_.dim(); }
  int order() const noexcept { return rep_.order(); }

 private:
  FourierLoop rep_;
};

/// Diagonal of the level-s weight on the coordinate vector of a dim x N loop.
Eigen::VectorXd level_weights(int dim, int N, Level s);

double sobolev_norm(const FourierLoop& u, Level s);
double inner(const FourierLoop& u, const FourierLoop& v, Level s);

/// L2 pairing f(h) = Re sum_k f_k conj(h_k).
double dual_pair(const DualFunctional& f, const FourierLoop& h);
/// Insertion v -> <v, .>_0, an isometry H_1 -> (H_{-1})^*.
DualFunctional flat(const FourierLoop& v);
/// Norm of f as an element of H_{-1}.
double dual_norm(const DualFunctional& f);
/// Norm of f as a functional on H_a: sup_{||h||_a <= 1} |f(h)|.
double functional_norm(const DualFunctional& f, Level a);

void require_same_shape(const FourierLoop& u, const FourierLoop& v);

// ----------------------------------------------------------------------------
// Grids
// ----------------------------------------------------------------------------

/// Uniform grid of 2M points for fine-grid evaluation, quadrature and oracles.
class GridBridge {
 public:
  /// Throws AliasingError when M < 3N/2.
  GridBridge(int N, int M);

  int order() const noexcept { return N_; }
  int points() const noexcept { return 2 * M_; }
  double node(int j) const noexcept { return static_cast<double>(j) / points(); }

  /// Samples, one row per grid point, one column per component.
  Eigen::MatrixXd samples(const FourierLoop& u) const;
  /// Discrete Fourier coefficients of grid data, truncated to |k| <= N.
  FourierLoop coefficients(const Eigen::MatrixXd& samples) const;

 private:
  int N_;
  int M_;
  Eigen::MatrixXd eval_;  // points x (2N+1)
};

/// Collocation grid of L = 2N+1 nodes; nodal values and coefficients are in
/// bijection and E / sqrt(L) is orthogonal.
struct Collocation {
  int N = 0;
  int L = 0;
  Eigen::MatrixXd eval;  // L x (2N+1), eval(l, j) = basis_j(t_l)
  double node(int l) const noexcept { return static_cast<double>(l) / L; }
};

/// Cached per truncation order; thread-safe.
const Collocation& collocation(int N);

/// Nodal values, L rows by dim columns.
Eigen::MatrixXd nodal_values(const FourierLoop& u);
/// Trigonometric interpolant of nodal data (L rows by dim columns).
FourierLoop interpolate(const Eigen::MatrixXd& nodal, int N);

// ----------------------------------------------------------------------------
// Sampling
// ----------------------------------------------------------------------------

/// Random band-limited loop whose mode-k coefficients are standard normal
/// draws scaled by amplitude / (1 + k)^decay. Draws are keyed by
/// (seed, component, mode, part), so the loops for different N are nested:
/// the truncation of the N=256 sample to N=16 equals the N=16 sample.
FourierLoop random_loop(std::uint64_t seed, int dim, int N, double decay, double amplitude = 1.0);

/// Random direction normalized in the given level.
FourierLoop random_direction(std::uint64_t seed, int dim, int N, Level normalize_at,
                             double decay = 2.0);

/// Deterministic 64-bit mixing (splitmix64 finalizer).
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

// ----------------------------------------------------------------------------
// Serialization: {n, N, coeffs: [[ [re, im] for k=-N..N ] per component]}
// ----------------------------------------------------------------------------

nlohmann::json to_json(const FourierLoop& u);
FourierLoop loop_from_json(const nlohmann::json& j);

}  // namespace floerlab
