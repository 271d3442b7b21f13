#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "floerlab/floer_map.hpp"
#include "floerlab/fourier_loop.hpp"
#include "floerlab/level.hpp"

namespace floerlab {

// ============================================================================
// Stereographic charts of S^2 ⊂ R^3 and the loop charts they induce
// ============================================================================

/// rho(p) = warp(sigma(R p)) with sigma(x, y, z) = (x, y) / (1 + z), defined on the
/// cap of angular radius `cap` around R^T e_z, i.e. |sigma| < tan(cap / 2).
struct SphereChart {
  std::string id;
  Eigen::Matrix3d frame = Eigen::Matrix3d::Identity();
  double radius = 0.0;
  std::optional<DiffeoChart> warp;  // planar diffeomorphism applied after projection

  /// Throws ConfigError on a non-orthogonal frame or a cap outside (0, pi).
  static SphereChart cap_chart(std::string id, const Eigen::Matrix3d& frame, double cap);

  Eigen::Vector2d project(const Eigen::Vector3d& p) const;
  Eigen::Vector3d lift(const Eigen::Vector2d& x) const;
  /// p lies in the cap with margin delta in projected coordinates.
  bool covers(const Eigen::Vector3d& p, double delta = 0.0) const;
};

struct Atlas {
  std::string name;
  std::vector<SphereChart> charts;
  Level s{0.75};

  const SphereChart& chart(const std::string& id) const;
};

/// Charts "N" (frame I) and "S" (frame diag(1,1,-1)) with caps of 150 degrees;
/// their transition is x -> x / |x|^2.
Atlas sphere_small_loop_atlas(Level s = Level(0.75));
/// Every frame composed with the sphere rotation Q^T, so chart centers move by Q.
Atlas rotated_atlas(const Atlas& a, const Eigen::Matrix3d& Q, std::string name);
/// Rotation by `angle` about a unit axis.
Eigen::Matrix3d axis_rotation(const Eigen::Vector3d& axis, double angle);
/// The sphere atlas with broken_c1_chart() as the warp of chart "S". Negative control.
Atlas broken_sphere_atlas(Level s = Level(0.75));

/// n quasi-uniform points on S^2.
std::vector<Eigen::Vector3d> fibonacci_sphere(int n);

// ----------------------------------------------------------------------------
// Loops on S^2
// ----------------------------------------------------------------------------

/// t -> gamma(t) / |gamma(t)| for a band-limited R^3 loop gamma away from 0.
struct SphereLoop {
  FourierLoop gamma;

  Eigen::Vector3d point(double t) const;
};

/// The equator (first entry) followed by count-1 perturbations of it with modes up to
/// `order` and coefficients of size `amplitude`.
std::vector<SphereLoop> equatorial_corpus(int count, std::uint64_t seed, int order = 3, double amplitude = 0.06);

/// All 2M = 4N fine-grid samples and all collocation nodes of the loop lie in the chart with margin delta.
bool is_small_loop(const SphereChart& c, const SphereLoop& u, int N, double delta = 0.05);
/// Interpolant at order N of t -> rho(u(t)). Throws OutOfChartError naming the node outside the cap.
FourierLoop chart_loop(const SphereChart& c, const SphereLoop& u, int N);

// ----------------------------------------------------------------------------
// Transitions
// ----------------------------------------------------------------------------

/// rho_beta ∘ rho_alpha^-1 as a superposition map at the atlas level, carrying its
/// inverse rho_alpha ∘ rho_beta^-1. Identity for alpha == beta. Throws EmptyOverlap
/// when no Fibonacci sample point lies in both caps.
SuperpositionMap transition(const SphereChart& alpha, const SphereChart& beta, Level s);
SuperpositionMap transition(const Atlas& atlas, const std::string& alpha, const std::string& beta);

struct PairReport {
  std::string alpha;
  std::string beta;
  int samples = 0;
  std::vector<FloerAxiomReport> reports;  // one per s
  std::string verdict;                    // "pass", "fail" or "no-overlap"
};

struct CompatibilityReport {
  std::string a;
  std::string b;
  std::vector<PairReport> pairs;
  bool compatible = false;
};

struct AtlasOptions {
  int base_N = 16;  // order of the chart-coordinate interpolants
  double delta = 0.05;
  std::vector<Level> s_values{Level(0.75)};
  AxiomOptions axioms{};
};

/// Runs verify_floer_axioms on every cross transition over the corpus loops in the overlap.
CompatibilityReport check_compatibility(const Atlas& A, const Atlas& B, const std::vector<SphereLoop>& corpus,
                                        const AtlasOptions& opts = {});

struct TransitivityReport {
  int triples = 0;               // (alpha, beta, gamma) with a nonempty corpus overlap
  double cocycle_apply = 0.0;    // max ||phi_ag(q) - phi_bg(phi_ab(q))||_0 / ||phi_ag(q)||_0
  double cocycle_dphi = 0.0;     // same for the derivative matrices, in Frobenius norm
  double inverse_residual = 0.0;  // max ||phi_ba(phi_ab(q)) - q||_0 / ||q||_0
  bool local_global = false;     // merged piece reports agree with the union report
  bool pass = false;
};

/// Cocycle and local-implies-global checks for A -> B -> C with the pieces of the
/// B-cover as the local sets.
TransitivityReport check_transitivity(const Atlas& A, const Atlas& B, const Atlas& C,
                                      const std::vector<SphereLoop>& corpus, const AtlasOptions& opts = {},
                                      double apply_tol = 1e-10, double dphi_tol = 1e-9);

nlohmann::json to_json(const SphereChart& c);
nlohmann::json to_json(const Atlas& a);
nlohmann::json to_json(const std::vector<SphereLoop>& corpus);
nlohmann::json to_json(const CompatibilityReport& r);
nlohmann::json to_json(const TransitivityReport& r);

}  // namespace floerlab
