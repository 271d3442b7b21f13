#pragma once

#include <cstdint>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "floerlab/fourier_loop.hpp"
#include "floerlab/level.hpp"
#include "floerlab/level_operator.hpp"

namespace floerlab {

// ============================================================================
// Multiplication operators h -> g h by a scalar factor g
// ============================================================================

/// Factor class, input level and output level of a multiplication estimate.
/// For the dual signature the operator is f* -> f*·g on H_-1 with g in H_1.
struct MultSignature {
  std::string label;  // "(1,1->1)", "(C0,0->0)", "(1,0->0)", "(-1,1->-1)"
  Level in;
  Level out;
  bool dual = false;
  bool continuous_factor = false;  // factor measured in sup norm rather than H_1

  static MultSignature h1();
  static MultSignature c0();
  static MultSignature h1_on_l2();
  static MultSignature dual_h1();
  /// Throws ConfigError for an unknown label.
  static MultSignature parse(const std::string& label);
};

const std::vector<MultSignature>& all_signatures();

/// Pointwise product of a scalar loop g with each component of h at h's order.
FourierLoop multiply(const FourierLoop& g, const FourierLoop& h);
/// f*·g: the functional h -> f*(g h).
DualFunctional multiply(const DualFunctional& f, const FourierLoop& g);

/// Multiplication by g (truncated to order N) on dim-component loops, annotated
/// sig.in -> sig.out. For the dual signature this is the level-0 transpose.
LevelOperator mult_operator(const FourierLoop& g, const MultSignature& sig, int N, int dim = 1);
/// Same at g's own order.
LevelOperator mult_operator(const FourierLoop& g, const MultSignature& sig);

/// sup |g| over a fine grid with 8 points per mode.
double sup_norm(const FourierLoop& g);

struct MultSweepReport {
  std::string signature;
  Sweep sweep;
  double spread = 0.0;
  double growth = 1.0;    // last / first norm
  double constant = 0.0;  // final norm / factor norm
  std::string verdict;    // "bounded" or "unbounded"

  bool bounded() const { return verdict == "bounded"; }
};

MultSweepReport mult_norm_sweep(const FourierLoop& g, const MultSignature& sig,
                                const std::vector<int>& sweep = default_sweep(), double rel_tol = 0.05,
                                int from_N = 64);

nlohmann::json to_json(const MultSweepReport& r);

/// Scalar factor with mean 1 and coefficient k^-decay in every cosine slot, truncated at N.
FourierLoop power_law_factor(int N, double decay);

// ----------------------------------------------------------------------------
// Stein-Weiss interpolation for random smooth factors
// ----------------------------------------------------------------------------

struct InterpolationSuite {
  int operators = 0;
  double worst_excess = 0.0;  // max of norm_s - bound, negative when the bound holds with room
  std::vector<double> s_values;
  bool holds = false;
};

InterpolationSuite stein_weiss_check(int count, std::uint64_t seed, int N, const std::vector<double>& s_values,
                                     double slack = 1e-10);

nlohmann::json to_json(const InterpolationSuite& r);

// ============================================================================
// Hölder embedding H_s ⊂ C^{s - 1/2}
// ============================================================================

/// Kernel sum_{|k|<=N} w_k(s)^-1 e^{2 pi i k t}, the extremal loop for point evaluation on H_s.
FourierLoop extremal_kernel(int N, Level s);

/// max over dyadic offsets y = 2^-j and fine-grid points x of |u(x+y) - u(x)| / y^alpha.
double holder_seminorm(const FourierLoop& u, double alpha);

struct HolderReport {
  double s = 0.0;
  double alpha = 0.0;
  Sweep ratio;            // max over kernel and samples of seminorm / ||u||_s
  Sweep kernel_ratio;     // extremal kernel alone
  double constant = 0.0;  // estimated C(s)
  double spread = 0.0;
  double track_spread = 0.0;  // largest spread of a single loop's sweep
  bool stable = false;
  bool monotone_growth = false;  // of the kernel track
  bool endpoint = false;  // s = 1/2: the embedding fails and the ratio must grow
  std::string verdict;    // "stable", "divergent" or "fail"

  bool pass() const { return endpoint ? verdict == "divergent" : verdict == "stable"; }
};

/// Ratios for the extremal kernel and the given samples (scalar loops, resized to
/// each N). Stable needs both spreads within rel_tol. Accepts 1/2 <= s < 3/2; s = 1/2
/// runs as the endpoint control, divergent when the kernel ratio grows at every step.
HolderReport holder_embedding_check(Level s, const std::vector<FourierLoop>& samples,
                                    const std::vector<int>& sweep = default_sweep(), double rel_tol = 0.10,
                                    int from_N = 64);

nlohmann::json to_json(const HolderReport& r);

}  // namespace floerlab
