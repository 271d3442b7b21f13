#include "floerlab/floer_function.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

#include "floerlab/errors.hpp"

namespace floerlab {

// ============================================================================
// Hamiltonians
// ============================================================================

Eigen::MatrixXd standard_complex_structure(int dim) {
  if (dim <= 0 || dim % 2 != 0) throw DimensionMismatch("symplectic structures need an even dimension");
  const int m = dim / 2;
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(dim, dim);
  J.topRightCorner(m, m) = -Eigen::MatrixXd::Identity(m, m);
  J.bottomLeftCorner(m, m) = Eigen::MatrixXd::Identity(m, m);
  return J;
}

HamiltonianData zero_hamiltonian(int dim) {
  HamiltonianData h;
  h.name = "zero";
  h.dim = dim;
  h.H = [](double, const Eigen::VectorXd&) { return 0.0; };
  h.grad = [dim](double, const Eigen::VectorXd&) { return Eigen::VectorXd(Eigen::VectorXd::Zero(dim)); };
  h.hess = [dim](double, const Eigen::VectorXd&) { return Eigen::MatrixXd(Eigen::MatrixXd::Zero(dim, dim)); };
  h.dt_grad = h.grad;
  return h;
}

HamiltonianData harmonic_hamiltonian(int dim) {
  HamiltonianData h;
  h.name = "harmonic";
  h.dim = dim;
  h.H = [](double, const Eigen::VectorXd& x) { return 0.5 * x.squaredNorm(); };
  h.grad = [](double, const Eigen::VectorXd& x) { return x; };
  h.hess = [dim](double, const Eigen::VectorXd&) { return Eigen::MatrixXd(Eigen::MatrixXd::Identity(dim, dim)); };
  h.dt_grad = [dim](double, const Eigen::VectorXd&) { return Eigen::VectorXd(Eigen::VectorXd::Zero(dim)); };
  return h;
}

HamiltonianData anharmonic_hamiltonian(int dim, double eps) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  HamiltonianData h;
  h.name = "anharmonic";
  h.dim = dim;
  h.H = [eps](double t, const Eigen::VectorXd& x) {
    const double r2 = x.squaredNorm();
    return 0.5 * r2 + 0.25 * eps * r2 * r2 + eps * std::cos(two_pi * t) * x(0);
  };
  h.grad = [eps](double t, const Eigen::VectorXd& x) {
    Eigen::VectorXd g = (1.0 + eps * x.squaredNorm()) * x;
    g(0) += eps * std::cos(two_pi * t);
    return g;
  };
  h.hess = [eps, dim](double, const Eigen::VectorXd& x) {
    Eigen::MatrixXd A = (1.0 + eps * x.squaredNorm()) * Eigen::MatrixXd::Identity(dim, dim);
    A += 2.0 * eps * x * x.transpose();
    return A;
  };
  h.dt_grad = [eps, dim](double t, const Eigen::VectorXd&) {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(dim);
    g(0) = -two_pi * eps * std::sin(two_pi * t);
    return g;
  };
  return h;
}

// ============================================================================
// Floer functions
// ============================================================================

namespace {

// J0 applied blockwise to the coordinate vector.
Eigen::VectorXd apply_j0(const FourierLoop& u) {
  const int m = u.dim() / 2;
  const Eigen::Index b = block_size(u.order());
  Eigen::VectorXd out(u.coords().size());
  out.head(m * b) = -u.coords().tail(m * b);
  out.tail(m * b) = u.coords().head(m * b);
  return out;
}

}  // namespace

LevelOperator symplectic_derivative(int dim, int N) {
  return compose(constant_matrix_operator(standard_complex_structure(dim), N), derivative_operator(dim, N));
}

FloerFunctionNumeric symplectic_action(const HamiltonianData& h, double shift) {
  if (h.dim <= 0 || h.dim % 2 != 0) throw DimensionMismatch("the symplectic action needs an even dimension");
  const int n = h.dim;
  FloerFunctionNumeric F;
  F.name = "action[" + h.name + "]";
  F.dim = n;
  F.domain = [n](const FourierLoop& u) { return u.dim() == n && u.finite(); };

  auto check = [n](const FourierLoop& u) {
    if (u.dim() != n) throw DimensionMismatch("loop dimension does not match the Hamiltonian");
  };

  F.eval = [h, check](const FourierLoop& u) {
    check(u);
    const auto& col = collocation(u.order());
    const Eigen::MatrixXd X = nodal_values(u);
    double hsum = 0.0;
    for (int l = 0; l < col.L; ++l) hsum += h.H(col.node(l), X.row(l).transpose());
    return -0.5 * apply_j0(u).dot(u.derivative().coords()) - hsum / col.L;
  };

  F.grad = [h, check](const FourierLoop& u) {
    check(u);
    const auto& col = collocation(u.order());
    const Eigen::MatrixXd X = nodal_values(u);
    Eigen::MatrixXd G(col.L, u.dim());
    for (int l = 0; l < col.L; ++l) G.row(l) = h.grad(col.node(l), X.row(l).transpose()).transpose();
    return FourierLoop(u.dim(), u.order(), apply_j0(u.derivative())) - interpolate(G, u.order());
  };
  F.grad2 = F.grad;

  auto hess_field = [h](const FourierLoop& u) {
    const auto& col = collocation(u.order());
    const Eigen::MatrixXd X = nodal_values(u);
    const int d = u.dim();
    Eigen::MatrixXd field(col.L, d * d);
    for (int l = 0; l < col.L; ++l) {
      const Eigen::MatrixXd A = h.hess(col.node(l), X.row(l).transpose());
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) field(l, i * d + j) = A(i, j);
    }
    return field;
  };

  F.hess = [hess_field, check](const FourierLoop& u) {
    check(u);
    const LevelOperator M = multiplication_operator(hess_field(u), u.dim(), u.order(), Level(1.0), Level(0.0));
    const LevelOperator P = symplectic_derivative(u.dim(), u.order());
    return LevelOperator(P.matrix - M.matrix, Level(1.0), Level(0.0), u.dim(), u.order());
  };
  F.hess2 = [F](const FourierLoop& u) { return F.hess(u).with_levels(Level(2.0), Level(1.0)); };

  F.principal_split = [hess_field, check, shift](const FourierLoop& u) {
    check(u);
    const Eigen::Index size = u.coords().size();
    const LevelOperator D = symplectic_derivative(u.dim(), u.order());
    const LevelOperator M = multiplication_operator(hess_field(u), u.dim(), u.order(), Level(1.0), Level(0.0));
    const Eigen::MatrixXd cI = shift * Eigen::MatrixXd::Identity(size, size);
    return std::pair{LevelOperator(D.matrix - cI, Level(1.0), Level(0.0), u.dim(), u.order()),
                     LevelOperator(cI - M.matrix, Level(1.0), Level(0.0), u.dim(), u.order())};
  };
  return F;
}

namespace {

void require_symmetric(const LevelOperator& L) {
  const double scale = L.matrix.norm();
  if ((L.matrix - L.matrix.transpose()).norm() > 1e-12 * std::max(scale, 1.0))
    throw AsymmetricOperator("quadratic_spectral needs an operator symmetric at level 0");
}

}  // namespace

FloerFunctionNumeric quadratic_spectral(const OperatorFamily& family, int dim, std::string name) {
  struct Cache {
    std::mutex mu;
    std::map<int, LevelOperator> ops;
  };
  auto cache = std::make_shared<Cache>();
  auto op = [family, cache, dim](const FourierLoop& u) {
    if (u.dim() != dim) throw DimensionMismatch("loop dimension does not match the quadratic form");
    std::lock_guard lock(cache->mu);
    auto it = cache->ops.find(u.order());
    if (it == cache->ops.end()) {
      LevelOperator L = family(u.order());
      if (L.dim != dim || L.N != u.order()) throw DimensionMismatch("operator family returned the wrong shape");
      require_symmetric(L);
      it = cache->ops.emplace(u.order(), std::move(L)).first;
    }
    return it->second;
  };

  FloerFunctionNumeric F;
  F.name = std::move(name);
  F.dim = dim;
  F.domain = [dim](const FourierLoop& u) { return u.dim() == dim && u.finite(); };
  F.eval = [op](const FourierLoop& u) { return 0.5 * u.coords().dot(op(u).matrix * u.coords()); };
  F.grad = [op](const FourierLoop& u) { return op(u).apply(u); };
  F.grad2 = F.grad;
  F.hess = [op](const FourierLoop& u) { return op(u).with_levels(Level(1.0), Level(0.0)); };
  F.hess2 = [op](const FourierLoop& u) { return op(u).with_levels(Level(2.0), Level(1.0)); };
  F.principal_split = [op](const FourierLoop& u) {
    const LevelOperator L = op(u).with_levels(Level(1.0), Level(0.0));
    return std::pair{L, LevelOperator(Eigen::MatrixXd::Zero(L.matrix.rows(), L.matrix.cols()), Level(1.0),
                                      Level(0.0), L.dim, L.N)};
  };
  return F;
}

FloerFunctionNumeric quadratic_spectral(const LevelOperator& L, std::string name) {
  require_symmetric(L);
  auto family = [L](int N) {
    if (N != L.N) throw DimensionMismatch("quadratic form defined only at its own truncation order");
    return L;
  };
  return quadratic_spectral(family, L.dim, std::move(name));
}

// ============================================================================
// Finite-difference oracles
// ============================================================================

double relative_error(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale > 0.0 ? std::abs(a - b) / scale : 0.0;
}

double fd_directional(const ScalarMap& f, const FourierLoop& q, const FourierLoop& xi, double h) {
  auto central = [&](double step) { return (f(q + step * xi) - f(q - step * xi)) / (2.0 * step); };
  return (4.0 * central(0.5 * h) - central(h)) / 3.0;
}

double fd_second(const ScalarMap& f, const FourierLoop& q, const FourierLoop& xi, const FourierLoop& eta, double h) {
  auto stencil = [&](double step) {
    const FourierLoop a = step * xi;
    const FourierLoop b = step * eta;
    return (f(q + a + b) - f(q + a - b) - f(q - a + b) + f(q - a - b)) / (4.0 * step * step);
  };
  return (4.0 * stencil(0.5 * h) - stencil(h)) / 3.0;
}

// ============================================================================
// Axiom checks
// ============================================================================

bool FunctionReport::pass() const {
  if (clauses.empty()) return false;
  return std::all_of(clauses.begin(), clauses.end(), [](const ClauseReport& c) { return c.pass; });
}

const ClauseReport& FunctionReport::clause(const std::string& name) const {
  for (const auto& c : clauses)
    if (c.clause == name) return c;
  throw std::out_of_range("no clause " + name + " in report");
}

namespace {

FourierLoop direction(const CheckOptions& opts, std::size_t sample, int d, const FourierLoop& q, Level level) {
  return random_direction(mix_seed(opts.seed, sample * 1000 + static_cast<std::uint64_t>(d)), q.dim(), q.order(),
                          level);
}

// Richardson-extrapolated central difference of the gradient along xi.
FourierLoop gradient_difference(const FloerFunctionNumeric& F, const FourierLoop& q, const FourierLoop& xi, double h) {
  auto central = [&](double step) { return (0.5 / step) * (F.grad(q + step * xi) - F.grad(q - step * xi)); };
  return (1.0 / 3.0) * (4.0 * central(0.5 * h) - central(h));
}

double consistency_residual(const FloerFunctionNumeric& F, const FourierLoop& q, const FourierLoop& xi,
                            const LevelOperator& A, double h) {
  const FourierLoop fd = gradient_difference(F, q, xi, h);
  const FourierLoop exact = A.apply(xi);
  const double scale = std::max(sobolev_norm(fd, Level(0.0)), sobolev_norm(exact, Level(0.0)));
  return scale > 0 ? sobolev_norm(fd - exact, Level(0.0)) / scale : 0.0;
}

}  // namespace

FunctionReport gradient_axiom_check(const FloerFunctionNumeric& F, const std::vector<FourierLoop>& samples,
                                    const CheckOptions& opts) {
  FunctionReport rep;
  rep.function = F.name;

  ClauseReport grad{"(H0-gradient)", 0.0, opts.gradient_tol};
  ClauseReport restr{"(Restriction)", 0.0, opts.restriction_tol};
  ClauseReport diff{"(Differentiability)", 0.0, opts.consistency_tol};
  Sweep h1_sweep;

  for (std::size_t k = 0; k < samples.size(); ++k) {
    const FourierLoop& q = samples[k];
    const FourierLoop g = F.grad(q);
    const LevelOperator A = F.hess(q);
    for (int d = 0; d < opts.directions; ++d) {
      const FourierLoop xi = direction(opts, k, d, q, Level(1.0));
      const double fd = fd_directional(F.eval, q, xi, opts.h);
      grad.residual = std::max(grad.residual, relative_error(fd, g.coords().dot(xi.coords())));
      diff.residual = std::max(diff.residual, consistency_residual(F, q, xi, A, opts.h));
    }
    const FourierLoop g2 = F.grad2(q);
    const double scale = sobolev_norm(g, Level(0.0));
    restr.residual = std::max(restr.residual, scale > 0 ? sobolev_norm(g2 - g, Level(0.0)) / scale : 0.0);
    if (k == 0)
      for (int N : opts.sweep) h1_sweep.push_back({N, sobolev_norm(F.grad2(q.resized(N)), Level(1.0))});
  }

  grad.pass = grad.residual <= grad.tolerance;
  diff.pass = diff.residual <= diff.tolerance;
  const double spread = h1_sweep.empty() ? 0.0 : stabilization_spread(h1_sweep, opts.stable_from);
  restr.detail = {{"h1_norm_sweep", to_json(h1_sweep, "norm")}, {"spread", spread}};
  restr.pass = restr.residual <= restr.tolerance && spread <= opts.stable_tol;
  rep.clauses = {grad, restr, diff};
  return rep;
}

FunctionReport hessian_axiom_check(const FloerFunctionNumeric& F, const std::vector<FourierLoop>& samples,
                                   const CheckOptions& opts) {
  FunctionReport rep;
  rep.function = F.name;

  ClauseReport h0{"(H0-Hessian)", 0.0, opts.hessian_tol};
  ClauseReport restr{"(Restriction)", 0.0, opts.restriction_tol};
  ClauseReport cont{"(Continuity)", 0.0, 0.2};
  ClauseReport fred{"(Fredholm)", 0.0, 0.0};
  double symmetry = 0.0, consistency = 0.0, modulus = 0.0;
  Sweep level2_sweep;
  nlohmann::json fredholm_reports = nlohmann::json::array();
  bool fredholm_ok = !samples.empty();

  for (std::size_t k = 0; k < samples.size(); ++k) {
    const FourierLoop& q = samples[k];
    const LevelOperator A = F.hess(q);
    const double anorm = A.matrix.norm();
    symmetry = std::max(symmetry, anorm > 0 ? (A.matrix - A.matrix.transpose()).norm() / anorm : 0.0);

    for (int d = 0; d < opts.directions; ++d) {
      const FourierLoop xi = direction(opts, k, 2 * d, q, Level(1.0));
      const FourierLoop eta = direction(opts, k, 2 * d + 1, q, Level(1.0));
      const double fd = fd_second(F.eval, q, xi, eta, opts.h);
      h0.residual = std::max(h0.residual, relative_error(fd, eta.coords().dot(A.matrix * xi.coords())));
      consistency = std::max(consistency, consistency_residual(F, q, xi, A, opts.h));

      const FourierLoop smooth = direction(opts, k, 500 + d, q, Level(2.0));
      const FourierLoop a1 = A.apply(smooth);
      const FourierLoop a2 = F.hess2(q).apply(smooth);
      const double scale = sobolev_norm(a1, Level(0.0));
      restr.residual = std::max(restr.residual, scale > 0 ? sobolev_norm(a2 - a1, Level(0.0)) / scale : 0.0);
    }

    // Vanishing of q -> A^q increments: the ratio at steps h and h/10 must shrink.
    const FourierLoop zeta = direction(opts, k, 900, q, Level(1.0));
    auto increment = [&](double step) {
      const LevelOperator B = F.hess(q + step * zeta);
      return op_norm(LevelOperator(B.matrix - A.matrix, Level(1.0), Level(0.0), q.dim(), q.order()), Level(1.0),
                     Level(0.0));
    };
    const double d1 = increment(opts.continuity_h);
    const double d2 = increment(0.1 * opts.continuity_h);
    modulus = std::max(modulus, d1 / opts.continuity_h);
    const double floor = 1e-12 * op_norm(A, Level(1.0), Level(0.0));
    if (d2 > floor) cont.residual = std::max(cont.residual, d1 > 0 ? d2 / d1 : 1.0);

    if (k == 0)
      for (int N : opts.sweep) level2_sweep.push_back({N, op_norm(F.hess2(q.resized(N)), Level(2.0), Level(1.0))});

    if (static_cast<int>(k) < opts.fredholm_samples) {
      const FourierLoop base = q;
      const auto r1 = fredholm_diagnostic([&](int N) { return F.hess(base.resized(N)); }, Level(1.0), Level(0.0),
                                          opts.sweep, opts.fredholm);
      const auto r2 = fredholm_diagnostic([&](int N) { return F.hess2(base.resized(N)); }, Level(2.0), Level(1.0),
                                          opts.sweep, opts.fredholm);
      fredholm_ok = fredholm_ok && r1.fredholm() && r2.fredholm();
      fred.residual = std::max({fred.residual, std::abs(static_cast<double>(r1.index_estimate)),
                                std::abs(static_cast<double>(r2.index_estimate))});
      fredholm_reports.push_back({{"H1->H0", to_json(r1)}, {"H2->H1", to_json(r2)}});
    }
  }

  h0.detail = {{"symmetry_residual", symmetry}, {"gradient_consistency", consistency}};
  h0.pass = h0.residual <= h0.tolerance && symmetry <= opts.symmetry_tol && consistency <= opts.consistency_tol;

  const double spread = level2_sweep.empty() ? 0.0 : stabilization_spread(level2_sweep, opts.stable_from);
  restr.detail = {{"level2_norm_sweep", to_json(level2_sweep, "norm")}, {"spread", spread}};
  restr.pass = restr.residual <= restr.tolerance && spread <= opts.stable_tol;

  cont.detail = {{"modulus", modulus}};
  cont.pass = std::isfinite(modulus) && cont.residual <= cont.tolerance;

  fred.detail = fredholm_reports;
  fred.pass = fredholm_ok;
  rep.clauses = {h0, restr, cont, fred};
  return rep;
}

nlohmann::json to_json(const FunctionReport& r) {
  nlohmann::json out = nlohmann::json::object();
  for (const auto& c : r.clauses)
    out[c.clause] = {{"residual", c.residual},
                     {"tolerance", c.tolerance},
                     {"verdict", c.pass ? "pass" : "fail"},
                     {"detail", c.detail}};
  return {{"function", r.function}, {"clauses", std::move(out)}, {"verdict", r.pass() ? "pass" : "fail"}};
}

}  // namespace floerlab
