#include <doctest.h>

#include <cmath>
#include <numbers>

#include "floerlab/errors.hpp"
#include "floerlab/floer_function.hpp"

using namespace floerlab;

namespace {

constexpr double kPi = std::numbers::pi;

FourierLoop circle(int N, double r) {
  FourierLoop q(2, N);
  q.coords()(1) = r / std::sqrt(2.0);
  q.coords()(block_size(N) + 2) = r / std::sqrt(2.0);
  return q;
}

}  // namespace

TEST_CASE("harmonic action of a round circle has the closed form") {
  // u = r (cos 2 pi t, sin 2 pi t): <J0 u, u'>_0 = 2 pi r^2 and H = r^2 / 2 along u.
  const FloerFunctionNumeric F = symplectic_action(harmonic_hamiltonian());
  for (double r : {0.1, 0.7}) CHECK(F.eval(circle(16, r)) == doctest::Approx(-kPi * r * r - 0.5 * r * r).epsilon(1e-13));
  CHECK(F.eval(FourierLoop(2, 16)) == doctest::Approx(0.0));
}

TEST_CASE("action gradient matches finite differences") {
  for (const HamiltonianData& h : {harmonic_hamiltonian(), anharmonic_hamiltonian()}) {
    const FloerFunctionNumeric F = symplectic_action(h);
    for (std::uint64_t i = 0; i < 4; ++i) {
      const FourierLoop q = random_loop(100 + i, 2, 16, 2.0, 0.3);
      const FourierLoop xi = random_direction(200 + i, 2, 16, Level(1.0));
      const double an = inner(F.grad(q), xi, Level(0.0));
      CHECK(relative_error(an, fd_directional(F.eval, q, xi)) <= 1e-7);
    }
  }
}

TEST_CASE("action Hessian matches second differences and is symmetric") {
  const FloerFunctionNumeric F = symplectic_action(anharmonic_hamiltonian());
  for (std::uint64_t i = 0; i < 4; ++i) {
    const FourierLoop q = random_loop(300 + i, 2, 16, 2.0, 0.3);
    const FourierLoop xi = random_direction(400 + i, 2, 16, Level(1.0));
    const FourierLoop eta = random_direction(500 + i, 2, 16, Level(1.0));
    const LevelOperator A = F.hess(q);
    const double an = inner(A.apply(xi), eta, Level(0.0));
    CHECK(relative_error(an, fd_second(F.eval, q, xi, eta)) <= 1e-6);
    CHECK(std::abs(an - inner(xi, A.apply(eta), Level(0.0))) <= 1e-10 * std::max(1.0, std::abs(an)));
  }
}

TEST_CASE("the H2 -> H1 Hessian is the same matrix") {
  const FloerFunctionNumeric F = symplectic_action(harmonic_hamiltonian());
  const FourierLoop q = random_loop(7, 2, 16, 2.0, 0.3);
  CHECK((F.hess(q).matrix - F.hess2(q).matrix).norm() == 0.0);
  CHECK(F.hess2(q).dom == Level(2.0));
  CHECK(F.hess2(q).cod == Level(1.0));
}

TEST_CASE("principal split sums to the Hessian") {
  const FloerFunctionNumeric F = symplectic_action(anharmonic_hamiltonian());
  const FourierLoop q = random_loop(8, 2, 16, 2.0, 0.3);
  const auto [P, C] = F.principal_split(q);
  CHECK((P.matrix + C.matrix - F.hess(q).matrix).norm() < 1e-12);
}

TEST_CASE("gradient and Hessian axiom checks pass for the action") {
  CheckOptions opts;
  opts.sweep = {16, 32, 64, 128};
  const FloerFunctionNumeric F = symplectic_action(harmonic_hamiltonian());
  const std::vector<FourierLoop> samples{random_loop(9, 2, 16, 2.0, 0.3)};
  CHECK(gradient_axiom_check(F, samples, opts).pass());
  const FunctionReport h = hessian_axiom_check(F, samples, opts);
  CHECK(h.pass());
  CHECK(h.clause("(Fredholm)").pass);
}

TEST_CASE("odd dimensions and asymmetric operators are rejected") {
  CHECK_THROWS_AS(symplectic_action(harmonic_hamiltonian(3)), DimensionMismatch);
  CHECK_THROWS_AS(quadratic_spectral(derivative_operator(1, 8)), AsymmetricOperator);
  CHECK_NOTHROW(quadratic_spectral(identity_operator(1, 8)));
}

TEST_CASE("quadratic spectral function has gradient L u") {
  const LevelOperator L = compose(derivative_operator(1, 8).with_levels(Level(0.0), Level(0.0)),
                                  derivative_operator(1, 8).with_levels(Level(0.0), Level(0.0)));
  const FloerFunctionNumeric F = quadratic_spectral(L);
  const FourierLoop u = random_loop(10, 1, 8, 2.0);
  CHECK(F.eval(u) == doctest::Approx(0.5 * inner(L.apply(u), u, Level(0.0))));
  CHECK(sobolev_norm(F.grad(u) - L.apply(u), Level(0.0)) < 1e-12);
}

TEST_CASE("relative error conventions") {
  CHECK(relative_error(0.0, 0.0) == 0.0);
  CHECK(relative_error(1.0, 1.1) == doctest::Approx(0.1 / 1.1));
  CHECK(relative_error(-2.0, 2.0) == doctest::Approx(2.0));
}
