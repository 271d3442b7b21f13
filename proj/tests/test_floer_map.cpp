#include <doctest.h>

#include <cmath>

#include "floerlab/errors.hpp"
#include "floerlab/floer_map.hpp"

using namespace floerlab;

namespace {

FourierLoop circle(int N, double r, double cx) {
  FourierLoop q(2, N);
  const int b = block_size(N);
  q.coords()(0) = cx;
  q.coords()(1) = r / std::sqrt(2.0);
  q.coords()(b + 2) = r / std::sqrt(2.0);
  return q;
}

Eigen::Vector2d shear_by_hand(const Eigen::Vector2d& x) { return {x(0), x(1) + x(0) * x(0)}; }

}  // namespace

TEST_CASE("chart jets match hand derivatives of the shear") {
  const Eigen::Vector2d x(0.3, -0.7);
  const ChartDerivatives d = shear_chart().derivatives(x);
  CHECK((d.value - shear_by_hand(x)).norm() < 1e-15);
  CHECK(d.jac(1, 0) == doctest::Approx(0.6));
  CHECK(d.jac(0, 0) == doctest::Approx(1.0));
  CHECK(d.jac(1, 1) == doctest::Approx(1.0));
  CHECK(d.second(1, 0) == doctest::Approx(2.0));  // d_x d_x Phi_2
  CHECK(d.third.norm() == doctest::Approx(0.0));
}

TEST_CASE("superposition acts pointwise at the collocation nodes") {
  const int N = 8;
  const FourierLoop u = random_loop(5, 2, N, 2.0, 0.3);
  const FourierLoop v = SuperpositionMap(shear_chart()).apply(u);
  const Collocation& c = collocation(N);
  for (int l = 0; l < c.L; ++l)
    CHECK((v.evaluate(c.node(l)) - shear_by_hand(u.evaluate(c.node(l)))).norm() < 1e-13);
}

TEST_CASE("dphi is the derivative of apply") {
  const int N = 12;
  const SuperpositionMap phi(rotation_chart());
  const FourierLoop u = random_loop(1, 2, N, 2.0, 0.3);
  const FourierLoop xi = random_direction(2, 2, N, Level(1.0));
  const double h = 1e-5;
  const FourierLoop fd = (1.0 / (2.0 * h)) * (phi.apply(u + h * xi) - phi.apply(u - h * xi));
  const FourierLoop an = phi.dphi(u).apply(xi);
  CHECK(sobolev_norm(fd - an, Level(0.0)) <= 1e-8 * sobolev_norm(an, Level(0.0)));
}

TEST_CASE("d2phi is the derivative of dphi") {
  const int N = 12;
  const SuperpositionMap phi(rotation_chart());
  const FourierLoop u = random_loop(3, 2, N, 2.0, 0.3);
  const FourierLoop xi = random_direction(4, 2, N, Level(1.0));
  const FourierLoop eta = random_direction(5, 2, N, Level(1.0));
  const double h = 1e-5;
  const FourierLoop fd =
      (1.0 / (2.0 * h)) * (phi.dphi(u + h * xi).apply(eta) - phi.dphi(u - h * xi).apply(eta));
  const FourierLoop an = phi.d2phi(u)(xi, eta);
  CHECK(sobolev_norm(fd - an, Level(0.0)) <= 1e-7 * sobolev_norm(an, Level(0.0)));
}

TEST_CASE("chain rule for composed superpositions") {
  const int N = 10;
  const SuperpositionMap shear(shear_chart()), rot(rotation_chart());
  const SuperpositionMap both = compose(rot, shear);
  const FourierLoop u = random_loop(6, 2, N, 2.0, 0.3);
  const FourierLoop xi = random_direction(7, 2, N, Level(1.0));
  const FourierLoop lhs = both.dphi(u).apply(xi);
  const FourierLoop rhs = rot.dphi(shear.apply(u)).apply(shear.dphi(u).apply(xi));
  CHECK(sobolev_norm(lhs - rhs, Level(0.0)) < 1e-12);
  CHECK(sobolev_norm(both.apply(u) - rot.apply(shear.apply(u)), Level(0.0)) < 1e-12);
}

TEST_CASE("inverse round trip recovers the loop") {
  const FourierLoop u = random_loop(8, 2, 16, 2.0, 0.4);
  for (const DiffeoChart& chart : {shear_chart(), rotation_chart(), stereographic_transition_chart()}) {
    const SuperpositionMap phi(chart);
    const FourierLoop w = chart.name() == stereographic_transition_chart().name() ? u + circle(16, 0.0, 1.0) : u;
    CHECK(sobolev_norm(invert(phi).apply(phi.apply(w)) - w, Level(1.0)) < 1e-10);
  }
  CHECK_THROWS_AS(invert(SuperpositionMap(shear_chart().bare())), MissingInverse);
}

TEST_CASE("superposition levels are restricted to (1/2, 1)") {
  CHECK_THROWS_AS(SuperpositionMap(shear_chart(), Level(0.5)), LevelError);
  CHECK_THROWS_AS(SuperpositionMap(shear_chart(), Level(1.0)), LevelError);
  CHECK_NOTHROW(SuperpositionMap(shear_chart(), Level(0.6)));
}

TEST_CASE("a node outside the chart domain is named") {
  const SuperpositionMap phi(stereographic_transition_chart());
  CHECK_NOTHROW(phi.nodal(circle(8, 0.5, 0.0)));
  // centred at (-0.5, 0): u(0) is the origin
  try {
    phi.nodal(circle(8, 0.5, -0.5));
    FAIL("expected OutOfChartError");
  } catch (const OutOfChartError& e) {
    CHECK(e.node() == 0);
  }
}

TEST_CASE("second-order Leibniz residual shrinks quadratically") {
  const FourierLoop q = circle(16, 0.15, 0.1);
  const FourierLoop xi = random_direction(11, 2, 16, Level(1.0));
  const FourierLoop eta = random_direction(12, 2, 16, Level(1.0));
  const SuperpositionMap shear(shear_chart()), rot(rotation_chart());
  CHECK(leibniz_sweep(shear, rot, q, xi, eta).slope == doctest::Approx(2.0).epsilon(0.1));
  CHECK(leibniz_sweep(rot, shear, q, xi, eta).slope == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("smooth charts satisfy the axioms and the C1 chart fails second order") {
  const std::vector<FourierLoop> samples{circle(8, 0.15, 0.1), random_loop(3, 2, 8, 2.0, 0.2)};
  AxiomOptions opts;
  opts.sweep = {16, 32, 64, 128};

  const FloerAxiomReport shear = verify_floer_axioms(SuperpositionMap(shear_chart()), samples, opts);
  CHECK(shear.pass());
  CHECK(shear.axioms.size() == 4);

  const FloerAxiomReport broken = verify_floer_axioms(SuperpositionMap(broken_c1_chart()), samples, opts);
  CHECK_FALSE(broken.pass());
  CHECK(broken.axiom("(i)1").pass());
  CHECK_FALSE(broken.axiom("(ii)2").pass());
}

TEST_CASE("merged reports equal the report of the union") {
  const std::vector<FourierLoop> a{circle(8, 0.15, 0.1)};
  const std::vector<FourierLoop> b{random_loop(3, 2, 8, 2.0, 0.2)};
  AxiomOptions opts;
  opts.sweep = {16, 32};
  const SuperpositionMap phi(rotation_chart());
  const FloerAxiomReport whole = verify_floer_axioms(phi, {a[0], b[0]}, opts);
  const FloerAxiomReport merged = merge(verify_floer_axioms(phi, a, opts), verify_floer_axioms(phi, b, opts), opts);
  CHECK(reports_agree(whole, merged, 1e-9));
}
