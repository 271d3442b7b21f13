#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>
#include <numbers>

#include "floerlab/errors.hpp"
#include "floerlab/level_operator.hpp"

using namespace floerlab;

namespace {

constexpr double kPi = std::numbers::pi;

// Weighted norm built from scratch: W_b^{1/2} T W_a^{-1/2} with weights from the mode formula.
double reference_norm(const LevelOperator& T, double a, double b) {
  const int B = block_size(T.N);
  const Eigen::Index n = T.matrix.cols();
  Eigen::VectorXd wa(n), wb(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const int k = mode_of(static_cast<int>(i % B));
    wa(i) = std::pow(1.0 + 4.0 * kPi * kPi * k * k, -a / 2.0);
    wb(i) = std::pow(1.0 + 4.0 * kPi * kPi * k * k, b / 2.0);
  }
  const Eigen::MatrixXd S = wb.asDiagonal() * T.matrix * wa.asDiagonal();
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S.transpose() * S, Eigen::EigenvaluesOnly);
  return std::sqrt(es.eigenvalues().maxCoeff());
}

Eigen::VectorXd smooth_field(int N) {
  const Collocation& c = collocation(N);
  Eigen::VectorXd g(c.L);
  for (int l = 0; l < c.L; ++l) g(l) = 2.0 + std::sin(2.0 * kPi * c.node(l)) + 0.3 * std::cos(6.0 * kPi * c.node(l));
  return g;
}

LevelOperator shifted_hamiltonian(int N) {
  // J0 d/dt + 1/2 on R^2 loops: invertible H_1 -> H_0.
  Eigen::Matrix2d J;
  J << 0.0, -1.0, 1.0, 0.0;
  const LevelOperator D = derivative_operator(2, N);
  LevelOperator T = compose(constant_matrix_operator(J, N), D);
  T.matrix += 0.5 * Eigen::MatrixXd::Identity(T.matrix.rows(), T.matrix.cols());
  return T.with_levels(Level(1.0), Level(0.0));
}

}  // namespace

TEST_CASE("op_norm matches the explicitly weighted spectral norm") {
  const LevelOperator M = scalar_multiplication_operator(smooth_field(24), 24, Level(0.0), Level(0.0));
  for (auto [a, b] : {std::pair{0.0, 0.0}, {1.0, 1.0}, {1.0, 0.0}, {0.75, 0.75}, {-1.0, -1.0}})
    CHECK(op_norm(M, Level(a), Level(b)) == doctest::Approx(reference_norm(M, a, b)).epsilon(1e-12));
}

TEST_CASE("large operators go through the iterative path and agree with a dense solve") {
  Eigen::MatrixXd field(collocation(128).L, 4);
  const Collocation& c = collocation(128);
  for (int l = 0; l < c.L; ++l) {
    const double t = c.node(l);
    field.row(l) << 1.0 + 0.2 * std::cos(2.0 * kPi * t), 0.3 * std::sin(4.0 * kPi * t), -0.1, 1.5;
  }
  const LevelOperator M = multiplication_operator(field, 2, 128, Level(0.0), Level(0.0));
  REQUIRE(M.matrix.cols() > 400);
  for (double s : {0.0, 0.75, 1.0})
    CHECK(op_norm(M, Level(s), Level(s)) == doctest::Approx(reference_norm(M, s, s)).epsilon(1e-11));
}

TEST_CASE("derivative norm H1 -> H0 has the closed form") {
  for (int N : {8, 64}) {
    const double expect = std::sqrt(4.0 * kPi * kPi * N * N / (1.0 + 4.0 * kPi * kPi * N * N));
    CHECK(op_norm(derivative_operator(1, N), Level(1.0), Level(0.0)) == doctest::Approx(expect).epsilon(1e-13));
  }
}

TEST_CASE("collocation multiplication is the nodal product") {
  const int N = 16;
  const Eigen::VectorXd g = smooth_field(N);
  const FourierLoop u = random_loop(3, 1, N, 1.0);
  const LevelOperator M = scalar_multiplication_operator(g, N, Level(0.0), Level(0.0));
  const Eigen::MatrixXd nod = nodal_values(u).array().colwise() * g.array();
  CHECK((M.apply(u).coords() - interpolate(nod, N).coords()).norm() < 1e-12);
}

TEST_CASE("products of collocation multipliers are exact") {
  const int N = 12;
  const Eigen::VectorXd g = smooth_field(N);
  const Eigen::VectorXd h = g.array().square();
  const LevelOperator G = scalar_multiplication_operator(g, N, Level(0.0), Level(0.0));
  const LevelOperator H = scalar_multiplication_operator(h, N, Level(0.0), Level(0.0));
  CHECK((compose(G, G).matrix - H.matrix).norm() < 1e-11);
}

TEST_CASE("level adjoint satisfies the pairing identity") {
  const int N = 10;
  Eigen::MatrixXd field(collocation(N).L, 4);
  field.setRandom();
  const LevelOperator T = multiplication_operator(field, 2, N, Level(0.0), Level(0.0));
  const FourierLoop xi = random_loop(1, 2, N, 1.0);
  const FourierLoop eta = random_loop(2, 2, N, 1.0);
  for (double s : {0.0, 0.75, 1.0}) {
    const LevelOperator Ts = adjoint(T, Level(s));
    CHECK(inner(T.apply(xi), eta, Level(s)) == doctest::Approx(inner(xi, Ts.apply(eta), Level(s))).epsilon(1e-10));
  }
}

TEST_CASE("Riesz-Thorin interpolation holds for a smooth multiplier") {
  const LevelOperator M = scalar_multiplication_operator(smooth_field(32), 32, Level(0.0), Level(0.0));
  for (double s : {0.25, 0.6, 0.9}) {
    const InterpolationReport r = check_interpolation(M, s);
    CHECK(r.holds);
    CHECK(r.norm_s <= r.bound + 1e-10);
  }
}

TEST_CASE("stabilization compares entries from the threshold on against the last one") {
  const Sweep good{{16, 1.0}, {32, 2.0}, {64, 2.98}, {128, 3.0}};
  CHECK(stabilizes(good, 0.05));
  CHECK(stabilization_spread(good) == doctest::Approx(0.02 / 3.0));
  const Sweep bad{{16, 1.0}, {64, 2.0}, {128, 3.0}};
  CHECK_FALSE(stabilizes(bad, 0.05));
  const Sweep short_sweep{{16, 1.0}, {32, 1.01}};
  CHECK(stabilizes(short_sweep, 0.05));
}

TEST_CASE("extension tower reuses one matrix") {
  const LevelOperator M = scalar_multiplication_operator(smooth_field(16), 16, Level(0.0), Level(0.0));
  const ExtensionReport r = extension_consistency(M, {Level(-1.0), Level(0.0), Level(1.0)});
  CHECK(r.same_matrix);
  CHECK(r.levels.size() == 3);
}

TEST_CASE("inclusion H1 -> H0 is compact") {
  const Eigen::VectorXd sv = compactness_profile(identity_operator(1, 32), Level(1.0), Level(0.0));
  CHECK(sv(0) == doctest::Approx(1.0));
  CHECK(sv(sv.size() - 1) == doctest::Approx(1.0 / std::sqrt(1.0 + 4.0 * kPi * kPi * 32 * 32)));
}

TEST_CASE("Fredholm diagnostic separates an invertible operator from the inclusion") {
  const std::vector<int> sweep{16, 32, 64, 128};
  const FredholmReport good = fredholm_diagnostic(shifted_hamiltonian, Level(1.0), Level(0.0), sweep);
  CHECK(good.fredholm());
  CHECK(good.index_estimate == 0);
  CHECK(good.gap_spread <= 0.02);

  const FredholmReport incl =
      fredholm_diagnostic([](int N) { return identity_operator(2, N); }, Level(1.0), Level(0.0), sweep);
  CHECK_FALSE(incl.fredholm());
  CHECK(incl.sigma_min_decay >= 4.0);
}

TEST_CASE("point evaluation norm is the root of the inverse weight sum") {
  double acc = 0.0;
  for (int k = -20; k <= 20; ++k) acc += 1.0 / mode_weight(k, 0.75);
  CHECK(point_evaluation_norm(20, Level(0.75)) == doctest::Approx(std::sqrt(acc)));
}

TEST_CASE("alternating bilinear estimate stays below the exact collocation norm") {
  const int N = 16;
  const Collocation& c = collocation(N);
  Eigen::MatrixXd T(c.L, 1);
  for (int l = 0; l < c.L; ++l) T(l, 0) = 1.0 + 0.5 * std::cos(2.0 * kPi * c.node(l));
  const BilinearLevelMap B(1, N, T, Level(0.75), Level(0.0), Level(0.0));
  const double exact = collocation_l2_bilinear_norm(B, Level(0.75));
  const double est = bilinear_norm_estimate(B, Level(0.75), Level(0.0), Level(0.0));
  CHECK(est <= exact * (1.0 + 1e-9));
  CHECK(est >= 0.95 * exact);
}
