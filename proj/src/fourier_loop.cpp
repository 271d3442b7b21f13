#include "floerlab/fourier_loop.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <random>
#include <sstream>

#include "floerlab/errors.hpp"

namespace floerlab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
const double kSqrt2 = std::sqrt(2.0);

double basis_value(int j, double t) {
  if (j == 0) return 1.0;
  const int k = mode_of(j);
  const double arg = kTwoPi * k * t;
  return (j % 2 == 1) ? kSqrt2 * std::cos(arg) : kSqrt2 * std::sin(arg);
}

Eigen::MatrixXd evaluation_matrix(int N, int points) {
  Eigen::MatrixXd E(points, block_size(N));
  for (int l = 0; l < points; ++l) {
    const double t = static_cast<double>(l) / points;
    for (int j = 0; j < block_size(N); ++j) E(l, j) = basis_value(j, t);
  }
  return E;
}

}  // namespace

// ============================================================================
// FourierLoop
// ============================================================================

FourierLoop::FourierLoop(int dim, int N)
    : dim_(dim), N_(N), coords_(Eigen::VectorXd::Zero(dim * block_size(N))) {
  if (dim <= 0 || N < 0) throw DimensionMismatch("loop needs dim > 0 and N >= 0");
}

FourierLoop::FourierLoop(int dim, int N, Eigen::VectorXd coords) : dim_(dim), N_(N), coords_(std::move(coords)) {
  if (dim <= 0 || N < 0) throw DimensionMismatch("loop needs dim > 0 and N >= 0");
  if (coords_.size() != dim * block_size(N)) throw DimensionMismatch("coordinate vector has wrong length");
  if (!coords_.allFinite()) throw InvalidLoop("non-finite loop coefficient");
}

FourierLoop FourierLoop::constant(const Eigen::VectorXd& value, int N) {
  FourierLoop u(static_cast<int>(value.size()), N);
  for (int c = 0; c < u.dim_; ++c) u.coords_(c * block_size(N)) = value(c);
  return u;
}

FourierLoop FourierLoop::from_modes(const std::vector<std::vector<std::complex<double>>>& modes, double tol) {
  if (modes.empty()) throw DimensionMismatch("no components");
  const auto width = modes.front().size();
  if (width % 2 == 0) throw DimensionMismatch("mode list must have odd length 2N+1");
  const int N = static_cast<int>(width / 2);
  FourierLoop u(static_cast<int>(modes.size()), N);

  double scale = 0.0;
  for (const auto& comp : modes) {
    if (comp.size() != width) throw DimensionMismatch("components disagree in truncation order");
    for (const auto& z : comp) {
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) throw InvalidLoop("non-finite coefficient");
      scale = std::max(scale, std::abs(z));
    }
  }
  for (int c = 0; c < u.dim(); ++c) {
    const auto& comp = modes[c];
    for (int k = 0; k <= N; ++k) {
      const auto plus = comp[N + k];
      const auto minus = comp[N - k];
      if (std::abs(plus - std::conj(minus)) > tol * std::max(scale, 1.0)) {
        std::ostringstream os;
        os << "reality violated at component " << c << ", mode " << k;
        throw InvalidLoop(os.str());
      }
      u.set_mode(c, k, 0.5 * (plus + std::conj(minus)));
    }
  }
  return u;
}

std::complex<double> FourierLoop::mode(int c, int k) const {
  if (c < 0 || c >= dim_ || std::abs(k) > N_) throw DimensionMismatch("mode index out of range");
  const Eigen::Index base = static_cast<Eigen::Index>(c) * block_size(N_);
  if (k == 0) return {coords_(base), 0.0};
  const int a = std::abs(k);
  const std::complex<double> z(coords_(base + 2 * a - 1) / kSqrt2, -coords_(base + 2 * a) / kSqrt2);
  return k > 0 ? z : std::conj(z);
}

void FourierLoop::set_mode(int c, int k, std::complex<double> value) {
  if (c < 0 || c >= dim_ || std::abs(k) > N_) throw DimensionMismatch("mode index out of range");
  const Eigen::Index base = static_cast<Eigen::Index>(c) * block_size(N_);
  if (k == 0) {
    coords_(base) = value.real();
    return;
  }
  if (k < 0) value = std::conj(value);
  const int a = std::abs(k);
  coords_(base + 2 * a - 1) = kSqrt2 * value.real();
  coords_(base + 2 * a) = -kSqrt2 * value.imag();
}

FourierLoop FourierLoop::resized(int N) const {
  FourierLoop out(dim_, N);
  const int keep = block_size(std::min(N, N_));
  for (int c = 0; c < dim_; ++c)
    out.coords_.segment(c * block_size(N), keep) = coords_.segment(c * block_size(N_), keep);
  return out;
}

Eigen::VectorXd FourierLoop::evaluate(double t) const {
  Eigen::VectorXd x = Eigen::VectorXd::Zero(dim_);
  for (int j = 0; j < block_size(N_); ++j) {
    const double b = basis_value(j, t);
    for (int c = 0; c < dim_; ++c) x(c) += b * coords_(c * block_size(N_) + j);
  }
  return x;
}

FourierLoop FourierLoop::derivative() const {
  FourierLoop d(dim_, N_);
  for (int c = 0; c < dim_; ++c) {
    const Eigen::Index base = static_cast<Eigen::Index>(c) * block_size(N_);
    for (int k = 1; k <= N_; ++k) {
      const double w = kTwoPi * k;
      d.coords_(base + 2 * k - 1) = w * coords_(base + 2 * k);
      d.coords_(base + 2 * k) = -w * coords_(base + 2 * k - 1);
    }
  }
  return d;
}

FourierLoop& FourierLoop::operator+=(const FourierLoop& o) {
  require_same_shape(*this, o);
  coords_ += o.coords_;
  return *this;
}

FourierLoop& FourierLoop::operator-=(const FourierLoop& o) {
  require_same_shape(*this, o);
  coords_ -= o.coords_;
  return *this;
}

FourierLoop& FourierLoop::operator*=(double a) {
  coords_ *= a;
  return *this;
}

void require_same_shape(const FourierLoop& u, const FourierLoop& v) {
  if (u.dim() != v.dim() || u.order() != v.order()) {
    std::ostringstream os;
    os << "shape mismatch: (n=" << u.dim() << ", N=" << u.order() << ") vs (n=" << v.dim()
       << ", N=" << v.order() << ")";
    throw DimensionMismatch(os.str());
  }
}

// ============================================================================
// Norms and pairings
// ============================================================================

Eigen::VectorXd level_weights(int dim, int N, Level s) {
  Eigen::VectorXd block(block_size(N));
  for (int j = 0; j < block.size(); ++j) block(j) = mode_weight(mode_of(j), s);
  return block.replicate(dim, 1);
}

double sobolev_norm(const FourierLoop& u, Level s) {
  const Eigen::VectorXd w = level_weights(u.dim(), u.order(), s);
  return std::sqrt((w.array() * u.coords().array().square()).sum());
}

double inner(const FourierLoop& u, const FourierLoop& v, Level s) {
  require_same_shape(u, v);
  const Eigen::VectorXd w = level_weights(u.dim(), u.order(), s);
  return (w.array() * u.coords().array() * v.coords().array()).sum();
}

double dual_pair(const DualFunctional& f, const FourierLoop& h) {
  require_same_shape(f.representative(), h);
  return f.representative().coords().dot(h.coords());
}

DualFunctional flat(const FourierLoop& v) { return DualFunctional(v); }

double dual_norm(const DualFunctional& f) { return sobolev_norm(f.representative(), Level(-1.0)); }

double functional_norm(const DualFunctional& f, Level a) {
  const auto& r = f.representative();
  const Eigen::VectorXd w = level_weights(r.dim(), r.order(), a);
  return std::sqrt((r.coords().array().square() / w.array()).sum());
}

// ============================================================================
// Grids
// ============================================================================

GridBridge::GridBridge(int N, int M) : N_(N), M_(M) {
  if (2 * M < 3 * N || M <= N) {
    std::ostringstream os;
    os << "grid of 2M=" << 2 * M << " points aliases products at truncation N=" << N << " (need M >= 3N/2)";
    throw AliasingError(os.str());
  }
  eval_ = evaluation_matrix(N, points());
}

Eigen::MatrixXd GridBridge::samples(const FourierLoop& u) const {
  if (u.order() != N_) throw DimensionMismatch("grid bridge built for a different truncation order");
  const Eigen::Map<const Eigen::MatrixXd> C(u.coords().data(), block_size(N_), u.dim());
  return eval_ * C;
}

FourierLoop GridBridge::coefficients(const Eigen::MatrixXd& samples) const {
  if (samples.rows() != points()) throw DimensionMismatch("sample count does not match the grid");
  const Eigen::MatrixXd C = eval_.transpose() * samples / static_cast<double>(points());
  return FourierLoop(static_cast<int>(samples.cols()), N_, Eigen::Map<const Eigen::VectorXd>(C.data(), C.size()));
}

const Collocation& collocation(int N) {
  static std::mutex mu;
  static std::map<int, std::unique_ptr<Collocation>> cache;
  std::lock_guard lock(mu);
  auto& slot = cache[N];
  if (!slot) {
    auto c = std::make_unique<Collocation>();
    c->N = N;
    c->L = block_size(N);
    c->eval = evaluation_matrix(N, c->L);
    slot = std::move(c);
  }
  return *slot;
}

Eigen::MatrixXd nodal_values(const FourierLoop& u) {
  const auto& col = collocation(u.order());
  const Eigen::Map<const Eigen::MatrixXd> C(u.coords().data(), block_size(u.order()), u.dim());
  return col.eval * C;
}

FourierLoop interpolate(const Eigen::MatrixXd& nodal, int N) {
  const auto& col = collocation(N);
  if (nodal.rows() != col.L) throw DimensionMismatch("nodal data does not match the collocation grid");
  const Eigen::MatrixXd C = col.eval.transpose() * nodal / static_cast<double>(col.L);
  return FourierLoop(static_cast<int>(nodal.cols()), N, Eigen::Map<const Eigen::VectorXd>(C.data(), C.size()));
}

// ============================================================================
// Sampling
// ============================================================================

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a + 0x9E3779B97F4A7C15ULL * (b + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

FourierLoop random_loop(std::uint64_t seed, int dim, int N, double decay, double amplitude) {
  FourierLoop u(dim, N);
  for (int c = 0; c < dim; ++c) {
    for (int j = 0; j < block_size(N); ++j) {
      std::mt19937_64 gen(mix_seed(mix_seed(seed, static_cast<std::uint64_t>(c)), static_cast<std::uint64_t>(j)));
      std::normal_distribution<double> normal(0.0, 1.0);
      u.coords()(c * block_size(N) + j) = amplitude * normal(gen) / std::pow(1.0 + mode_of(j), decay);
    }
  }
  return u;
}

FourierLoop random_direction(std::uint64_t seed, int dim, int N, Level normalize_at, double decay) {
  FourierLoop u = random_loop(seed, dim, N, decay);
  const double n = sobolev_norm(u, normalize_at);
  return n > 0 ? (1.0 / n) * u : u;
}

// ============================================================================
// Serialization
// ============================================================================

nlohmann::json to_json(const FourierLoop& u) {
  nlohmann::json coeffs = nlohmann::json::array();
  for (int c = 0; c < u.dim(); ++c) {
    nlohmann::json comp = nlohmann::json::array();
    for (int k = -u.order(); k <= u.order(); ++k) {
      const auto z = u.mode(c, k);
      comp.push_back({z.real(), z.imag()});
    }
    coeffs.push_back(std::move(comp));
  }
  return {{"n", u.dim()}, {"N", u.order()}, {"coeffs", std::move(coeffs)}};
}

FourierLoop loop_from_json(const nlohmann::json& j) {
  const int n = j.at("n").get<int>();
  const int N = j.at("N").get<int>();
  const auto& coeffs = j.at("coeffs");
  if (static_cast<int>(coeffs.size()) != n) throw DimensionMismatch("coeffs must list one array per component");
  std::vector<std::vector<std::complex<double>>> modes(n);
  for (int c = 0; c < n; ++c) {
    const auto& comp = coeffs.at(c);
    if (static_cast<int>(comp.size()) != block_size(N)) throw DimensionMismatch("component must list 2N+1 modes");
    for (const auto& z : comp) modes[c].emplace_back(z.at(0).get<double>(), z.at(1).get<double>());
  }
  return FourierLoop::from_modes(modes);
}

}  // namespace floerlab
