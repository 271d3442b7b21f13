#include "floerlab/level_operator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>

#include "floerlab/errors.hpp"

namespace floerlab {

// ============================================================================
// LevelOperator
// ============================================================================

LevelOperator::LevelOperator(Eigen::MatrixXd m, Level d, Level c, int n, int order)
    : matrix(std::move(m)), dom(d), cod(c), dim(n), N(order) {
  const Eigen::Index size = static_cast<Eigen::Index>(n) * block_size(order);
  if (matrix.rows() != size || matrix.cols() != size)
    throw DimensionMismatch("operator matrix does not match the coordinate space");
  if (!matrix.allFinite()) throw InvalidLoop("non-finite operator entry");
}

FourierLoop LevelOperator::apply(const FourierLoop& u) const {
  if (u.dim() != dim || u.order() != N) throw DimensionMismatch("operator applied to a loop of another shape");
  return FourierLoop(dim, N, matrix * u.coords());
}

LevelOperator identity_operator(int dim, int N, Level level) {
  const Eigen::Index size = static_cast<Eigen::Index>(dim) * block_size(N);
  return LevelOperator(Eigen::MatrixXd::Identity(size, size), level, level, dim, N);
}

LevelOperator derivative_operator(int dim, int N) {
  const int b = block_size(N);
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(dim * b, dim * b);
  for (int c = 0; c < dim; ++c) {
    const int base = c * b;
    for (int k = 1; k <= N; ++k) {
      const double w = 2.0 * std::numbers::pi * k;
      D(base + 2 * k - 1, base + 2 * k) = w;
      D(base + 2 * k, base + 2 * k - 1) = -w;
    }
  }
  return LevelOperator(std::move(D), Level(1.0), Level(0.0), dim, N);
}

LevelOperator constant_matrix_operator(const Eigen::MatrixXd& M, int N, Level level) {
  if (M.rows() != M.cols()) throw DimensionMismatch("constant matrix must be square");
  const int n = static_cast<int>(M.rows());
  const int b = block_size(N);
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(n * b, n * b);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (M(i, j) != 0.0) T.block(i * b, j * b, b, b).diagonal().setConstant(M(i, j));
  return LevelOperator(std::move(T), level, level, n, N);
}

namespace {

// Block (1/L) E^T diag(g) E in closed form. With C(m), S(m) the discrete cosine and
// sine averages of g at frequency m, products of basis functions reduce to
//   c_j c_k -> C(j-k) + C(j+k),  s_j s_k -> C(j-k) - C(j+k),
//   c_j s_k -> S(j+k) - S(j-k),  s_j c_k -> S(j+k) + S(j-k).
Eigen::MatrixXd collocation_block(const Eigen::Ref<const Eigen::VectorXd>& g, int N) {
  const int L = block_size(N);
  std::vector<double> cos_table(L), sin_table(L);
  for (int r = 0; r < L; ++r) {
    cos_table[r] = std::cos(2.0 * std::numbers::pi * r / L);
    sin_table[r] = std::sin(2.0 * std::numbers::pi * r / L);
  }
  // Frequencies 0..2N suffice: C is even and S odd in m.
  std::vector<double> C(2 * N + 1, 0.0), S(2 * N + 1, 0.0);
  for (int m = 0; m <= 2 * N; ++m) {
    double c = 0.0, s = 0.0;
    for (int l = 0; l < L; ++l) {
      const int r = static_cast<int>((static_cast<long long>(m) * l) % L);
      c += g(l) * cos_table[r];
      s += g(l) * sin_table[r];
    }
    C[m] = c / L;
    S[m] = s / L;
  }
  auto Cm = [&](int m) { return C[std::abs(m)]; };
  auto Sm = [&](int m) { return m >= 0 ? S[m] : -S[-m]; };

  const double r2 = std::sqrt(2.0);
  Eigen::MatrixXd B(L, L);
  B(0, 0) = C[0];
  for (int k = 1; k <= N; ++k) {
    B(0, 2 * k - 1) = B(2 * k - 1, 0) = r2 * C[k];
    B(0, 2 * k) = B(2 * k, 0) = r2 * S[k];
  }
  for (int j = 1; j <= N; ++j)
    for (int k = 1; k <= N; ++k) {
      B(2 * j - 1, 2 * k - 1) = Cm(j - k) + Cm(j + k);
      B(2 * j, 2 * k) = Cm(j - k) - Cm(j + k);
      B(2 * j - 1, 2 * k) = Sm(j + k) - Sm(j - k);
      B(2 * j, 2 * k - 1) = Sm(j + k) + Sm(j - k);
    }
  return B;
}

}  // namespace

LevelOperator multiplication_operator(const Eigen::MatrixXd& field, int dim, int N, Level dom, Level cod) {
  const int L = block_size(N);
  if (field.rows() != L || field.cols() != dim * dim)
    throw DimensionMismatch("multiplication field must have L rows and n*n columns");
  const int b = block_size(N);
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(dim * b, dim * b);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) {
      const auto g = field.col(i * dim + j);
      if (g.isZero(0.0)) continue;
      T.block(i * b, j * b, b, b) = collocation_block(g, N);
    }
  return LevelOperator(std::move(T), dom, cod, dim, N);
}

LevelOperator scalar_multiplication_operator(const Eigen::VectorXd& field, int N, Level dom, Level cod) {
  return multiplication_operator(Eigen::MatrixXd(field), 1, N, dom, cod);
}

LevelOperator compose(const LevelOperator& S, const LevelOperator& T) {
  if (S.dim != T.dim || S.N != T.N) throw DimensionMismatch("cannot compose operators on different spaces");
  return LevelOperator(S.matrix * T.matrix, T.dom, S.cod, T.dim, T.N);
}

LevelOperator operator+(const LevelOperator& a, const LevelOperator& b) {
  if (a.dim != b.dim || a.N != b.N) throw DimensionMismatch("cannot add operators on different spaces");
  return LevelOperator(a.matrix + b.matrix, a.dom, a.cod, a.dim, a.N);
}

Eigen::MatrixXd weighted_matrix(const LevelOperator& T, Level a, Level b) {
  const Eigen::VectorXd wa = level_weights(T.dim, T.N, a).cwiseSqrt().cwiseInverse();
  const Eigen::VectorXd wb = level_weights(T.dim, T.N, b).cwiseSqrt();
  return wb.asDiagonal() * T.matrix * wa.asDiagonal();
}

namespace {

// Largest eigenvalue of S^T S by Lanczos with full reorthogonalization. Stops once the
// Ritz residual bounds the eigenvalue error by rel_tol; nullopt if that never happens.
std::optional<double> lanczos_top(const Eigen::MatrixXd& S, double rel_tol = 1e-13, int max_steps = 240) {
  const Eigen::Index n = S.cols();
  const int steps = static_cast<int>(std::min<Eigen::Index>(n, max_steps));
  Eigen::MatrixXd Q(n, steps);
  Eigen::VectorXd v(n);
  for (Eigen::Index j = 0; j < n; ++j)
    v(j) = 0.5 + static_cast<double>(mix_seed(0x1a2c205, static_cast<std::uint64_t>(j)) >> 11) * 0x1.0p-53;
  v.normalize();
  std::vector<double> alpha, beta;
  for (int k = 0; k < steps; ++k) {
    Q.col(k) = v;
    Eigen::VectorXd w = S.transpose() * (S * v);
    alpha.push_back(v.dot(w));
    for (int pass = 0; pass < 2; ++pass) w -= Q.leftCols(k + 1) * (Q.leftCols(k + 1).transpose() * w);
    const double b = w.norm();
    // The Ritz value is only inspected every few steps.
    if (b > 0.0 && k % 8 != 7 && k + 1 < steps) {
      beta.push_back(b);
      v = w / b;
      continue;
    }
    Eigen::MatrixXd Tk = Eigen::MatrixXd::Zero(k + 1, k + 1);
    for (int i = 0; i <= k; ++i) {
      Tk(i, i) = alpha[static_cast<std::size_t>(i)];
      if (i < k) Tk(i, i + 1) = Tk(i + 1, i) = beta[static_cast<std::size_t>(i)];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(Tk);
    const double theta = eig.eigenvalues()(k);
    const double residual = b * std::abs(eig.eigenvectors()(k, k));
    if (residual <= rel_tol * std::abs(theta) || b <= rel_tol * std::abs(theta)) return theta;
    beta.push_back(b);
    v = w / b;
  }
  return std::nullopt;
}

}  // namespace

double op_norm(const LevelOperator& T, Level a, Level b) {
  const Eigen::MatrixXd S = weighted_matrix(T, a, b);
  if (S.isZero(0.0)) return 0.0;
  if (S.cols() <= 400) {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(S);
    return svd.singularValues()(0);
  }
  // Large blocks: only the top eigenvalue of S^T S is needed.
  if (const auto top = lanczos_top(S)) return std::sqrt(std::max(0.0, *top));
  const Eigen::MatrixXd G = S.transpose() * S;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(G, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, eig.eigenvalues().maxCoeff()));
}

Eigen::VectorXd weighted_singular_values(const LevelOperator& T, Level a, Level b) {
  Eigen::BDCSVD<Eigen::MatrixXd> svd(weighted_matrix(T, a, b));
  return svd.singularValues();
}

LevelOperator adjoint(const LevelOperator& T, Level s) {
  const Eigen::VectorXd w = level_weights(T.dim, T.N, s);
  Eigen::MatrixXd A = w.cwiseInverse().asDiagonal() * T.matrix.transpose() * w.asDiagonal();
  return LevelOperator(std::move(A), T.cod, T.dom, T.dim, T.N);
}

// ============================================================================
// Sweeps
// ============================================================================

const std::vector<int>& default_sweep() {
  static const std::vector<int> sweep{16, 32, 64, 128, 256};
  return sweep;
}

namespace {

std::vector<double> stabilization_window(const Sweep& sweep, int from_N) {
  std::vector<double> tail;
  for (const auto& p : sweep)
    if (p.N >= from_N) tail.push_back(p.value);
  if (tail.size() < 2) {
    tail.clear();
    for (std::size_t i = sweep.size() >= 2 ? sweep.size() - 2 : 0; i < sweep.size(); ++i)
      tail.push_back(sweep[i].value);
  }
  return tail;
}

}  // namespace

double stabilization_spread(const Sweep& sweep, int from_N) {
  if (sweep.empty()) return std::numeric_limits<double>::infinity();
  const auto tail = stabilization_window(sweep, from_N);
  const double last = tail.back();
  double spread = 0.0;
  for (double v : tail) {
    if (!std::isfinite(v)) return std::numeric_limits<double>::infinity();
    const double diff = std::abs(v - last);
    if (last == 0.0) {
      if (diff > 0.0) return std::numeric_limits<double>::infinity();
      continue;
    }
    spread = std::max(spread, diff / std::abs(last));
  }
  return spread;
}

bool stabilizes(const Sweep& sweep, double rel_tol, int from_N) {
  return stabilization_spread(sweep, from_N) <= rel_tol;
}

nlohmann::json to_json(const Sweep& sweep, const char* key) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& p : sweep) out.push_back({{"N", p.N}, {key, p.value}});
  return out;
}

// ============================================================================
// Interpolation, extensions, compactness
// ============================================================================

InterpolationReport check_interpolation(const LevelOperator& T, double s, double slack) {
  if (s < 0.0 || s > 1.0) throw LevelError("interpolation parameter must lie in [0,1]");
  InterpolationReport r;
  r.s = s;
  r.norm0 = op_norm(T, Level(0.0), Level(0.0));
  r.norm1 = op_norm(T, Level(1.0), Level(1.0));
  r.norm_s = op_norm(T, Level(s), Level(s));
  r.bound = std::pow(r.norm0, 1.0 - s) * std::pow(r.norm1, s);
  r.holds = r.norm_s <= r.bound + slack;
  return r;
}

ExtensionReport extension_consistency(const LevelOperator& T, const std::vector<Level>& levels) {
  ExtensionReport rep;
  const FourierLoop probe = random_loop(0x5eed, T.dim, T.N, 1.0);
  rep.same_matrix = true;
  for (Level l : levels) {
    const LevelOperator arrow = T.with_levels(l, l);
    rep.same_matrix = rep.same_matrix && (arrow.apply(probe).coords() == T.apply(probe).coords());
    const double n = op_norm(T, l, l);
    rep.levels.push_back({l, {{T.N, n}}, std::isfinite(n)});
  }
  return rep;
}

ExtensionReport extension_consistency(const OperatorFamily& family, const std::vector<Level>& levels,
                                      const std::vector<int>& sweep, double rel_tol) {
  ExtensionReport rep;
  rep.same_matrix = true;
  for (Level l : levels) rep.levels.push_back({l, {}, false});
  for (int N : sweep) {
    const LevelOperator T = family(N);
    const auto single = extension_consistency(T, levels);
    rep.same_matrix = rep.same_matrix && single.same_matrix;
    for (std::size_t i = 0; i < levels.size(); ++i) rep.levels[i].sweep.push_back(single.levels[i].sweep.front());
  }
  for (auto& e : rep.levels) e.bounded = stabilizes(e.sweep, rel_tol);
  return rep;
}

Eigen::VectorXd compactness_profile(const LevelOperator& T, Level a, Level b) {
  return weighted_singular_values(T, a, b);
}

// ============================================================================
// Fredholm diagnostics
// ============================================================================

FredholmReport fredholm_diagnostic(const OperatorFamily& family, Level a, Level b, const std::vector<int>& sweep,
                                   const FredholmOptions& opts) {
  FredholmReport rep;
  rep.a = a;
  rep.b = b;
  int dim = -1;
  Sweep gaps;
  bool gaps_above_threshold = true;
  for (int N : sweep) {
    const LevelOperator T = family(N);
    if (T.N != N) throw DimensionMismatch("operator family returned the wrong truncation order");
    if (dim < 0) dim = T.dim;
    if (T.dim != dim) throw DimensionMismatch("operator family changes ambient dimension across the sweep");

    const Eigen::VectorXd sigma = weighted_singular_values(T, a, b);
    FredholmEntry e;
    e.N = N;
    e.sigma_max = sigma.size() ? sigma(0) : 0.0;
    e.sigma_min = sigma.size() ? sigma(sigma.size() - 1) : 0.0;
    const double thr = opts.kernel_threshold * e.sigma_max;
    const auto rank = static_cast<int>((sigma.array() > thr).count());
    e.ker_dim = static_cast<int>(T.matrix.cols()) - rank;
    e.coker_dim = static_cast<int>(T.matrix.rows()) - rank;
    e.gap = rank > 0 ? sigma(rank - 1) : 0.0;
    gaps_above_threshold = gaps_above_threshold && rank > 0 && e.gap > thr;
    gaps.push_back({N, e.gap});
    rep.sweep.push_back(e);
  }
  rep.index_zero = !rep.sweep.empty();
  for (const auto& e : rep.sweep) rep.index_zero = rep.index_zero && (e.ker_dim == e.coker_dim);
  if (!rep.sweep.empty()) rep.index_estimate = rep.sweep.back().ker_dim - rep.sweep.back().coker_dim;
  rep.gap_spread = stabilization_spread(gaps, opts.stable_from);
  rep.gap_stable = gaps_above_threshold && rep.gap_spread <= opts.gap_tolerance;
  if (rep.sweep.size() >= 2 && rep.sweep.back().sigma_min > 0.0)
    rep.sigma_min_decay = rep.sweep.front().sigma_min / rep.sweep.back().sigma_min;
  else if (rep.sweep.size() >= 2)
    rep.sigma_min_decay = std::numeric_limits<double>::infinity();
  rep.verdict = (rep.index_zero && rep.gap_stable) ? "fredholm-index-0" : "not-fredholm";
  return rep;
}

nlohmann::json to_json(const FredholmReport& r) {
  nlohmann::json sweep = nlohmann::json::array();
  for (const auto& e : r.sweep)
    sweep.push_back({{"N", e.N},
                     {"sigma_min", e.sigma_min},
                     {"gap", e.gap},
                     {"ker_dim", e.ker_dim},
                     {"coker_dim", e.coker_dim}});
  return {{"a", r.a.value()},
          {"b", r.b.value()},
          {"sweep", std::move(sweep)},
          {"index_estimate", r.index_estimate},
          {"gap_spread", r.gap_spread},
          {"sigma_min_decay", r.sigma_min_decay},
          {"verdict", r.verdict}};
}

// ============================================================================
// BilinearLevelMap
// ============================================================================

BilinearLevelMap::BilinearLevelMap(int dim, int N, Eigen::MatrixXd tensors, Level first, Level second, Level cod)
    : dim_(dim), N_(N), tensors_(std::move(tensors)), first_(first), second_(second), cod_(cod) {
  if (tensors_.rows() != block_size(N) || tensors_.cols() != dim * dim * dim)
    throw DimensionMismatch("bilinear tensor field must have L rows and n^3 columns");
}

BilinearLevelMap BilinearLevelMap::with_levels(Level first, Level second, Level cod) const {
  return BilinearLevelMap(dim_, N_, tensors_, first, second, cod);
}

namespace {

Eigen::MatrixXd to_nodal(const Eigen::VectorXd& coords, int dim, int N) {
  const Eigen::Map<const Eigen::MatrixXd> C(coords.data(), block_size(N), dim);
  return collocation(N).eval * C;
}

Eigen::VectorXd from_nodal(const Eigen::MatrixXd& nodal, int N) {
  const auto& col = collocation(N);
  const Eigen::MatrixXd C = col.eval.transpose() * nodal / static_cast<double>(col.L);
  return Eigen::Map<const Eigen::VectorXd>(C.data(), C.size());
}

// out(l, i) = sum_jk T(l, ijk) X(l, j) Y(l, k)
Eigen::MatrixXd contract_out(const Eigen::MatrixXd& T, const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y, int n) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(T.rows(), n);
  for (Eigen::Index l = 0; l < T.rows(); ++l)
    for (int i = 0; i < n; ++i) {
      double acc = 0.0;
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) acc += T(l, (i * n + j) * n + k) * X(l, j) * Y(l, k);
      out(l, i) = acc;
    }
  return out;
}

// g(l, k) = sum_ij A(l, i) T(l, ijk) X(l, j)
Eigen::MatrixXd contract_second(const Eigen::MatrixXd& T, const Eigen::MatrixXd& A, const Eigen::MatrixXd& X, int n) {
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(T.rows(), n);
  for (Eigen::Index l = 0; l < T.rows(); ++l)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) g(l, k) += A(l, i) * T(l, (i * n + j) * n + k) * X(l, j);
  return g;
}

// g(l, j) = sum_ik A(l, i) T(l, ijk) Y(l, k)
Eigen::MatrixXd contract_first(const Eigen::MatrixXd& T, const Eigen::MatrixXd& A, const Eigen::MatrixXd& Y, int n) {
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(T.rows(), n);
  for (Eigen::Index l = 0; l < T.rows(); ++l)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) g(l, j) += A(l, i) * T(l, (i * n + j) * n + k) * Y(l, k);
  return g;
}

struct NodalOptimum {
  double value = 0.0;
  Eigen::VectorXd x, y;
};

// sup_{|x|=|y|=1} |T(x, y)| for a single n x n x n tensor by multi-start alternation.
NodalOptimum nodal_optimum(const Eigen::MatrixXd& T, Eigen::Index l, int n) {
  auto eval = [&](const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
    Eigen::VectorXd z = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) z(i) += T(l, (i * n + j) * n + k) * x(j) * y(k);
    return z;
  };
  std::vector<Eigen::VectorXd> seeds;
  for (int p = 0; p < n; ++p) seeds.push_back(Eigen::VectorXd::Unit(n, p));
  for (int p = 0; p < n; ++p)
    for (int q = p + 1; q < n; ++q) {
      seeds.push_back((Eigen::VectorXd::Unit(n, p) + Eigen::VectorXd::Unit(n, q)).normalized());
      seeds.push_back((Eigen::VectorXd::Unit(n, p) - Eigen::VectorXd::Unit(n, q)).normalized());
    }
  NodalOptimum best;
  best.x = Eigen::VectorXd::Unit(n, 0);
  best.y = Eigen::VectorXd::Unit(n, 0);
  for (const auto& sx : seeds)
    for (const auto& sy : seeds) {
      Eigen::VectorXd x = sx, y = sy;
      double val = eval(x, y).norm();
      if (val == 0.0) continue;
      for (int it = 0; it < 200; ++it) {
        const Eigen::VectorXd z = eval(x, y).normalized();
        Eigen::VectorXd gx = Eigen::VectorXd::Zero(n), gy = Eigen::VectorXd::Zero(n);
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) gx(j) += z(i) * T(l, (i * n + j) * n + k) * y(k);
        if (gx.norm() == 0.0) break;
        x = gx.normalized();
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) gy(k) += z(i) * T(l, (i * n + j) * n + k) * x(j);
        if (gy.norm() == 0.0) break;
        y = gy.normalized();
        const double next = eval(x, y).norm();
        const bool done = next <= val * (1.0 + 1e-14);
        val = std::max(val, next);
        if (done) break;
      }
      if (val > best.value) best = {val, x, y};
    }
  return best;
}

}  // namespace

FourierLoop BilinearLevelMap::operator()(const FourierLoop& xi, const FourierLoop& eta) const {
  if (xi.dim() != dim_ || eta.dim() != dim_ || xi.order() != N_ || eta.order() != N_)
    throw DimensionMismatch("bilinear map applied to loops of another shape");
  const Eigen::MatrixXd out =
      contract_out(tensors_, to_nodal(xi.coords(), dim_, N_), to_nodal(eta.coords(), dim_, N_), dim_);
  return FourierLoop(dim_, N_, from_nodal(out, N_));
}

LevelOperator BilinearLevelMap::partial(const FourierLoop& xi) const {
  if (xi.dim() != dim_ || xi.order() != N_) throw DimensionMismatch("bilinear map applied to a loop of another shape");
  const Eigen::MatrixXd X = to_nodal(xi.coords(), dim_, N_);
  Eigen::MatrixXd field = Eigen::MatrixXd::Zero(tensors_.rows(), dim_ * dim_);
  for (Eigen::Index l = 0; l < tensors_.rows(); ++l)
    for (int i = 0; i < dim_; ++i)
      for (int k = 0; k < dim_; ++k) {
        double acc = 0.0;
        for (int j = 0; j < dim_; ++j) acc += tensors_(l, (i * dim_ + j) * dim_ + k) * X(l, j);
        field(l, i * dim_ + k) = acc;
      }
  return multiplication_operator(field, dim_, N_, second_, cod_);
}

Eigen::MatrixXd BilinearLevelMap::form_against(const FourierLoop& a) const {
  if (a.dim() != dim_ || a.order() != N_) throw DimensionMismatch("form evaluated against a loop of another shape");
  const Eigen::MatrixXd A = to_nodal(a.coords(), dim_, N_);
  // S(l)_{jk} = sum_i a_i(t_l) T_l[i][j][k]; the form is the collocation multiplication by S.
  Eigen::MatrixXd field = Eigen::MatrixXd::Zero(tensors_.rows(), dim_ * dim_);
  for (Eigen::Index l = 0; l < tensors_.rows(); ++l)
    for (int j = 0; j < dim_; ++j)
      for (int k = 0; k < dim_; ++k) {
        double acc = 0.0;
        for (int i = 0; i < dim_; ++i) acc += A(l, i) * tensors_(l, (i * dim_ + j) * dim_ + k);
        field(l, j * dim_ + k) = acc;
      }
  return multiplication_operator(field, dim_, N_, Level(0.0), Level(0.0)).matrix;
}

double BilinearLevelMap::nodal_norm(int node) const { return nodal_optimum(tensors_, node, dim_).value; }

BilinearLevelMap BilinearLevelMap::operator-(const BilinearLevelMap& o) const {
  if (o.dim_ != dim_ || o.N_ != N_) throw DimensionMismatch("cannot subtract bilinear maps on different spaces");
  return BilinearLevelMap(dim_, N_, tensors_ - o.tensors_, first_, second_, cod_);
}

BilinearLevelMap BilinearLevelMap::scaled(double a) const {
  return BilinearLevelMap(dim_, N_, a * tensors_, first_, second_, cod_);
}

double point_evaluation_norm(int N, Level s) {
  double sum = 1.0;
  for (int k = 1; k <= N; ++k) sum += 2.0 / mode_weight(k, s);
  return std::sqrt(sum);
}

double collocation_l2_bilinear_norm(const BilinearLevelMap& B, Level s) {
  double worst = 0.0;
  for (int l = 0; l < block_size(B.order()); ++l) worst = std::max(worst, B.nodal_norm(l));
  return worst * point_evaluation_norm(B.order(), s);
}

double bilinear_norm_estimate(const BilinearLevelMap& B, Level a, Level b, Level c, const AlternatingOptions& opts) {
  const int n = B.dim();
  const int N = B.order();
  const auto& col = collocation(N);
  const Eigen::MatrixXd& T = B.tensors();
  if (T.isZero(0.0)) return 0.0;

  const Eigen::VectorXd wa = level_weights(n, N, a);
  const Eigen::VectorXd wb = level_weights(n, N, b);
  const Eigen::VectorXd wc = level_weights(n, N, c);

  auto norm_in = [](const Eigen::VectorXd& v, const Eigen::VectorXd& w) {
    return std::sqrt((w.array() * v.array().square()).sum());
  };
  // Unit-ball maximizer of g . v under v^T W v = 1.
  auto argmax = [](const Eigen::VectorXd& g, const Eigen::VectorXd& w) -> Eigen::VectorXd {
    Eigen::VectorXd v = (g.array() / w.array()).matrix();
    const double s = std::sqrt(g.dot(v));
    return s > 0 ? Eigen::VectorXd(v / s) : v;
  };
  // Riesz representer of evaluation at node l in direction d, normalized in the weight w.
  auto peaked = [&](int l, const Eigen::VectorXd& d, const Eigen::VectorXd& w) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(n * block_size(N));
    for (int comp = 0; comp < n; ++comp)
      for (int j = 0; j < block_size(N); ++j)
        v(comp * block_size(N) + j) = d(comp) * col.eval(l, j) / w(comp * block_size(N) + j);
    return Eigen::VectorXd(v / norm_in(v, w));
  };
  auto constant = [&](const Eigen::VectorXd& d) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(n * block_size(N));
    for (int comp = 0; comp < n; ++comp) v(comp * block_size(N)) = d(comp);
    return Eigen::VectorXd(v / d.norm());
  };

  auto run = [&](Eigen::VectorXd xi, Eigen::VectorXd eta) {
    Eigen::MatrixXd X = to_nodal(xi, n, N), Y = to_nodal(eta, n, N);
    Eigen::VectorXd out = from_nodal(contract_out(T, X, Y, n), N);
    double val = norm_in(out, wc);
    for (int it = 0; it < opts.iterations && val > 0.0; ++it) {
      const double before = val;
      // eta step
      Eigen::MatrixXd A = to_nodal((wc.array() * out.array()).matrix() / val, n, N);
      eta = argmax(from_nodal(contract_second(T, A, X, n), N), wb);
      Y = to_nodal(eta, n, N);
      out = from_nodal(contract_out(T, X, Y, n), N);
      val = norm_in(out, wc);
      if (val == 0.0) break;
      // xi step
      A = to_nodal((wc.array() * out.array()).matrix() / val, n, N);
      xi = argmax(from_nodal(contract_first(T, A, Y, n), N), wa);
      X = to_nodal(xi, n, N);
      out = from_nodal(contract_out(T, X, Y, n), N);
      val = norm_in(out, wc);
      if (val <= before * (1.0 + opts.rel_tol)) break;
    }
    return val;
  };

  auto top_nodes = [&](std::vector<std::pair<double, int>> ranked) {
    std::sort(ranked.begin(), ranked.end(), [](const auto& p, const auto& q) {
      return p.first != q.first ? p.first > q.first : p.second < q.second;
    });
    std::vector<int> nodes;
    for (int r = 0; r < std::min<int>(opts.starts, static_cast<int>(ranked.size())); ++r)
      nodes.push_back(ranked[r].second);
    return nodes;
  };
  // Seeds: nodes where the tensor field is largest and nodes where it jumps most.
  std::vector<std::pair<double, int>> by_size, by_jump;
  for (int l = 0; l < col.L; ++l) {
    by_size.emplace_back(T.row(l).norm(), l);
    by_jump.emplace_back((T.row((l + 1) % col.L) - T.row(l)).norm(), l);
  }
  std::vector<int> nodes = top_nodes(by_size);
  for (int l : top_nodes(by_jump))
    if (std::find(nodes.begin(), nodes.end(), l) == nodes.end()) nodes.push_back(l);

  double best = 0.0;
  for (int l : nodes) {
    const NodalOptimum dir = nodal_optimum(T, l, n);
    if (dir.value == 0.0) continue;
    best = std::max(best, run(peaked(l, dir.x, wa), peaked(l, dir.y, wb)));
    best = std::max(best, run(constant(dir.x), peaked(l, dir.y, wb)));
    best = std::max(best, run(peaked(l, dir.x, wa), constant(dir.y)));
  }
  return best;
}

}  // namespace floerlab
