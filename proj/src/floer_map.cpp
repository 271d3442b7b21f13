#include "floerlab/floer_map.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <sstream>

#include "floerlab/errors.hpp"

namespace floerlab {

// ============================================================================
// DiffeoChart
// ============================================================================

DiffeoChart::DiffeoChart(std::string name, int dim, ValueFn value, JetFn jet, DomainFn domain)
    : name_(std::move(name)), dim_(dim), value_(std::move(value)), jet_(std::move(jet)), domain_(std::move(domain)) {
  if (dim < 1 || dim > Jet::kVars) throw DimensionMismatch("charts are supported in dimensions 1 to 3");
  if (!value_ || !jet_) throw std::invalid_argument("chart needs a value and a jet evaluator");
}

Eigen::VectorXd DiffeoChart::value(const Eigen::VectorXd& x) const {
  if (x.size() != dim_) throw DimensionMismatch("chart evaluated at a point of the wrong dimension");
  return value_(x);
}

bool DiffeoChart::contains(const Eigen::VectorXd& x) const {
  if (x.size() != dim_ || !x.allFinite()) return false;
  return !domain_ || domain_(x);
}

ChartDerivatives DiffeoChart::derivatives(const Eigen::VectorXd& x) const {
  const int n = dim_;
  JetVec in;
  in.reserve(n);
  for (int i = 0; i < n; ++i) in.push_back(Jet::variable(x(i), i));
  const JetVec out = jet_(in);
  if (static_cast<int>(out.size()) != n) throw DimensionMismatch("chart jet returned the wrong dimension");

  ChartDerivatives d;
  d.value.resize(n);
  d.jac.resize(n, n);
  d.second.resize(n, n * n);
  d.third.resize(n, n * n * n);
  for (int i = 0; i < n; ++i) {
    d.value(i) = out[i].v;
    for (int j = 0; j < n; ++j) {
      d.jac(i, j) = out[i].grad(j);
      for (int k = 0; k < n; ++k) {
        d.second(i, j * n + k) = out[i].hess(j, k);
        for (int l = 0; l < n; ++l) d.third(i, (j * n + k) * n + l) = out[i].third(j, k, l);
      }
    }
  }
  return d;
}

DiffeoChart DiffeoChart::bare() const {
  DiffeoChart c = *this;
  c.inverse_.reset();
  return c;
}

DiffeoChart DiffeoChart::with_inverse(const DiffeoChart& inv) const {
  if (inv.dim() != dim_) throw DimensionMismatch("inverse chart has another dimension");
  DiffeoChart c = *this;
  c.inverse_ = std::make_shared<const DiffeoChart>(inv.bare());
  return c;
}

DiffeoChart DiffeoChart::inverted() const {
  if (!inverse_) throw MissingInverse("chart '" + name_ + "' carries no inverse");
  return inverse_->with_inverse(bare());
}

DiffeoChart compose_charts(const DiffeoChart& outer, const DiffeoChart& inner) {
  if (outer.dim() != inner.dim()) throw DimensionMismatch("cannot compose charts of different dimensions");
  DiffeoChart::ValueFn value = [outer, inner](const Eigen::VectorXd& x) { return outer.value(inner.value(x)); };
  DiffeoChart::JetFn jet = [outer, inner](const JetVec& x) { return outer.jet(inner.jet(x)); };
  DiffeoChart::DomainFn domain = [outer, inner](const Eigen::VectorXd& x) {
    return inner.contains(x) && outer.contains(inner.value(x));
  };
  DiffeoChart c(outer.name() + "∘" + inner.name(), inner.dim(), std::move(value), std::move(jet), std::move(domain));
  if (outer.has_inverse() && inner.has_inverse())
    c = c.with_inverse(compose_charts(inner.inverted().bare(), outer.inverted().bare()));
  return c;
}

// ----------------------------------------------------------------------------
// Chart library
// ----------------------------------------------------------------------------

DiffeoChart identity_chart(int n) {
  auto f = [](const auto& x) { return x; };
  DiffeoChart c = make_chart("identity", n, f);
  return c.with_inverse(c);
}

DiffeoChart linear_chart(const Eigen::MatrixXd& M) {
  if (M.rows() != M.cols()) throw DimensionMismatch("linear chart needs a square matrix");
  const int n = static_cast<int>(M.rows());
  auto build = [n](const Eigen::MatrixXd& A, const std::string& name) {
    auto f = [A, n](const auto& x) {
      using T = std::decay_t<decltype(x[0])>;
      std::vector<T> y(n, T(0.0));
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) y[i] = y[i] + A(i, j) * x[j];
      return y;
    };
    return make_chart(name, n, f);
  };
  Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
  DiffeoChart c = build(M, "linear");
  if (!lu.isInvertible()) return c;
  return c.with_inverse(build(lu.inverse(), "linear^-1"));
}

DiffeoChart shear_chart() {
  auto f = [](const auto& x) {
    using T = std::decay_t<decltype(x[0])>;
    return std::vector<T>{x[0], x[1] + x[0] * x[0]};
  };
  auto g = [](const auto& y) {
    using T = std::decay_t<decltype(y[0])>;
    return std::vector<T>{y[0], y[1] - y[0] * y[0]};
  };
  return make_chart("shear", 2, f).with_inverse(make_chart("shear^-1", 2, g));
}

namespace {

template <class T>
std::vector<T> rotate_by_radius(const std::vector<T>& x, double sign) {
  using std::cos;
  using std::sin;
  const T a = sign * (x[0] * x[0] + x[1] * x[1]);
  const T c = cos(a), s = sin(a);
  return {c * x[0] - s * x[1], s * x[0] + c * x[1]};
}

}  // namespace

DiffeoChart rotation_chart() {
  auto f = [](const auto& x) { return rotate_by_radius(x, 1.0); };
  auto g = [](const auto& y) { return rotate_by_radius(y, -1.0); };
  return make_chart("rotation", 2, f).with_inverse(make_chart("rotation^-1", 2, g));
}

DiffeoChart stereographic_transition_chart(double r_min) {
  auto f = [](const auto& x) {
    using T = std::decay_t<decltype(x[0])>;
    const T r2 = x[0] * x[0] + x[1] * x[1];
    return std::vector<T>{x[0] / r2, x[1] / r2};
  };
  auto domain = [r_min](const Eigen::VectorXd& x) {
    const double r = x.norm();
    return r > r_min && r < 1.0 / r_min;
  };
  DiffeoChart c = make_chart("stereographic", 2, f, domain);
  return c.with_inverse(c);
}

DiffeoChart broken_c1_chart() {
  auto f = [](const auto& x) {
    using T = std::decay_t<decltype(x[0])>;
    using std::abs;
    return std::vector<T>{x[0], x[1] + x[0] * abs(x[0])};
  };
  auto g = [](const auto& y) {
    using T = std::decay_t<decltype(y[0])>;
    using std::abs;
    return std::vector<T>{y[0], y[1] - y[0] * abs(y[0])};
  };
  return make_chart("broken-c1", 2, f).with_inverse(make_chart("broken-c1^-1", 2, g));
}

// ============================================================================
// SuperpositionMap
// ============================================================================

SuperpositionMap::SuperpositionMap(DiffeoChart chart, Level s) : chart_(std::move(chart)), s_(s) {
  if (!(s.value() > 0.5 && s.value() < 1.0)) throw LevelError("superposition maps need 1/2 < s < 1, got " + s.str());
}

void SuperpositionMap::check_shape(const FourierLoop& u) const {
  if (u.dim() != chart_.dim()) throw DimensionMismatch("loop dimension does not match the chart");
}

NodalJets SuperpositionMap::nodal(const FourierLoop& u, int order) const {
  check_shape(u);
  const int n = dim();
  const Eigen::MatrixXd X = nodal_values(u);
  const auto L = X.rows();
  NodalJets out;
  out.values.resize(L, n);
  if (order >= 1) out.jac.resize(L, n * n);
  if (order >= 2) out.second.resize(L, n * n * n);
  if (order >= 3) out.third.resize(L, n * n * n * n);
  for (Eigen::Index l = 0; l < L; ++l) {
    const Eigen::VectorXd x = X.row(l).transpose();
    if (!chart_.contains(x)) {
      std::ostringstream os;
      os << "loop leaves the domain of chart '" << chart_.name() << "' at node " << l << " (t = "
         << static_cast<double>(l) / static_cast<double>(L) << ")";
      throw OutOfChartError(os.str(), static_cast<int>(l));
    }
    if (order == 0) {
      out.values.row(l) = chart_.value(x).transpose();
      continue;
    }
    const ChartDerivatives d = chart_.derivatives(x);
    out.values.row(l) = d.value.transpose();
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        out.jac(l, i * n + j) = d.jac(i, j);
        if (order < 2) continue;
        for (int k = 0; k < n; ++k) {
          out.second(l, (i * n + j) * n + k) = d.second(i, j * n + k);
          if (order < 3) continue;
          for (int m = 0; m < n; ++m) out.third(l, ((i * n + j) * n + k) * n + m) = d.third(i, (j * n + k) * n + m);
        }
      }
  }
  return out;
}

bool SuperpositionMap::defined_at(const FourierLoop& u) const {
  if (u.dim() != dim()) return false;
  const Eigen::MatrixXd X = nodal_values(u);
  for (Eigen::Index l = 0; l < X.rows(); ++l)
    if (!chart_.contains(X.row(l).transpose())) return false;
  return true;
}

FourierLoop SuperpositionMap::apply(const FourierLoop& u) const {
  return interpolate(nodal(u, 0).values, u.order());
}

LevelOperator SuperpositionMap::dphi(const FourierLoop& u) const {
  return multiplication_operator(nodal(u, 1).jac, dim(), u.order(), Level(1.0), Level(1.0));
}

BilinearLevelMap SuperpositionMap::d2phi(const FourierLoop& u) const {
  return BilinearLevelMap(dim(), u.order(), nodal(u, 2).second, Level(1.0), Level(1.0), Level(1.0));
}

BilinearLevelMap SuperpositionMap::d3phi(const FourierLoop& u, const FourierLoop& zeta) const {
  require_same_shape(u, zeta);
  const int n = dim();
  const NodalJets nj = nodal(u, 3);
  const Eigen::MatrixXd Z = nodal_values(zeta);
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(nj.third.rows(), n * n * n);
  for (Eigen::Index l = 0; l < T.rows(); ++l)
    for (int ijk = 0; ijk < n * n * n; ++ijk)
      for (int m = 0; m < n; ++m) T(l, ijk) += nj.third(l, ijk * n + m) * Z(l, m);
  return BilinearLevelMap(n, u.order(), std::move(T), Level(1.0), Level(1.0), Level(1.0));
}

SuperpositionMap compose(const SuperpositionMap& psi, const SuperpositionMap& phi) {
  if (psi.dim() != phi.dim()) throw DimensionMismatch("cannot compose superposition maps of different dimensions");
  return SuperpositionMap(compose_charts(psi.chart(), phi.chart()), phi.s());
}

SuperpositionMap invert(const SuperpositionMap& phi) { return SuperpositionMap(phi.chart().inverted(), phi.s()); }

// ============================================================================
// Leibniz rule
// ============================================================================

double leibniz_check(const SuperpositionMap& psi, const SuperpositionMap& phi, const FourierLoop& q,
                     const FourierLoop& xi, const FourierLoop& eta, double h) {
  require_same_shape(q, xi);
  require_same_shape(q, eta);
  const SuperpositionMap comp = compose(psi, phi);
  const FourierLoop plus = comp.dphi(q + h * xi).apply(eta);
  const FourierLoop minus = comp.dphi(q - h * xi).apply(eta);
  FourierLoop lhs = (1.0 / (2.0 * h)) * (plus - minus);

  const FourierLoop p = phi.apply(q);
  const LevelOperator Dphi = phi.dphi(q);
  lhs -= psi.d2phi(p)(Dphi.apply(xi), Dphi.apply(eta));
  lhs -= psi.dphi(p).apply(phi.d2phi(q)(xi, eta));
  return sobolev_norm(lhs, Level(0.0));
}

LeibnizSweep leibniz_sweep(const SuperpositionMap& psi, const SuperpositionMap& phi, const FourierLoop& q,
                           const FourierLoop& xi, const FourierLoop& eta, const std::vector<double>& hs) {
  LeibnizSweep out;
  out.h = hs;
  for (double h : hs) out.residual.push_back(leibniz_check(psi, phi, q, xi, eta, h));
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double m = static_cast<double>(hs.size());
  for (std::size_t i = 0; i < hs.size(); ++i) {
    const double x = std::log(hs[i]);
    const double y = std::log(std::max(out.residual[i], std::numeric_limits<double>::min()));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double den = m * sxx - sx * sx;
  out.slope = den != 0.0 ? (m * sxy - sx * sy) / den : 0.0;
  return out;
}

// ============================================================================
// Axioms
// ============================================================================

namespace {

const char* const kAxiomNames[] = {"(i)1", "(i)2", "(ii)1", "(ii)2"};

// Keyed by content so a sample draws the same direction in any sample set.
std::uint64_t sample_key(const FourierLoop& q) {
  std::uint64_t key = static_cast<std::uint64_t>(q.dim());
  for (double c : q.coords()) key = mix_seed(key, std::bit_cast<std::uint64_t>(c));
  return key;
}

double nodal_frobenius_max(const Eigen::MatrixXd& T) { return T.rowwise().norm().maxCoeff(); }

struct SampleContinuity {
  double modulus[4] = {0, 0, 0, 0};
  double residual[4] = {0, 0, 0, 0};
};

// Divided differences of q -> D phi|_q (levels 0 and -1) and q -> D^2 phi|_q at
// order continuity_N, compared with the next derivative.
SampleContinuity continuity_at(const SuperpositionMap& phi, const FourierLoop& q, const FourierLoop& zeta,
                               const AxiomOptions& opts) {
  SampleContinuity out;
  const double h = opts.continuity_h;
  const FourierLoop qp = q + h * zeta;
  const FourierLoop qm = q - h * zeta;

  const LevelOperator D = phi.dphi(q);
  const LevelOperator dD((phi.dphi(qp).matrix - phi.dphi(qm).matrix) / (2.0 * h), Level(1.0), Level(1.0), q.dim(),
                         q.order());
  const BilinearLevelMap B = phi.d2phi(q);
  const LevelOperator pred = B.partial(zeta);
  const LevelOperator defect(dD.matrix - pred.matrix, Level(1.0), Level(1.0), q.dim(), q.order());
  const Level levels[2] = {Level(0.0), Level(-1.0)};
  for (int a = 0; a < 2; ++a) {
    const double scale = std::max(op_norm(pred, levels[a], levels[a]), op_norm(D, levels[a], levels[a]));
    out.modulus[a] = op_norm(dD, levels[a], levels[a]);
    out.residual[a] = scale > 0 ? op_norm(defect, levels[a], levels[a]) / scale : 0.0;
  }

  const Eigen::MatrixXd dT = (phi.d2phi(qp).tensors() - phi.d2phi(qm).tensors()) / (2.0 * h);
  const Eigen::MatrixXd P = phi.d3phi(q, zeta).tensors();
  const double scale = std::max(nodal_frobenius_max(P), nodal_frobenius_max(B.tensors()));
  const double res = scale > 0 ? nodal_frobenius_max(dT - P) / scale : 0.0;
  const BilinearLevelMap dB(q.dim(), q.order(), dT, Level(1.0), Level(1.0), Level(1.0));
  const double mod = collocation_l2_bilinear_norm(dB, phi.s());
  // The (ii)2 entry reuses the nodal modulus of q -> D^2 phi|_q.
  for (int a = 2; a < 4; ++a) {
    out.modulus[a] = mod;
    out.residual[a] = res;
  }
  return out;
}

void finalize(AxiomReport& r, const AxiomOptions& opts) {
  r.bounded = !r.sweep.empty();
  for (const auto& p : r.sweep) r.bounded = r.bounded && std::isfinite(p.value);
  r.spread = stabilization_spread(r.sweep, opts.stable_from);
  r.stable = r.bounded && r.spread <= opts.stable_tol && r.sample_spread <= opts.stable_tol;
  r.continuous = std::isfinite(r.continuity_residual) && r.continuity_residual <= opts.continuity_tol;
  r.verdict = (r.bounded && r.stable && r.continuous) ? "pass" : "fail";
}

void take_max(Sweep& acc, int N, double v) {
  for (auto& p : acc)
    if (p.N == N) {
      p.value = std::max(p.value, v);
      return;
    }
  acc.push_back({N, v});
}

}  // namespace

bool FloerAxiomReport::pass() const {
  if (axioms.empty()) return false;
  return std::all_of(axioms.begin(), axioms.end(), [](const AxiomReport& r) { return r.pass(); });
}

const AxiomReport& FloerAxiomReport::axiom(const std::string& name) const {
  for (const auto& r : axioms)
    if (r.axiom == name) return r;
  throw std::out_of_range("no axiom " + name + " in report");
}

std::vector<FloerAxiomReport> verify_floer_axioms(const SuperpositionMap& phi,
                                                  const std::vector<FourierLoop>& samples,
                                                  const std::vector<Level>& s_values, const AxiomOptions& opts) {
  const int n = phi.dim();
  // First-derivative axioms do not depend on s.
  AxiomReport first[2];
  for (int a = 0; a < 2; ++a) first[a].axiom = kAxiomNames[a];
  std::vector<AxiomReport> second(2 * s_values.size());
  for (std::size_t i = 0; i < s_values.size(); ++i) {
    second[2 * i].axiom = kAxiomNames[2];
    second[2 * i + 1].axiom = kAxiomNames[3];
  }

  // Per-sample sweeps: a divergent sample must not hide behind a larger, stable one.
  const std::size_t slots = 2 + 2 * s_values.size();
  std::vector<std::vector<Sweep>> per(slots, std::vector<Sweep>(samples.size()));
  for (int N : opts.sweep) {
    for (std::size_t k = 0; k < samples.size(); ++k) {
      const FourierLoop q = samples[k].resized(N);
      const LevelOperator D = phi.dphi(q);
      per[0][k].push_back({N, std::max(op_norm(D, Level(1.0), Level(1.0)), op_norm(D, Level(0.0), Level(0.0)))});
      per[1][k].push_back({N, op_norm(D, Level(-1.0), Level(-1.0))});
      const BilinearLevelMap B = phi.d2phi(q);
      for (std::size_t i = 0; i < s_values.size(); ++i) {
        const Level s = s_values[i];
        per[2 + 2 * i][k].push_back({N, collocation_l2_bilinear_norm(B, s)});
        per[3 + 2 * i][k].push_back(
            {N, bilinear_norm_estimate(B, Level(1.0 + s.value()), Level(-1.0), Level(-1.0), opts.hopm)});
      }
    }
  }
  for (std::size_t slot = 0; slot < slots; ++slot) {
    AxiomReport& r = slot < 2 ? first[slot] : second[slot - 2];
    for (const Sweep& sw : per[slot]) {
      for (const auto& p : sw) take_max(r.sweep, p.N, p.value);
      r.sample_spread = std::max(r.sample_spread, stabilization_spread(sw, opts.stable_from));
    }
  }

  for (std::size_t k = 0; k < samples.size(); ++k) {
    const FourierLoop q = samples[k].resized(opts.continuity_N);
    const FourierLoop zeta = random_direction(mix_seed(opts.seed, sample_key(q)), n, opts.continuity_N, Level(1.0));
    for (std::size_t i = 0; i < std::max<std::size_t>(1, s_values.size()); ++i) {
      const SuperpositionMap at_s = s_values.empty() ? phi : phi.with_s(s_values[i]);
      const SampleContinuity c = continuity_at(at_s, q, zeta, opts);
      if (i == 0)
        for (int a = 0; a < 2; ++a) {
          first[a].continuity_modulus = std::max(first[a].continuity_modulus, c.modulus[a]);
          first[a].continuity_residual = std::max(first[a].continuity_residual, c.residual[a]);
        }
      if (s_values.empty()) break;
      for (int a = 0; a < 2; ++a) {
        auto& r = second[2 * i + a];
        r.continuity_modulus = std::max(r.continuity_modulus, c.modulus[2 + a]);
        r.continuity_residual = std::max(r.continuity_residual, c.residual[2 + a]);
      }
    }
  }

  std::vector<FloerAxiomReport> out;
  for (std::size_t i = 0; i < s_values.size(); ++i) {
    FloerAxiomReport rep;
    rep.map = phi.chart().name();
    rep.s = s_values[i].value();
    for (int a = 0; a < 2; ++a) rep.axioms.push_back(first[a]);
    rep.axioms.push_back(second[2 * i]);
    rep.axioms.push_back(second[2 * i + 1]);
    for (auto& r : rep.axioms) {
      r.s = rep.s;
      finalize(r, opts);
    }
    out.push_back(std::move(rep));
  }
  return out;
}

FloerAxiomReport verify_floer_axioms(const SuperpositionMap& phi, const std::vector<FourierLoop>& samples,
                                     const AxiomOptions& opts) {
  return verify_floer_axioms(phi, samples, std::vector<Level>{phi.s()}, opts).front();
}

FloerAxiomReport merge(const FloerAxiomReport& a, const FloerAxiomReport& b, const AxiomOptions& opts) {
  if (a.s != b.s || a.axioms.size() != b.axioms.size())
    throw std::invalid_argument("cannot merge reports taken at different levels");
  FloerAxiomReport out = a;
  for (std::size_t i = 0; i < out.axioms.size(); ++i) {
    auto& r = out.axioms[i];
    const auto& o = b.axioms[i];
    for (const auto& p : o.sweep) take_max(r.sweep, p.N, p.value);
    std::sort(r.sweep.begin(), r.sweep.end(), [](const SweepPoint& x, const SweepPoint& y) { return x.N < y.N; });
    r.sample_spread = std::max(r.sample_spread, o.sample_spread);
    r.continuity_modulus = std::max(r.continuity_modulus, o.continuity_modulus);
    r.continuity_residual = std::max(r.continuity_residual, o.continuity_residual);
    finalize(r, opts);
  }
  return out;
}

bool reports_agree(const FloerAxiomReport& a, const FloerAxiomReport& b, double rel_tol) {
  if (a.axioms.size() != b.axioms.size()) return false;
  auto close = [rel_tol](double x, double y) {
    return std::abs(x - y) <= rel_tol * std::max({std::abs(x), std::abs(y), 1e-300});
  };
  for (std::size_t i = 0; i < a.axioms.size(); ++i) {
    const auto& x = a.axioms[i];
    const auto& y = b.axioms[i];
    if (x.axiom != y.axiom || x.verdict != y.verdict || x.sweep.size() != y.sweep.size()) return false;
    for (std::size_t k = 0; k < x.sweep.size(); ++k)
      if (x.sweep[k].N != y.sweep[k].N || !close(x.sweep[k].value, y.sweep[k].value)) return false;
    if (!close(x.continuity_modulus, y.continuity_modulus) || !close(x.sample_spread, y.sample_spread)) return false;
  }
  return true;
}

nlohmann::json to_json(const AxiomReport& r) {
  return {{"axiom", r.axiom},
          {"s", r.s},
          {"sweep", to_json(r.sweep)},
          {"spread", r.spread},
          {"sample_spread", r.sample_spread},
          {"continuity_modulus", r.continuity_modulus},
          {"continuity_residual", r.continuity_residual},
          {"verdict", r.verdict}};
}

nlohmann::json to_json(const FloerAxiomReport& r) {
  nlohmann::json axioms = nlohmann::json::array();
  for (const auto& a : r.axioms) axioms.push_back(to_json(a));
  return {{"map", r.map}, {"s", r.s}, {"axioms", std::move(axioms)}, {"verdict", r.pass() ? "pass" : "fail"}};
}

}  // namespace floerlab
