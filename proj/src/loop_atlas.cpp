#include "floerlab/loop_atlas.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "floerlab/errors.hpp"

namespace floerlab {

namespace {

Eigen::Vector2d sigma(const Eigen::Vector3d& p) { return p.head<2>() / (1.0 + p.z()); }

Eigen::Vector3d sigma_inverse(const Eigen::Vector2d& y) {
  const double r2 = y.squaredNorm();
  return Eigen::Vector3d(2.0 * y.x(), 2.0 * y.y(), 1.0 - r2) / (1.0 + r2);
}

Eigen::Vector2d planar(const Eigen::VectorXd& v) { return Eigen::Vector2d(v(0), v(1)); }

}  // namespace

// ============================================================================
// Charts and atlases
// ============================================================================

SphereChart SphereChart::cap_chart(std::string id, const Eigen::Matrix3d& frame, double cap) {
  if (!(cap > 0.0 && cap < std::numbers::pi)) throw ConfigError("chart cap must lie in (0, pi)");
  if (!(frame.transpose() * frame).isApprox(Eigen::Matrix3d::Identity(), 1e-12))
    throw ConfigError("chart frame must be orthogonal");
  SphereChart c;
  c.id = std::move(id);
  c.frame = frame;
  c.radius = std::tan(0.5 * cap);
  return c;
}

Eigen::Vector2d SphereChart::project(const Eigen::Vector3d& p) const {
  const Eigen::Vector2d y = sigma(frame * p);
  return warp ? planar(warp->value(y)) : y;
}

Eigen::Vector3d SphereChart::lift(const Eigen::Vector2d& x) const {
  const Eigen::Vector2d y = warp ? planar(warp->inverted().value(x)) : x;
  return frame.transpose() * sigma_inverse(y);
}

bool SphereChart::covers(const Eigen::Vector3d& p, double delta) const {
  const Eigen::Vector3d r = frame * p;
  if (!(1.0 + r.z() > 0.0)) return false;
  return sigma(r).norm() < radius - delta;
}

const SphereChart& Atlas::chart(const std::string& id) const {
  for (const auto& c : charts)
    if (c.id == id) return c;
  throw ConfigError("atlas " + name + " has no chart " + id);
}

Atlas sphere_small_loop_atlas(Level s) {
  const double cap = 150.0 * std::numbers::pi / 180.0;
  Atlas a;
  a.name = "sphere";
  a.s = s;
  a.charts.push_back(SphereChart::cap_chart("N", Eigen::Matrix3d::Identity(), cap));
  a.charts.push_back(SphereChart::cap_chart("S", Eigen::Vector3d(1.0, 1.0, -1.0).asDiagonal().toDenseMatrix(), cap));
  return a;
}

Atlas rotated_atlas(const Atlas& a, const Eigen::Matrix3d& Q, std::string name) {
  Atlas out = a;
  out.name = std::move(name);
  for (auto& c : out.charts) c.frame = c.frame * Q.transpose();
  return out;
}

Eigen::Matrix3d axis_rotation(const Eigen::Vector3d& axis, double angle) {
  return Eigen::AngleAxisd(angle, axis.normalized()).toRotationMatrix();
}

Atlas broken_sphere_atlas(Level s) {
  Atlas a = sphere_small_loop_atlas(s);
  a.name = "sphere-broken";
  for (auto& c : a.charts)
    if (c.id == "S") c.warp = broken_c1_chart();
  return a;
}

std::vector<Eigen::Vector3d> fibonacci_sphere(int n) {
  std::vector<Eigen::Vector3d> pts;
  pts.reserve(static_cast<std::size_t>(n));
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < n; ++i) {
    const double z = 1.0 - (2.0 * i + 1.0) / n;
    const double r = std::sqrt(1.0 - z * z);
    pts.emplace_back(r * std::cos(golden * i), r * std::sin(golden * i), z);
  }
  return pts;
}

// ============================================================================
// Loops on the sphere
// ============================================================================

Eigen::Vector3d SphereLoop::point(double t) const {
  const Eigen::VectorXd g = gamma.evaluate(t);
  const double n = g.norm();
  if (!(n > 1e-12)) throw InvalidLoop("sphere loop passes through the origin");
  return Eigen::Vector3d(g(0), g(1), g(2)) / n;
}

std::vector<SphereLoop> equatorial_corpus(int count, std::uint64_t seed, int order, double amplitude) {
  FourierLoop equator(3, order);
  const int b = block_size(order);
  equator.coords()(1) = std::sqrt(0.5);      // x = cos 2 pi t
  equator.coords()(b + 2) = std::sqrt(0.5);  // y = sin 2 pi t
  std::vector<SphereLoop> out;
  for (int i = 0; i < count; ++i) {
    if (i == 0) {
      out.push_back({equator});
      continue;
    }
    out.push_back({equator + random_loop(mix_seed(seed, static_cast<std::uint64_t>(i)), 3, order, 0.0, amplitude)});
  }
  return out;
}

bool is_small_loop(const SphereChart& c, const SphereLoop& u, int N, double delta) {
  const GridBridge grid(N, 2 * N);
  for (int j = 0; j < grid.points(); ++j)
    if (!c.covers(u.point(grid.node(j)), delta)) return false;
  const auto& col = collocation(N);
  for (int l = 0; l < col.L; ++l)
    if (!c.covers(u.point(col.node(l)), delta)) return false;
  return true;
}

FourierLoop chart_loop(const SphereChart& c, const SphereLoop& u, int N) {
  const auto& col = collocation(N);
  Eigen::MatrixXd nodal(col.L, 2);
  for (int l = 0; l < col.L; ++l) {
    const Eigen::Vector3d p = u.point(col.node(l));
    if (!c.covers(p)) {
      std::ostringstream msg;
      msg << "loop leaves chart " << c.id << " at node " << l << " (t = " << col.node(l) << ")";
      throw OutOfChartError(msg.str(), l);
    }
    nodal.row(l) = c.project(p).transpose();
  }
  return interpolate(nodal, N);
}

// ============================================================================
// Transitions
// ============================================================================

namespace {

// sigma ∘ Q ∘ sigma^-1 on the projected coordinates of the source cap.
DiffeoChart stereographic_core(const SphereChart& a, const SphereChart& b) {
  const Eigen::Matrix3d Q = b.frame * a.frame.transpose();
  auto f = [Q](const auto& x) {
    using T = std::decay_t<decltype(x[0])>;
    const T r2 = x[0] * x[0] + x[1] * x[1];
    const T d = T(1.0) / (T(1.0) + r2);
    const T p[3] = {2.0 * x[0] * d, 2.0 * x[1] * d, (T(1.0) - r2) * d};
    T q[3] = {T(0.0), T(0.0), T(0.0)};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) q[i] = q[i] + Q(i, j) * p[j];
    const T w = T(1.0) / (T(1.0) + q[2]);
    return std::vector<T>{q[0] * w, q[1] * w};
  };
  auto domain = [Q, ra = a.radius, rb = b.radius](const Eigen::VectorXd& x) {
    if (!(x.norm() < ra)) return false;
    const Eigen::Vector3d q = Q * sigma_inverse(planar(x));
    return 1.0 + q.z() > 0.0 && sigma(q).norm() < rb;
  };
  return make_chart(a.id + "->" + b.id, 2, f, domain);
}

bool caps_overlap(const SphereChart& a, const SphereChart& b) {
  for (const auto& p : fibonacci_sphere(4096))
    if (a.covers(p) && b.covers(p)) return true;
  return false;
}

}  // namespace

SuperpositionMap transition(const SphereChart& alpha, const SphereChart& beta, Level s) {
  if (alpha.id == beta.id && alpha.frame == beta.frame) {
    auto f = [](const auto& x) { return x; };
    auto domain = [alpha](const Eigen::VectorXd& x) { return alpha.covers(alpha.lift(planar(x))); };
    const DiffeoChart id = make_chart(alpha.id + "->" + beta.id, 2, f, domain);
    return SuperpositionMap(id.with_inverse(id), s);
  }
  if (!caps_overlap(alpha, beta)) throw EmptyOverlap("charts " + alpha.id + " and " + beta.id + " do not overlap");
  DiffeoChart core = stereographic_core(alpha, beta).with_inverse(stereographic_core(beta, alpha));
  if (alpha.warp) core = compose_charts(core, alpha.warp->inverted());
  if (beta.warp) core = compose_charts(*beta.warp, core);
  return SuperpositionMap(core, s);
}

SuperpositionMap transition(const Atlas& atlas, const std::string& alpha, const std::string& beta) {
  return transition(atlas.chart(alpha), atlas.chart(beta), atlas.s);
}

// ----------------------------------------------------------------------------
// Compatibility
// ----------------------------------------------------------------------------

namespace {

std::vector<FourierLoop> overlap_samples(const SphereChart& a, const std::vector<const SphereChart*>& others,
                                         const std::vector<SphereLoop>& corpus, const AtlasOptions& opts) {
  std::vector<FourierLoop> out;
  for (const auto& u : corpus) {
    bool inside = is_small_loop(a, u, opts.base_N, opts.delta);
    for (const SphereChart* o : others) inside = inside && is_small_loop(*o, u, opts.base_N, opts.delta);
    if (inside) out.push_back(chart_loop(a, u, opts.base_N));
  }
  return out;
}

}  // namespace

CompatibilityReport check_compatibility(const Atlas& A, const Atlas& B, const std::vector<SphereLoop>& corpus,
                                        const AtlasOptions& opts) {
  CompatibilityReport rep;
  rep.a = A.name;
  rep.b = B.name;
  bool any_pass = false;
  bool any_fail = false;
  for (const auto& alpha : A.charts)
    for (const auto& beta : B.charts) {
      PairReport pr;
      pr.alpha = A.name + ":" + alpha.id;
      pr.beta = B.name + ":" + beta.id;
      const std::vector<FourierLoop> samples = overlap_samples(alpha, {&beta}, corpus, opts);
      pr.samples = static_cast<int>(samples.size());
      if (samples.empty()) {
        pr.verdict = "no-overlap";
        rep.pairs.push_back(std::move(pr));
        continue;
      }
      const SuperpositionMap phi = transition(alpha, beta, A.s);
      pr.reports = verify_floer_axioms(phi, samples, opts.s_values, opts.axioms);
      const bool ok = std::all_of(pr.reports.begin(), pr.reports.end(), [](const auto& r) { return r.pass(); });
      pr.verdict = ok ? "pass" : "fail";
      any_pass = any_pass || ok;
      any_fail = any_fail || !ok;
      rep.pairs.push_back(std::move(pr));
    }
  rep.compatible = any_pass && !any_fail;
  return rep;
}

// ----------------------------------------------------------------------------
// Transitivity
// ----------------------------------------------------------------------------

namespace {

double relative_gap(const FourierLoop& a, const FourierLoop& b) {
  const double scale = std::max(sobolev_norm(a, Level(0.0)), 1e-300);
  return sobolev_norm(a - b, Level(0.0)) / scale;
}

}  // namespace

TransitivityReport check_transitivity(const Atlas& A, const Atlas& B, const Atlas& C,
                                      const std::vector<SphereLoop>& corpus, const AtlasOptions& opts,
                                      double apply_tol, double dphi_tol) {
  TransitivityReport rep;
  const Level s = opts.s_values.empty() ? A.s : opts.s_values.front();

  for (const auto& alpha : A.charts)
    for (const auto& beta : B.charts)
      for (const auto& gamma : C.charts) {
        const std::vector<FourierLoop> samples = overlap_samples(alpha, {&beta, &gamma}, corpus, opts);
        if (samples.empty()) continue;
        ++rep.triples;
        const SuperpositionMap ab = transition(alpha, beta, s);
        const SuperpositionMap bg = transition(beta, gamma, s);
        const SuperpositionMap ag = transition(alpha, gamma, s);
        const SuperpositionMap ba = transition(beta, alpha, s);
        for (const auto& q : samples) {
          const FourierLoop p = ab.apply(q);
          rep.cocycle_apply = std::max(rep.cocycle_apply, relative_gap(ag.apply(q), bg.apply(p)));
          const Eigen::MatrixXd direct = ag.dphi(q).matrix;
          const Eigen::MatrixXd chained = bg.dphi(p).matrix * ab.dphi(q).matrix;
          rep.cocycle_dphi = std::max(rep.cocycle_dphi, (direct - chained).norm() / direct.norm());
          rep.inverse_residual = std::max(rep.inverse_residual, relative_gap(q, ba.apply(p)));
          rep.inverse_residual = std::max(rep.inverse_residual, relative_gap(q, invert(ab).apply(p)));
        }
      }

  // Axiom reports on the pieces of the B-cover merge to the report on the union.
  rep.local_global = true;
  for (const auto& alpha : A.charts)
    for (const auto& gamma : C.charts) {
      std::vector<FourierLoop> all;
      std::vector<std::vector<FourierLoop>> pieces(B.charts.size());
      for (const auto& u : corpus) {
        if (!is_small_loop(alpha, u, opts.base_N, opts.delta) || !is_small_loop(gamma, u, opts.base_N, opts.delta))
          continue;
        for (std::size_t b = 0; b < B.charts.size(); ++b)
          if (is_small_loop(B.charts[b], u, opts.base_N, opts.delta)) {
            pieces[b].push_back(chart_loop(alpha, u, opts.base_N));
            all.push_back(pieces[b].back());
            break;
          }
      }
      if (all.empty()) continue;
      const SuperpositionMap ag = transition(alpha, gamma, s);
      const FloerAxiomReport global = verify_floer_axioms(ag, all, opts.axioms);
      std::optional<FloerAxiomReport> merged;
      for (const auto& piece : pieces) {
        if (piece.empty()) continue;
        const FloerAxiomReport local = verify_floer_axioms(ag, piece, opts.axioms);
        merged = merged ? merge(*merged, local, opts.axioms) : local;
      }
      rep.local_global = rep.local_global && merged && reports_agree(*merged, global);
    }

  rep.pass = rep.triples > 0 && rep.cocycle_apply <= apply_tol && rep.cocycle_dphi <= dphi_tol &&
             rep.inverse_residual <= apply_tol && rep.local_global;
  return rep;
}

// ============================================================================
// Serialization
// ============================================================================

nlohmann::json to_json(const SphereChart& c) {
  nlohmann::json frame = nlohmann::json::array();
  for (int i = 0; i < 3; ++i) frame.push_back({c.frame(i, 0), c.frame(i, 1), c.frame(i, 2)});
  return {{"id", c.id}, {"frame", frame}, {"radius", c.radius}, {"warp", c.warp ? c.warp->name() : "none"}};
}

nlohmann::json to_json(const Atlas& a) {
  nlohmann::json charts = nlohmann::json::array();
  for (const auto& c : a.charts) charts.push_back(to_json(c));
  return {{"name", a.name}, {"s", a.s.value()}, {"charts", charts}};
}

nlohmann::json to_json(const std::vector<SphereLoop>& corpus) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& u : corpus) out.push_back(to_json(u.gamma));
  return out;
}

nlohmann::json to_json(const CompatibilityReport& r) {
  nlohmann::json pairs = nlohmann::json::array();
  for (const auto& p : r.pairs) {
    nlohmann::json reports = nlohmann::json::array();
    for (const auto& x : p.reports) reports.push_back(to_json(x));
    pairs.push_back(
        {{"alpha", p.alpha}, {"beta", p.beta}, {"samples", p.samples}, {"reports", reports}, {"verdict", p.verdict}});
  }
  return {{"a", r.a}, {"b", r.b}, {"pairs", pairs}, {"compatible", r.compatible}};
}

nlohmann::json to_json(const TransitivityReport& r) {
  return {{"triples", r.triples},
          {"cocycle_apply", r.cocycle_apply},
          {"cocycle_dphi", r.cocycle_dphi},
          {"inverse_residual", r.inverse_residual},
          {"local_global", r.local_global},
          {"pass", r.pass}};
}

}  // namespace floerlab
