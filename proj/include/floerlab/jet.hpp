#pragma once

#include <array>
#include <cmath>

namespace floerlab {

/// Third-order forward-mode jet in up to three variables: value, gradient,
/// Hessian and third-derivative tensor of a scalar quantity. Chart formulas are
/// written once as generic code and evaluated on double or on Jet; the Jet path
/// yields exact derivatives through order three, including through compositions.
struct Jet {
  static constexpr int kVars = 3;

  double v = 0.0;
  std::array<double, kVars> d{};
  std::array<double, kVars * kVars> dd{};
  std::array<double, kVars * kVars * kVars> ddd{};

  Jet() = default;
  Jet(double value) : v(value) {}  // NOLINT: constants promote implicitly

  static Jet variable(double value, int i) {
    Jet x(value);
    x.d[i] = 1.0;
    return x;
  }

  double grad(int i) const { return d[i]; }
  double hess(int i, int j) const { return dd[i * kVars + j]; }
  double third(int i, int j, int k) const { return ddd[(i * kVars + j) * kVars + k]; }

  Jet& operator+=(const Jet& o) {
    v += o.v;
    for (int i = 0; i < kVars; ++i) d[i] += o.d[i];
    for (int i = 0; i < kVars * kVars; ++i) dd[i] += o.dd[i];
    for (int i = 0; i < kVars * kVars * kVars; ++i) ddd[i] += o.ddd[i];
    return *this;
  }
  Jet& operator-=(const Jet& o) {
    v -= o.v;
    for (int i = 0; i < kVars; ++i) d[i] -= o.d[i];
    for (int i = 0; i < kVars * kVars; ++i) dd[i] -= o.dd[i];
    for (int i = 0; i < kVars * kVars * kVars; ++i) ddd[i] -= o.ddd[i];
    return *this;
  }
  Jet& operator*=(double a) {
    v *= a;
    for (auto& x : d) x *= a;
    for (auto& x : dd) x *= a;
    for (auto& x : ddd) x *= a;
    return *this;
  }
};

inline Jet operator+(Jet a, const Jet& b) { return a += b; }
inline Jet operator-(Jet a, const Jet& b) { return a -= b; }
inline Jet operator-(Jet a) { return a *= -1.0; }
inline Jet operator*(Jet a, double b) { return a *= b; }
inline Jet operator*(double b, Jet a) { return a *= b; }

inline Jet operator*(const Jet& a, const Jet& b) {
  constexpr int n = Jet::kVars;
  Jet r;
  r.v = a.v * b.v;
  for (int i = 0; i < n; ++i) r.d[i] = a.d[i] * b.v + a.v * b.d[i];
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      r.dd[i * n + j] = a.dd[i * n + j] * b.v + a.d[i] * b.d[j] + a.d[j] * b.d[i] + a.v * b.dd[i * n + j];
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        const int ijk = (i * n + j) * n + k;
        r.ddd[ijk] = a.ddd[ijk] * b.v + a.dd[i * n + j] * b.d[k] + a.dd[i * n + k] * b.d[j] +
                     a.dd[j * n + k] * b.d[i] + a.d[i] * b.dd[j * n + k] + a.d[j] * b.dd[i * n + k] +
                     a.d[k] * b.dd[i * n + j] + a.v * b.ddd[ijk];
      }
  return r;
}

/// f(u) for a univariate f given its derivatives f0..f3 at u.v.
inline Jet chain(const Jet& u, double f0, double f1, double f2, double f3) {
  constexpr int n = Jet::kVars;
  Jet r;
  r.v = f0;
  for (int i = 0; i < n; ++i) r.d[i] = f1 * u.d[i];
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) r.dd[i * n + j] = f2 * u.d[i] * u.d[j] + f1 * u.dd[i * n + j];
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        const int ijk = (i * n + j) * n + k;
        r.ddd[ijk] = f3 * u.d[i] * u.d[j] * u.d[k] +
                     f2 * (u.dd[i * n + j] * u.d[k] + u.dd[i * n + k] * u.d[j] + u.dd[j * n + k] * u.d[i]) +
                     f1 * u.ddd[ijk];
      }
  return r;
}

inline Jet reciprocal(const Jet& u) {
  const double x = u.v;
  return chain(u, 1.0 / x, -1.0 / (x * x), 2.0 / (x * x * x), -6.0 / (x * x * x * x));
}

inline Jet operator/(const Jet& a, const Jet& b) { return a * reciprocal(b); }
inline Jet operator/(const Jet& a, double b) { return a * (1.0 / b); }
inline Jet operator/(double a, const Jet& b) { return a * reciprocal(b); }

inline Jet sin(const Jet& u) {
  const double s = std::sin(u.v), c = std::cos(u.v);
  return chain(u, s, c, -s, -c);
}
inline Jet cos(const Jet& u) {
  const double s = std::sin(u.v), c = std::cos(u.v);
  return chain(u, c, -s, -c, s);
}
inline Jet exp(const Jet& u) {
  const double e = std::exp(u.v);
  return chain(u, e, e, e, e);
}
inline Jet sqrt(const Jet& u) {
  const double r = std::sqrt(u.v);
  return chain(u, r, 0.5 / r, -0.25 / (r * u.v), 0.375 / (r * u.v * u.v));
}
/// |u|: derivatives taken away from the kink (second and third vanish).
inline Jet abs(const Jet& u) {
  const double sg = u.v > 0 ? 1.0 : (u.v < 0 ? -1.0 : 0.0);
  return chain(u, std::abs(u.v), sg, 0.0, 0.0);
}

inline double value_of(double x) { return x; }
inline double value_of(const Jet& x) { return x.v; }

}  // namespace floerlab
