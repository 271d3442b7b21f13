#pragma once

#include <cmath>
#include <numbers>
#include <string>

namespace floerlab {

/// Regularity index of the scale H_s(S^1, R^n), s ∈ {-1} ∪ [0, 2].
class Level {
 public:
  constexpr Level() = default;
  explicit Level(double s);

  constexpr double value() const noexcept { return s_; }
  std::string str() const;

  friend constexpr bool operator==(Level a, Level b) noexcept { return a.s_ == b.s_; }

  static bool admissible(double s) noexcept { return s == -1.0 || (s >= 0.0 && s <= 2.0); }

 private:
  double s_ = 0.0;
};

/// Spectral weight w_k(s) = (1 + 4 pi^2 k^2)^s of Fourier mode k.
inline double mode_weight(int k, double s) {
  const double kk = 2.0 * std::numbers::pi * k;
  return std::pow(1.0 + kk * kk, s);
}
inline double mode_weight(int k, Level s) { return mode_weight(k, s.value()); }

}  // namespace floerlab
