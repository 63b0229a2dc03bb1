#pragma once

#include <algorithm>
#include <cmath>

namespace nlsfp {

/// C-infinity cut-off family: phi_T(s) = 1 for |s| <= T, 0 for |s| >= That
/// with That = min(2T, T+1), monotone exp(-1/x) transitions in between.
/// T = 0 degenerates (That = 0); by convention phi_0 is identically zero,
/// which makes the constant strip the exact continuation seed.
struct Cutoff {
  double T = 0.0;
  double That = 0.0;

  explicit Cutoff(double T_ = 0.0) : T(T_), That(std::min(2.0 * T_, T_ + 1.0)) {}

  double operator()(double s) const {
    if (T <= 0.0) return 0.0;
    const double a = std::abs(s);
    if (a <= T) return 1.0;
    if (a >= That) return 0.0;
    return smoothstep((That - a) / (That - T));
  }

  /// rho(x)/(rho(x)+rho(1-x)) with rho(x)=exp(-1/x): 0 at 0, 1 at 1.
  static double smoothstep(double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double a = std::exp(-1.0 / x);
    const double b = std::exp(-1.0 / (1.0 - x));
    return a / (a + b);
  }
};

}  // namespace nlsfp
