#pragma once

#include <cmath>

namespace gpcuq::fc {

struct DiodeParams {
  double saturation_current = 1e-6;  // A
  double thermal_voltage = 0.02585;  // V
};

struct DiodeEval {
  double current;      // A
  double conductance;  // A/V
};

/// Shockley law j = I_S (exp(u/U_TH) - 1) and its derivative. Beyond
/// u/U_TH = 40 the exponential is continued linearly (C^1), which keeps
/// Newton iterates finite for large forward voltages.
inline DiodeEval shockley(double u, const DiodeParams& d) {
  constexpr double kClamp = 40.0;
  const double a = u / d.thermal_voltage;
  double e, de;
  if (a <= kClamp) {
    e = std::exp(a);
    de = e;
  } else {
    const double e_clamp = std::exp(kClamp);
    e = e_clamp * (1.0 + (a - kClamp));
    de = e_clamp;
  }
  return {d.saturation_current * (e - 1.0), d.saturation_current / d.thermal_voltage * de};
}

struct BrauerParams {
  double k1 = 0.3774;  // m/H
  double k2 = 2.97;    // 1/T^2
  double k3 = 388.33;  // m/H
};

struct Reluctivity {
  double nu;       // m/H
  double dnu_db2;  // d nu / d(B^2)
};

/// Brauer's reluctivity nu = k1 exp(k2 B^2) + k3 as a function of B^2, with
/// the exponential continued linearly beyond k2 B^2 = 30.
inline Reluctivity brauer_nu_b2(double b2, const BrauerParams& p) {
  constexpr double kClamp = 30.0;
  const double s = p.k2 * b2;
  if (s <= kClamp) {
    const double e = std::exp(s);
    return {p.k1 * e + p.k3, p.k1 * p.k2 * e};
  }
  const double e_clamp = std::exp(kClamp);
  return {p.k1 * e_clamp * (1.0 + (s - kClamp)) + p.k3, p.k1 * p.k2 * e_clamp};
}

inline Reluctivity brauer_nu(double b, const BrauerParams& p) { return brauer_nu_b2(b * b, p); }

}  // namespace gpcuq::fc
