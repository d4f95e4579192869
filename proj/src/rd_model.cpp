#include "spiral/rd_model.hpp"

#include <cmath>

namespace spiral::rd {

void ModelSpec::validate() const {
  if (kinetics == Kinetics::fhn && fhn.sigma <= 0.0) {
    throw ConfigError("fhn: sigma must be positive");
  }
  if (kinetics == Kinetics::oregonator) {
    if (oregonator.sigma <= 0.0) throw ConfigError("oregonator: sigma must be positive");
    if (oregonator.q <= 0.0) throw ConfigError("oregonator: q must be positive");
  }
  if (diff_u < 0.0 || diff_v < 0.0) {
    throw ConfigError("model: diffusion coefficients must be non-negative");
  }
  for (const auto& bell : bells) {
    if (bell.rate >= 0.0) throw ConfigError("bell: rate must be negative");
  }
}

void ModelSpec::reaction(double u, double v, double phi_u, double phi_v, double* du,
                         double* dv) const {
  if (kinetics == Kinetics::fhn) {
    *du = (u - u * u * u / 3.0 - v) / fhn.sigma + phi_u;
    *dv = fhn.sigma * (u + fhn.beta - fhn.gamma * v + fhn.phi_v_sign * phi_v);
  } else {
    // (u - q)/(u + q) is well-behaved for u > 0; u = q gives 0 exactly.
    const double excit = (u - oregonator.q) / (u + oregonator.q);
    *du = (u - u * u - (oregonator.f * v + phi_u) * excit) / oregonator.sigma;
    *dv = u - v;
  }
}

void ModelSpec::rest_state(double* u_out, double* v_out) const {
  if (kinetics == Kinetics::fhn) {
    // Intersection of v = u - u^3/3 and v = (u + beta)/gamma.
    double u = -1.0;
    for (int it = 0; it < 100; ++it) {
      const double g = u - u * u * u / 3.0 - (u + fhn.beta) / fhn.gamma;
      const double dg = 1.0 - u * u - 1.0 / fhn.gamma;
      const double step = g / dg;
      u -= step;
      if (std::abs(step) < 1e-14) break;
    }
    *u_out = u;
    *v_out = (u + fhn.beta) / fhn.gamma;
  } else {
    // u - u^2 - f*u*(u-q)/(u+q) = 0 with v = u; positive root by bisection.
    auto g = [&](double u) {
      return u - u * u - oregonator.f * u * (u - oregonator.q) / (u + oregonator.q);
    };
    double lo = oregonator.q * 1e-3;
    double hi = 1.0;
    if (g(lo) < 0.0) std::swap(lo, hi);
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (g(mid) >= 0.0) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    *u_out = 0.5 * (lo + hi);
    *v_out = *u_out;
  }
}

double ModelSpec::excited_u() const {
  if (kinetics == Kinetics::fhn) {
    // Largest root of u - u^3/3 = v_rest.
    double u_rest, v_rest;
    rest_state(&u_rest, &v_rest);
    double u = 2.0;
    for (int it = 0; it < 100; ++it) {
      const double g = u - u * u * u / 3.0 - v_rest;
      const double dg = 1.0 - u * u;
      const double step = g / dg;
      u -= step;
      if (std::abs(step) < 1e-14) break;
    }
    return u;
  }
  return 0.8;  // oregonator excited plateau
}

}  // namespace spiral::rd
