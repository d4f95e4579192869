#pragma once

#include <vector>

#include "spiral/common.hpp"

namespace spiral::rd {

enum class Kinetics { fhn, oregonator };
enum class Species { u, v };

// Localized inhomogeneity: amplitude * exp(rate * |x - center|^2), rate < 0.
struct GaussianBell {
  double amplitude = 0.0;
  Vec2 center;
  double rate = -1.0;
  Species target = Species::u;

  double eval(const Vec2& x) const {
    const Vec2 d = x - center;
    return amplitude * std::exp(rate * d.norm2());
  }
};

struct FhnParams {
  double sigma = 0.3;
  double beta = 0.6;
  double gamma = 0.5;
  // Sign with which the v-equation bell field enters: v' = sigma*(u + beta
  // - gamma*v + phi_v_sign*phi_v). Both printed variants are selectable.
  double phi_v_sign = 1.0;
};

struct OregonatorParams {
  double f = 1.4;
  double q = 0.002;
  double sigma = 0.05;
};

struct ModelSpec {
  Kinetics kinetics = Kinetics::fhn;
  FhnParams fhn;
  OregonatorParams oregonator;
  double diff_u = 1.0;
  double diff_v = 0.0;  // oregonator uses 0.6
  std::vector<GaussianBell> bells;

  void validate() const;

  // Reaction terms with the local bell fields already summed per species.
  void reaction(double u, double v, double phi_u, double phi_v, double* du,
                double* dv) const;

  // Homogeneous steady state (no bells). For the Oregonator this is the
  // positive root with v = u.
  void rest_state(double* u, double* v) const;

  // Value of u on the excited branch at the resting v (used by the
  // cross-field stimulus).
  double excited_u() const;
};

}  // namespace spiral::rd
