#pragma once

#include <map>
#include <utility>
#include <vector>

#include "spiral/common.hpp"

namespace spiral::bundle {

// Finite bivariate polynomial H(w, wbar) = sum c_{k,l} w^k wbar^l with
// complex coefficients, evaluated on the physical diagonal wbar = conj(w).
class PerturbationFn {
 public:
  using Terms = std::map<std::pair<int, int>, Complex>;

  PerturbationFn() = default;
  explicit PerturbationFn(Terms terms) : terms_(std::move(terms)) {}

  const Terms& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }
  int total_degree() const;

  Complex eval(Complex w) const;
  // Exact derivative in the first slot, on the diagonal.
  Complex d1(Complex w) const;

 private:
  Terms terms_;
};

// The planar drift system around a rotating wave under n translational
// symmetry-breaking perturbations centered at xi_1..xi_n:
//   p' = e^{it} [ v + sum_j lambda_j H_j((p - xi_j) e^{-it}, conj(.)) ].
struct CenterBundleSystem {
  Complex v;
  std::vector<Complex> centers;
  std::vector<PerturbationFn> perturbations;
  std::vector<double> lambda;

  int n() const { return static_cast<int>(centers.size()); }
  void validate() const;  // throws ConfigError
};

struct IntegratorOptions {
  double dt = kTwoPi / 4096.0;
  double escape_radius = 1e3;
  int max_degree = 16;
};

// Right-hand side in physical coordinates.
Complex rhs(const CenterBundleSystem& sys, Complex p, double t);

// Right-hand side in the co-rotating frame z = p - xi_1 + i e^{it} v.
Complex rhs_corotating(const CenterBundleSystem& sys, Complex z, double t);

Complex to_corotating(const CenterBundleSystem& sys, Complex p, double t);
Complex from_corotating(const CenterBundleSystem& sys, Complex z, double t);

struct Sample {
  double t;
  Complex p;
};

// Fixed-step RK4 trajectory of the physical system, sampled every dt.
std::vector<Sample> integrate(const CenterBundleSystem& sys, Complex p0, double t0,
                              double t1, double dt, double escape_radius = 1e3);

// Stroboscopic map over one forcing period in the co-rotating frame.
Complex period_map(const CenterBundleSystem& sys, Complex z0,
                   const IntegratorOptions& opts = {});

// alpha_j = D_1 H_j(-i v, i conj(v)), by exact polynomial differentiation.
Complex anchoring_coefficient(const CenterBundleSystem& sys, int j);

enum class WaveStability { anchoring, repelling, non_hyperbolic };

struct PeriodicOrbit {
  std::vector<Sample> samples;           // one period in physical coordinates
  Complex z_fixed;                       // fixed point of the period map
  std::array<Complex, 2> multipliers{};  // Floquet multipliers
  Complex center;                        // trapezoidal average of p(t)
  WaveStability stability = WaveStability::non_hyperbolic;
};

struct WaveSearchOptions {
  IntegratorOptions integrator;
  double newton_tol = 1e-10;
  int newton_max_iter = 50;
  double fd_step_rel = 1e-6;
  double hyperbolicity_tol = 1e-4;
};

// Newton search for a fixed point of the period map near the guess, with the
// converged orbit re-integrated in physical coordinates. Throws
// NumericalError on non-convergence, a singular Jacobian (near-fold), or a
// degenerate map (all of lambda effectively zero).
PeriodicOrbit find_perturbed_wave(const CenterBundleSystem& sys, Complex guess,
                                  const WaveSearchOptions& opts = {});

// Finite-difference monodromy eigenvalues of the period map at z_fixed.
std::array<Complex, 2> floquet_multipliers(const CenterBundleSystem& sys, Complex z_fixed,
                                           const WaveSearchOptions& opts = {});

WaveStability classify_multipliers(const std::array<Complex, 2>& multipliers,
                                   double hyperbolicity_tol = 1e-4);

}  // namespace spiral::bundle
