#include "spiral/center_bundle.hpp"

#include <algorithm>
#include <cmath>

namespace spiral::bundle {

namespace {

Complex cpow(Complex base, int n) {
  Complex r{1.0, 0.0};
  for (int i = 0; i < n; ++i) r *= base;
  return r;
}

bool finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

}  // namespace

int PerturbationFn::total_degree() const {
  int deg = 0;
  for (const auto& [kl, c] : terms_) {
    if (c != Complex{0.0, 0.0}) deg = std::max(deg, kl.first + kl.second);
  }
  return deg;
}

Complex PerturbationFn::eval(Complex w) const {
  const Complex wb = std::conj(w);
  Complex s{0.0, 0.0};
  for (const auto& [kl, c] : terms_) {
    s += c * cpow(w, kl.first) * cpow(wb, kl.second);
  }
  return s;
}

Complex PerturbationFn::d1(Complex w) const {
  const Complex wb = std::conj(w);
  Complex s{0.0, 0.0};
  for (const auto& [kl, c] : terms_) {
    if (kl.first > 0) {
      s += c * static_cast<double>(kl.first) * cpow(w, kl.first - 1) * cpow(wb, kl.second);
    }
  }
  return s;
}

void CenterBundleSystem::validate() const {
  if (centers.empty()) throw ConfigError("center bundle: need at least one center");
  if (perturbations.size() != centers.size() || lambda.size() != centers.size()) {
    throw ConfigError("center bundle: centers, perturbations and lambda sizes differ");
  }
  for (size_t i = 0; i < centers.size(); ++i) {
    for (size_t j = i + 1; j < centers.size(); ++j) {
      if (std::abs(centers[i] - centers[j]) < 1e-12) {
        throw ConfigError("center bundle: centers must be pairwise distinct");
      }
    }
  }
}

Complex rhs(const CenterBundleSystem& sys, Complex p, double t) {
  const Complex rot = std::polar(1.0, t);
  const Complex rot_inv = std::conj(rot);
  Complex accum = sys.v;
  for (int j = 0; j < sys.n(); ++j) {
    if (sys.lambda[j] == 0.0) continue;
    accum += sys.lambda[j] * sys.perturbations[j].eval((p - sys.centers[j]) * rot_inv);
  }
  const Complex out = rot * accum;
  if (!finite(out)) throw NumericalError("center bundle: perturbation overflow in rhs");
  return out;
}

Complex rhs_corotating(const CenterBundleSystem& sys, Complex z, double t) {
  const Complex rot = std::polar(1.0, t);
  const Complex rot_inv = std::conj(rot);
  const Complex iv = Complex{0.0, 1.0} * sys.v;
  Complex accum{0.0, 0.0};
  for (int j = 0; j < sys.n(); ++j) {
    if (sys.lambda[j] == 0.0) continue;
    const Complex zeta = sys.centers[j] - sys.centers[0];
    accum += sys.lambda[j] * sys.perturbations[j].eval((z - zeta) * rot_inv - iv);
  }
  const Complex out = rot * accum;
  if (!finite(out)) throw NumericalError("center bundle: perturbation overflow in rhs");
  return out;
}

Complex to_corotating(const CenterBundleSystem& sys, Complex p, double t) {
  return p - sys.centers[0] + Complex{0.0, 1.0} * std::polar(1.0, t) * sys.v;
}

Complex from_corotating(const CenterBundleSystem& sys, Complex z, double t) {
  return z + sys.centers[0] - Complex{0.0, 1.0} * std::polar(1.0, t) * sys.v;
}

namespace {

template <typename Rhs>
Complex rk4_step(const Rhs& f, Complex y, double t, double h) {
  const Complex k1 = f(y, t);
  const Complex k2 = f(y + 0.5 * h * k1, t + 0.5 * h);
  const Complex k3 = f(y + 0.5 * h * k2, t + 0.5 * h);
  const Complex k4 = f(y + h * k3, t + h);
  return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace

std::vector<Sample> integrate(const CenterBundleSystem& sys, Complex p0, double t0,
                              double t1, double dt, double escape_radius) {
  if (dt <= 0.0) throw ConfigError("integrate: dt must be positive");
  if (t1 <= t0) throw ConfigError("integrate: t1 must exceed t0");
  const int steps = std::max(1, static_cast<int>(std::llround((t1 - t0) / dt)));
  const double h = (t1 - t0) / steps;

  auto f = [&sys](Complex p, double t) { return rhs(sys, p, t); };

  std::vector<Sample> out;
  out.reserve(steps + 1);
  Complex p = p0;
  out.push_back({t0, p});
  for (int k = 0; k < steps; ++k) {
    const double t = t0 + k * h;
    p = rk4_step(f, p, t, h);
    if (!finite(p) || std::abs(p) > escape_radius) {
      throw NumericalError("integrate: trajectory escaped the configured radius");
    }
    out.push_back({t0 + (k + 1) * h, p});
  }
  return out;
}

Complex period_map(const CenterBundleSystem& sys, Complex z0, const IntegratorOptions& opts) {
  const int steps = std::max(1, static_cast<int>(std::llround(kTwoPi / opts.dt)));
  const double h = kTwoPi / steps;
  auto f = [&sys](Complex z, double t) { return rhs_corotating(sys, z, t); };
  Complex z = z0;
  for (int k = 0; k < steps; ++k) {
    z = rk4_step(f, z, k * h, h);
    if (!finite(z) || std::abs(z) > opts.escape_radius) {
      throw NumericalError("period_map: trajectory escaped the configured radius");
    }
  }
  return z;
}

Complex anchoring_coefficient(const CenterBundleSystem& sys, int j) {
  if (j < 0 || j >= sys.n()) throw ConfigError("anchoring_coefficient: index out of range");
  const Complex w0 = Complex{0.0, -1.0} * sys.v;  // -i v, with wbar slot = conj(-i v)
  return sys.perturbations[j].d1(w0);
}

WaveStability classify_multipliers(const std::array<Complex, 2>& multipliers,
                                   double hyperbolicity_tol) {
  const double m0 = std::abs(multipliers[0]);
  const double m1 = std::abs(multipliers[1]);
  if (std::abs(m0 - 1.0) <= hyperbolicity_tol || std::abs(m1 - 1.0) <= hyperbolicity_tol) {
    return WaveStability::non_hyperbolic;
  }
  if (m0 < 1.0 && m1 < 1.0) return WaveStability::anchoring;
  if (m0 > 1.0 && m1 > 1.0) return WaveStability::repelling;
  return WaveStability::non_hyperbolic;  // mixed moduli: not a wave of either kind
}

namespace {

// Real 2x2 Jacobian of the period map by central differences.
Mat2 period_map_jacobian(const CenterBundleSystem& sys, Complex z,
                         const WaveSearchOptions& opts) {
  const double h = opts.fd_step_rel * std::max(1.0, std::abs(z));
  const Complex px = (period_map(sys, z + Complex{h, 0.0}, opts.integrator) -
                      period_map(sys, z - Complex{h, 0.0}, opts.integrator)) /
                     (2.0 * h);
  const Complex py = (period_map(sys, z + Complex{0.0, h}, opts.integrator) -
                      period_map(sys, z - Complex{0.0, h}, opts.integrator)) /
                     (2.0 * h);
  return Mat2{px.real(), py.real(), px.imag(), py.imag()};
}

}  // namespace

std::array<Complex, 2> floquet_multipliers(const CenterBundleSystem& sys, Complex z_fixed,
                                           const WaveSearchOptions& opts) {
  return eigenvalues2(period_map_jacobian(sys, z_fixed, opts));
}

PeriodicOrbit find_perturbed_wave(const CenterBundleSystem& sys, Complex guess,
                                  const WaveSearchOptions& opts) {
  Complex z = guess;
  bool converged = false;
  for (int it = 0; it < opts.newton_max_iter; ++it) {
    const Complex g = period_map(sys, z, opts.integrator) - z;
    if (std::abs(g) <= opts.newton_tol) {
      converged = true;
      break;
    }
    const Mat2 dp = period_map_jacobian(sys, z, opts);
    const Mat2 jac = dp - Mat2::identity();
    // Threshold above the central-difference cancellation noise
    // (~eps |z| / h per entry).
    const double jac_scale =
        std::abs(jac.a) + std::abs(jac.b) + std::abs(jac.c) + std::abs(jac.d);
    if (jac_scale < 1e-8) {
      throw NumericalError(
          "find_perturbed_wave: Jacobian of the displacement is the zero matrix "
          "(every point is fixed; lambda = 0?)");
    }
    Vec2 step;
    try {
      step = solve2(jac, {g.real(), g.imag()});
    } catch (const NumericalError&) {
      throw NumericalError("find_perturbed_wave: singular Jacobian (near-fold)");
    }
    z -= Complex{step.x, step.y};
    if (!finite(z)) throw NumericalError("find_perturbed_wave: Newton iterate diverged");
  }
  if (!converged) {
    const Complex g = period_map(sys, z, opts.integrator) - z;
    if (std::abs(g) > opts.newton_tol) {
      throw NumericalError("find_perturbed_wave: no convergence (root not found)");
    }
  }

  // Degenerate-map guard: with an all-zero lambda every point is a fixed
  // point and the search is meaningless.
  {
    const Mat2 jac = period_map_jacobian(sys, z, opts) - Mat2::identity();
    const double jac_scale =
        std::abs(jac.a) + std::abs(jac.b) + std::abs(jac.c) + std::abs(jac.d);
    if (jac_scale < 1e-8) {
      throw NumericalError(
          "find_perturbed_wave: Jacobian of the displacement is the zero matrix "
          "(every point is fixed; lambda = 0?)");
    }
  }

  PeriodicOrbit orbit;
  orbit.z_fixed = z;
  orbit.multipliers = floquet_multipliers(sys, z, opts);
  orbit.stability = classify_multipliers(orbit.multipliers, opts.hyperbolicity_tol);

  const Complex p0 = from_corotating(sys, z, 0.0);
  orbit.samples = integrate(sys, p0, 0.0, kTwoPi, opts.integrator.dt,
                            opts.integrator.escape_radius);

  const double closure = std::abs(orbit.samples.back().p - orbit.samples.front().p);
  if (closure > 1e-7) {
    throw NumericalError("find_perturbed_wave: orbit failed to close after one period");
  }

  // Average value by the trapezoidal rule over the period.
  Complex sum{0.0, 0.0};
  const auto& s = orbit.samples;
  for (size_t k = 0; k + 1 < s.size(); ++k) {
    sum += 0.5 * (s[k].p + s[k + 1].p) * (s[k + 1].t - s[k].t);
  }
  orbit.center = sum / kTwoPi;
  return orbit;
}

}  // namespace spiral::bundle
