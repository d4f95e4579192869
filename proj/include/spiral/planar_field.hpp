#pragma once

#include <map>
#include <optional>
#include <utility>

#include "spiral/common.hpp"

namespace spiral::planar {

// Monomial exponents (i, j) for y1^i * y2^j.
using Exponents = std::pair<int, int>;
using CoeffTable = std::map<Exponents, double>;

// Optional Gaussian factor exp(rate * |x - center|^2), rate <= 0.
struct GaussianEnvelope {
  double rate = 0.0;
  Vec2 center;
};

// Planar vector field: two bivariate polynomials in y = x - base, times an
// optional shared Gaussian envelope. Evaluation, Jacobian and Hessian are
// all analytic.
class PlanarField {
 public:
  PlanarField() = default;
  PlanarField(Vec2 base, CoeffTable comp1, CoeffTable comp2,
              std::optional<GaussianEnvelope> envelope = std::nullopt)
      : base_(base), comps_{std::move(comp1), std::move(comp2)}, envelope_(envelope) {}

  const Vec2& base() const { return base_; }
  const CoeffTable& component(int k) const { return comps_[k]; }
  const std::optional<GaussianEnvelope>& envelope() const { return envelope_; }

  bool is_zero() const { return comps_[0].empty() && comps_[1].empty(); }
  int total_degree() const;

  Vec2 eval(const Vec2& x) const;
  Mat2 jacobian(const Vec2& x) const;

  // Second partials of component k: [f_11, f_12, f_22].
  std::array<double, 3> hessian(int k, const Vec2& x) const;

 private:
  // Polynomial part and its first/second partials in y-coordinates.
  double poly(int k, const Vec2& y) const;
  Vec2 poly_grad(int k, const Vec2& y) const;
  std::array<double, 3> poly_hess(int k, const Vec2& y) const;

  Vec2 base_;
  std::array<CoeffTable, 2> comps_;
  std::optional<GaussianEnvelope> envelope_;
};

}  // namespace spiral::planar
