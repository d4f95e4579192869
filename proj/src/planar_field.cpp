#include "spiral/planar_field.hpp"

#include <algorithm>
#include <cmath>

namespace spiral::planar {

namespace {

double ipow(double v, int n) {
  double r = 1.0;
  for (int i = 0; i < n; ++i) r *= v;
  return r;
}

}  // namespace

int PlanarField::total_degree() const {
  int deg = 0;
  for (const auto& comp : comps_) {
    for (const auto& [ij, c] : comp) {
      if (c != 0.0) deg = std::max(deg, ij.first + ij.second);
    }
  }
  return deg;
}

double PlanarField::poly(int k, const Vec2& y) const {
  double s = 0.0;
  for (const auto& [ij, c] : comps_[k]) {
    s += c * ipow(y.x, ij.first) * ipow(y.y, ij.second);
  }
  return s;
}

Vec2 PlanarField::poly_grad(int k, const Vec2& y) const {
  Vec2 g;
  for (const auto& [ij, c] : comps_[k]) {
    const auto [i, j] = ij;
    if (i > 0) g.x += c * i * ipow(y.x, i - 1) * ipow(y.y, j);
    if (j > 0) g.y += c * j * ipow(y.x, i) * ipow(y.y, j - 1);
  }
  return g;
}

std::array<double, 3> PlanarField::poly_hess(int k, const Vec2& y) const {
  double h11 = 0.0, h12 = 0.0, h22 = 0.0;
  for (const auto& [ij, c] : comps_[k]) {
    const auto [i, j] = ij;
    if (i > 1) h11 += c * i * (i - 1) * ipow(y.x, i - 2) * ipow(y.y, j);
    if (i > 0 && j > 0) h12 += c * i * j * ipow(y.x, i - 1) * ipow(y.y, j - 1);
    if (j > 1) h22 += c * j * (j - 1) * ipow(y.x, i) * ipow(y.y, j - 2);
  }
  return {h11, h12, h22};
}

Vec2 PlanarField::eval(const Vec2& x) const {
  const Vec2 y = x - base_;
  Vec2 v{poly(0, y), poly(1, y)};
  if (envelope_) {
    const Vec2 d = x - envelope_->center;
    v = v * std::exp(envelope_->rate * d.norm2());
  }
  return v;
}

Mat2 PlanarField::jacobian(const Vec2& x) const {
  const Vec2 y = x - base_;
  const Vec2 g0 = poly_grad(0, y);
  const Vec2 g1 = poly_grad(1, y);
  if (!envelope_) {
    return {g0.x, g0.y, g1.x, g1.y};
  }
  const Vec2 d = x - envelope_->center;
  const double env = std::exp(envelope_->rate * d.norm2());
  const Vec2 env_grad = 2.0 * envelope_->rate * d;  // times env below
  const double p0 = poly(0, y);
  const double p1 = poly(1, y);
  return Mat2{env * (g0.x + p0 * env_grad.x), env * (g0.y + p0 * env_grad.y),
              env * (g1.x + p1 * env_grad.x), env * (g1.y + p1 * env_grad.y)};
}

std::array<double, 3> PlanarField::hessian(int k, const Vec2& x) const {
  const Vec2 y = x - base_;
  const auto hp = poly_hess(k, y);
  if (!envelope_) return hp;

  const Vec2 d = x - envelope_->center;
  const double a = envelope_->rate;
  const double env = std::exp(a * d.norm2());
  const double p = poly(k, y);
  const Vec2 g = poly_grad(k, y);
  // H(p*env) = env * [Hp + 2a (grad p d^T + d grad p^T) + p (2a I + 4a^2 d d^T)]
  const double h11 = hp[0] + 4.0 * a * g.x * d.x + p * (2.0 * a + 4.0 * a * a * d.x * d.x);
  const double h12 = hp[1] + 2.0 * a * (g.x * d.y + g.y * d.x) + p * 4.0 * a * a * d.x * d.y;
  const double h22 = hp[2] + 4.0 * a * g.y * d.y + p * (2.0 * a + 4.0 * a * a * d.y * d.y);
  return {env * h11, env * h12, env * h22};
}

}  // namespace spiral::planar
