#include "spiral/planar_map.hpp"

#include <cmath>

namespace spiral::planar {

void MapSpec::validate(double tol) const {
  if (field_origin.is_zero()) {
    throw ConfigError("map spec: origin field is identically zero");
  }
  if (field_xi.is_zero()) {
    throw ConfigError("map spec: xi field is identically zero");
  }
  if (xi.norm() == 0.0) {
    throw ConfigError("map spec: xi must be nonzero");
  }
  if (field_origin.eval({0.0, 0.0}).norm() > tol) {
    throw ConfigError("map spec: origin field does not vanish at 0");
  }
  if (field_xi.eval(xi).norm() > tol) {
    throw ConfigError("map spec: xi field does not vanish at xi");
  }
  if (corr_origin && corr_origin->eval({0.0, 0.0}).norm() > tol) {
    throw ConfigError("map spec: origin correction does not vanish at 0");
  }
  if (corr_xi && corr_xi->eval(xi).norm() > tol) {
    throw ConfigError("map spec: xi correction does not vanish at xi");
  }
  for (const auto& field : {&field_origin, &field_xi}) {
    if (const auto& env = field->envelope(); env && env->rate > 0.0) {
      throw ConfigError("map spec: envelope rate must be <= 0");
    }
  }
}

Vec2 eval_map(const MapSpec& spec, const Vec2& x, const Vec2& lam) {
  return x + kTwoPi * (lam.x * spec.field_origin.eval(x) + lam.y * spec.field_xi.eval(x));
}

Vec2 eval_map_circle(const MapSpec& spec, const Vec2& x, double s, double rho) {
  return eval_map(spec, x, {rho * std::cos(s), rho * std::sin(s)});
}

Vec2 eval_map_general(const MapSpec& spec, const Vec2& x, const Vec2& lam) {
  Vec2 accum = lam.x * spec.field_origin.eval(x) + lam.y * spec.field_xi.eval(x);
  if (spec.corr_origin) accum += lam.x * lam.x * spec.corr_origin->eval(x);
  if (spec.corr_xi) accum += lam.y * lam.y * spec.corr_xi->eval(x);
  if (spec.cross) accum += lam.x * lam.y * spec.cross->eval(x);
  return x + kTwoPi * accum;
}

Mat2 map_jacobian_x(const MapSpec& spec, const Vec2& x, const Vec2& lam) {
  return lam.x * spec.field_origin.jacobian(x) + lam.y * spec.field_xi.jacobian(x);
}

Mat2 map_general_jacobian_x(const MapSpec& spec, const Vec2& x, const Vec2& lam) {
  Mat2 m = map_jacobian_x(spec, x, lam);
  if (spec.corr_origin) m = m + lam.x * lam.x * spec.corr_origin->jacobian(x);
  if (spec.corr_xi) m = m + lam.y * lam.y * spec.corr_xi->jacobian(x);
  if (spec.cross) m = m + lam.x * lam.y * spec.cross->jacobian(x);
  return m;
}

Mat2 site_matrix(const MapSpec& spec, const Vec2& x) {
  return Mat2::from_columns(spec.field_origin.eval(x), spec.field_xi.eval(x));
}

Mat2 site_matrix_general(const MapSpec& spec, const Vec2& x, const Vec2& lam) {
  Vec2 c1 = spec.field_origin.eval(x);
  Vec2 c2 = spec.field_xi.eval(x);
  if (spec.corr_origin) c1 += lam.x * spec.corr_origin->eval(x);
  if (spec.corr_xi) c2 += lam.y * spec.corr_xi->eval(x);
  if (spec.cross) {
    const Vec2 j = spec.cross->eval(x);
    c1 += 0.5 * lam.y * j;
    c2 += 0.5 * lam.x * j;
  }
  return Mat2::from_columns(c1, c2);
}

QuadForm quad_form(const MapSpec& spec, const Vec2& x) {
  const Mat2 df = spec.field_origin.jacobian(x);
  const Mat2 dg = spec.field_xi.jacobian(x);
  QuadForm q;
  q.b = df.det();
  q.e = dg.det();
  // det(lam1 DF + lam2 DG) = lam1^2 B + lam1 lam2 C + lam2^2 E
  q.c = df.a * dg.d - df.b * dg.c + dg.a * df.d - dg.b * df.c;
  return q;
}

double fold_function(const MapSpec& spec, int row, const Vec2& x) {
  const Mat2 a = site_matrix(spec, x);
  const Vec2 r = a.row(row);
  const QuadForm q = quad_form(spec, x);
  return r.y * r.y * q.b - r.x * r.y * q.c + r.x * r.x * q.e;
}

double det_site_matrix(const MapSpec& spec, const Vec2& x) {
  return site_matrix(spec, x).det();
}

Vec2 det_site_matrix_grad(const MapSpec& spec, const Vec2& x) {
  const Vec2 f = spec.field_origin.eval(x);
  const Vec2 g = spec.field_xi.eval(x);
  const Mat2 df = spec.field_origin.jacobian(x);
  const Mat2 dg = spec.field_xi.jacobian(x);
  // det A = F1 G2 - F2 G1
  return {df.a * g.y + f.x * dg.c - df.c * g.x - f.y * dg.a,
          df.b * g.y + f.x * dg.d - df.d * g.x - f.y * dg.b};
}

namespace {

// Gradient of det of a Jacobian-style matrix whose rows are gradients of two
// scalar functions with Hessians h1, h2: M = [[p, q], [r, s]], det = ps - qr.
Vec2 det_jac_grad(const Mat2& m, const std::array<double, 3>& h1,
                  const std::array<double, 3>& h2) {
  return {h1[0] * m.d + m.a * h2[1] - h1[1] * m.c - m.b * h2[0],
          h1[1] * m.d + m.a * h2[2] - h1[2] * m.c - m.b * h2[1]};
}

}  // namespace

Vec2 fold_function_grad(const MapSpec& spec, int row, const Vec2& x) {
  const Mat2 a = site_matrix(spec, x);
  const Vec2 r = a.row(row);
  const QuadForm q = quad_form(spec, x);

  const Mat2 df = spec.field_origin.jacobian(x);
  const Mat2 dg = spec.field_xi.jacobian(x);
  const auto hf1 = spec.field_origin.hessian(0, x);
  const auto hf2 = spec.field_origin.hessian(1, x);
  const auto hg1 = spec.field_xi.hessian(0, x);
  const auto hg2 = spec.field_xi.hessian(1, x);

  const Vec2 grad_b = det_jac_grad(df, hf1, hf2);
  const Vec2 grad_e = det_jac_grad(dg, hg1, hg2);
  // C = det[[F1_x, F1_y], [G2_x, G2_y]] + det[[G1_x, G1_y], [F2_x, F2_y]]
  const Mat2 m1{df.a, df.b, dg.c, dg.d};
  const Mat2 m2{dg.a, dg.b, df.c, df.d};
  const Vec2 grad_c = det_jac_grad(m1, hf1, hg2) + det_jac_grad(m2, hg1, hf2);

  const Vec2 grad_a1 = df.row(row);  // gradient of F_row
  const Vec2 grad_a2 = dg.row(row);  // gradient of G_row

  return 2.0 * r.y * q.b * grad_a2 + r.y * r.y * grad_b
       - (r.y * grad_a1 + r.x * grad_a2) * q.c - r.x * r.y * grad_c
       + 2.0 * r.x * q.e * grad_a1 + r.x * r.x * grad_e;
}

namespace {

RotationalFormCheck rotational_check(const Mat2& jac) {
  RotationalFormCheck chk;
  chk.jac = jac;
  const double scale = std::abs(jac.a) + std::abs(jac.b) + std::abs(jac.c) + std::abs(jac.d);
  const double tol = 1e-9 * std::max(1.0, scale);
  chk.rotational = std::abs(jac.a - jac.d) <= tol && std::abs(jac.b + jac.c) <= tol;
  chk.a = (jac.a + jac.d) / 2.0;
  chk.b = (jac.c - jac.b) / 2.0;
  return chk;
}

bool same_side_of_unit_circle(const std::array<Complex, 2>& eig, double tol = 1e-12) {
  const double m0 = std::abs(eig[0]);
  const double m1 = std::abs(eig[1]);
  return (m0 > 1.0 + tol && m1 > 1.0 + tol) || (m0 < 1.0 - tol && m1 < 1.0 - tol);
}

}  // namespace

SiteConditionsReport check_site_conditions(const MapSpec& spec, double omega, int samples) {
  SiteConditionsReport rep;
  const Vec2 origin{0.0, 0.0};

  for (int k = 1; k <= samples; ++k) {
    const double lam = omega * (2.0 * k - samples - 1) / samples;  // spans (-omega, omega)
    if (lam == 0.0) continue;
    rep.p1_max_residual = std::max(rep.p1_max_residual,
                                   (eval_map(spec, origin, {lam, 0.0}) - origin).norm());
    rep.p1_max_residual = std::max(rep.p1_max_residual,
                                   (eval_map(spec, spec.xi, {0.0, lam}) - spec.xi).norm());

    const Mat2 j0 = Mat2::identity() + kTwoPi * lam * spec.field_origin.jacobian(origin);
    const Mat2 jxi = Mat2::identity() + kTwoPi * lam * spec.field_xi.jacobian(spec.xi);
    rep.p2_origin_same_side = rep.p2_origin_same_side && same_side_of_unit_circle(eigenvalues2(j0));
    rep.p2_xi_same_side = rep.p2_xi_same_side && same_side_of_unit_circle(eigenvalues2(jxi));
  }

  rep.eig_origin_sample = eigenvalues2(
      Mat2::identity() + kTwoPi * (omega / 2.0) * spec.field_origin.jacobian(origin));
  rep.eig_xi_sample = eigenvalues2(
      Mat2::identity() + kTwoPi * (omega / 2.0) * spec.field_xi.jacobian(spec.xi));
  rep.origin_form = rotational_check(spec.field_origin.jacobian(origin));
  rep.xi_form = rotational_check(spec.field_xi.jacobian(spec.xi));
  return rep;
}

}  // namespace spiral::planar
