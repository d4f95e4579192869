#pragma once

#include <optional>
#include <vector>

#include "spiral/planar_field.hpp"

namespace spiral::planar {

// A two-parameter fixed-point map around two anchoring sites 0 and xi:
//   P(x, lam)    = x + 2*pi * [lam1 * F(x) + lam2 * G(x)]
// with F vanishing at the origin and G vanishing at xi. The optional
// lambda-linear corrections and the cross term define the general map
//   Pg(x, lam) = x + 2*pi * [lam1 * (F + lam1*Fc) + lam1*lam2 * J
//                            + lam2 * (G + lam2*Gc)].
struct MapSpec {
  Vec2 xi;
  PlanarField field_origin;  // F: fixes the origin
  PlanarField field_xi;      // G: fixes xi

  // General-map parts (empty when absent).
  std::optional<PlanarField> corr_origin;  // Fc, enters as lam1 * Fc
  std::optional<PlanarField> corr_xi;      // Gc, enters as lam2 * Gc
  std::optional<PlanarField> cross;        // J,  enters as lam1 * lam2 * J

  bool has_general_parts() const {
    return corr_origin.has_value() || corr_xi.has_value() || cross.has_value();
  }

  // Checks site conditions F(0)=0, G(xi)=0 (and Fc(0)=0, Gc(xi)=0 when
  // present) and non-trivial fields. Throws ConfigError on violation.
  void validate(double tol = 1e-9) const;
};

// --- Map evaluation -------------------------------------------------------

Vec2 eval_map(const MapSpec& spec, const Vec2& x, const Vec2& lam);

// Restriction of the parameter to the circle lam = rho * (cos s, sin s).
Vec2 eval_map_circle(const MapSpec& spec, const Vec2& x, double s, double rho);

Vec2 eval_map_general(const MapSpec& spec, const Vec2& x, const Vec2& lam);

// d/dx of P(., lam) minus identity, divided by 2*pi:
// lam1 * DF(x) + lam2 * DG(x) (general version includes the corrections).
Mat2 map_jacobian_x(const MapSpec& spec, const Vec2& x, const Vec2& lam);
Mat2 map_general_jacobian_x(const MapSpec& spec, const Vec2& x, const Vec2& lam);

// --- Site matrix and fold algebra -----------------------------------------

// A(x) = [F(x) | G(x)]: x is a fixed point of P(., lam) iff A(x) lam = 0.
Mat2 site_matrix(const MapSpec& spec, const Vec2& x);

// General-map analogue: Ag(x, lam) = [F + lam1*Fc + (lam2/2) J | (lam1/2) J
// + G + lam2*Gc], satisfying 2*pi * Ag(x, lam) lam = Pg(x, lam) - x.
Mat2 site_matrix_general(const MapSpec& spec, const Vec2& x, const Vec2& lam);

// Coefficients of the fold quadratic form Q(x) = [[B, C/2], [C/2, E]]:
// det(lam1 DF + lam2 DG) = lam^T Q(x) lam.
struct QuadForm {
  double b = 0.0;  // det DF
  double c = 0.0;  // mixed determinant term
  double e = 0.0;  // det DG
};

QuadForm quad_form(const MapSpec& spec, const Vec2& x);

// Fold bifurcation function of row j (j in {0, 1}):
// Gamma_j = A_j2^2 B - A_j1 A_j2 C + A_j1^2 E.
double fold_function(const MapSpec& spec, int row, const Vec2& x);

// Analytic gradients (used by the visual-criterion refinement).
double det_site_matrix(const MapSpec& spec, const Vec2& x);
Vec2 det_site_matrix_grad(const MapSpec& spec, const Vec2& x);
Vec2 fold_function_grad(const MapSpec& spec, int row, const Vec2& x);

// --- Site condition probe (P1/P2 style report) ----------------------------

struct RotationalFormCheck {
  Mat2 jac;          // DF(0) or DG(xi)
  bool rotational = false;  // matches [[a, -b], [b, a]]
  double a = 0.0;
  double b = 0.0;
};

struct SiteConditionsReport {
  double p1_max_residual = 0.0;      // max |P(eta, Lam_eta) - eta| over samples
  bool p2_origin_same_side = true;   // both eigenvalue moduli on one side of 1
  bool p2_xi_same_side = true;
  std::array<Complex, 2> eig_origin_sample;  // at lam = (omega/2, 0)
  std::array<Complex, 2> eig_xi_sample;      // at lam = (0, omega/2)
  RotationalFormCheck origin_form;
  RotationalFormCheck xi_form;
};

SiteConditionsReport check_site_conditions(const MapSpec& spec, double omega,
                                           int samples = 16);

}  // namespace spiral::planar
