#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "spiral/planar_map.hpp"
#include "test_specs.hpp"

using namespace spiral;
using namespace spiral::planar;

namespace {

Mat2 fd_jacobian(const PlanarField& f, const Vec2& x, double h = 1e-5) {
  const Vec2 dx = (f.eval({x.x + h, x.y}) - f.eval({x.x - h, x.y})) / (2.0 * h);
  const Vec2 dy = (f.eval({x.x, x.y + h}) - f.eval({x.x, x.y - h})) / (2.0 * h);
  return Mat2::from_columns(dx, dy);
}

double rel_err(double got, double want) {
  return std::abs(got - want) / std::max(1.0, std::abs(want));
}

}  // namespace

TEST_CASE("planar field jacobian matches central differences") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> coord(-4.0, 4.0);

  const auto specs = {testspecs::eb_map(), testspecs::example1(), testspecs::example5()};
  for (const auto& spec : specs) {
    for (const auto* field : {&spec.field_origin, &spec.field_xi}) {
      for (int trial = 0; trial < 1000; ++trial) {
        const Vec2 x{coord(rng), coord(rng)};
        const Mat2 exact = field->jacobian(x);
        const Mat2 fd = fd_jacobian(*field, x);
        const double scale = std::max({1.0, std::abs(exact.a), std::abs(exact.b),
                                       std::abs(exact.c), std::abs(exact.d)});
        CHECK(std::abs(exact.a - fd.a) / scale < 1e-6);
        CHECK(std::abs(exact.b - fd.b) / scale < 1e-6);
        CHECK(std::abs(exact.c - fd.c) / scale < 1e-6);
        CHECK(std::abs(exact.d - fd.d) / scale < 1e-6);
      }
    }
  }
}

TEST_CASE("planar field hessian matches central differences of the jacobian") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> coord(-3.0, 3.0);
  const auto spec = testspecs::example1();  // envelopes exercise the product rule
  const double h = 1e-5;

  for (const auto* field : {&spec.field_origin, &spec.field_xi}) {
    for (int trial = 0; trial < 200; ++trial) {
      const Vec2 x{coord(rng), coord(rng)};
      for (int comp = 0; comp < 2; ++comp) {
        const auto hess = field->hessian(comp, x);
        const Mat2 jxp = field->jacobian({x.x + h, x.y});
        const Mat2 jxm = field->jacobian({x.x - h, x.y});
        const Mat2 jyp = field->jacobian({x.x, x.y + h});
        const Mat2 jym = field->jacobian({x.x, x.y - h});
        const double f11 = ((comp == 0 ? jxp.a : jxp.c) - (comp == 0 ? jxm.a : jxm.c)) / (2 * h);
        const double f12 = ((comp == 0 ? jyp.a : jyp.c) - (comp == 0 ? jym.a : jym.c)) / (2 * h);
        const double f22 = ((comp == 0 ? jyp.b : jyp.d) - (comp == 0 ? jym.b : jym.d)) / (2 * h);
        CHECK(rel_err(hess[0], f11) < 1e-5);
        CHECK(rel_err(hess[1], f12) < 1e-5);
        CHECK(rel_err(hess[2], f22) < 1e-5);
      }
    }
  }
}

TEST_CASE("map evaluation basics") {
  const auto spec = testspecs::eb_map();
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> coord(-5.0, 5.0);

  SUBCASE("P(x, 0) = x") {
    for (int trial = 0; trial < 50; ++trial) {
      const Vec2 x{coord(rng), coord(rng)};
      const Vec2 p = eval_map(spec, x, {0.0, 0.0});
      CHECK(p.x == doctest::Approx(x.x));
      CHECK(p.y == doctest::Approx(x.y));
    }
  }
  SUBCASE("sites stay fixed on their axes") {
    const Vec2 p0 = eval_map(spec, {0.0, 0.0}, {0.01, 0.0});
    CHECK(p0.norm() == doctest::Approx(0.0));
    const Vec2 pxi = eval_map(spec, spec.xi, {0.0, 0.01});
    CHECK((pxi - spec.xi).norm() == doctest::Approx(0.0));
  }
  SUBCASE("circle restriction agrees with the plain map") {
    for (int trial = 0; trial < 50; ++trial) {
      const Vec2 x{coord(rng), coord(rng)};
      const double s = coord(rng);
      const double rho = 0.01;
      const Vec2 a = eval_map_circle(spec, x, s, rho);
      const Vec2 b = eval_map(spec, x, {rho * std::cos(s), rho * std::sin(s)});
      CHECK((a - b).norm() < 1e-15);
    }
  }
}

TEST_CASE("site matrix and fixed-point algebra") {
  const auto spec = testspecs::eb_map();
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> coord(-5.0, 5.0);

  SUBCASE("columns vanish at the sites") {
    const Mat2 a0 = site_matrix(spec, {0.0, 0.0});
    CHECK(a0.col(0).norm() == doctest::Approx(0.0));
    CHECK(a0.det() == doctest::Approx(0.0));
    const Mat2 axi = site_matrix(spec, spec.xi);
    CHECK(axi.col(1).norm() == doctest::Approx(0.0));
    CHECK(axi.det() == doctest::Approx(0.0));
  }
  SUBCASE("A(x) lam reproduces the displacement") {
    for (int trial = 0; trial < 500; ++trial) {
      const Vec2 x{coord(rng), coord(rng)};
      const Vec2 lam{coord(rng) / 10.0, coord(rng) / 10.0};
      const Vec2 lhs = kTwoPi * (site_matrix(spec, x) * lam);
      const Vec2 rhs = eval_map(spec, x, lam) - x;
      CHECK((lhs - rhs).norm() < 1e-12 * std::max(1.0, rhs.norm()));
    }
  }
}

TEST_CASE("general map reduction and identity") {
  const auto spec = testspecs::eb_revisited();
  const auto trunc = testspecs::eb_map();
  std::mt19937 rng(9);
  std::uniform_real_distribution<double> coord(-4.0, 4.0);

  SUBCASE("lam = 0 is the identity") {
    const Vec2 x{1.3, -0.4};
    const Vec2 p = eval_map_general(spec, x, {0.0, 0.0});
    CHECK((p - x).norm() == doctest::Approx(0.0));
  }
  SUBCASE("origin stays fixed on the lam1 axis") {
    const Vec2 p = eval_map_general(spec, {0.0, 0.0}, {0.02, 0.0});
    CHECK(p.norm() == doctest::Approx(0.0));
  }
  SUBCASE("reduces to the truncated map when corrections vanish") {
    for (int trial = 0; trial < 50; ++trial) {
      const Vec2 x{coord(rng), coord(rng)};
      const Vec2 lam{coord(rng) / 50.0, coord(rng) / 50.0};
      const Vec2 a = eval_map_general(trunc, x, lam);
      const Vec2 b = eval_map(trunc, x, lam);
      CHECK((a - b).norm() < 1e-14 * std::max(1.0, b.norm()));
    }
  }
  SUBCASE("2 pi Ag(x, lam) lam = Pg(x, lam) - x") {
    for (int trial = 0; trial < 200; ++trial) {
      const Vec2 x{coord(rng), coord(rng)};
      const Vec2 lam{coord(rng) / 20.0, coord(rng) / 20.0};
      const Vec2 lhs = kTwoPi * (site_matrix_general(spec, x, lam) * lam);
      const Vec2 rhs = eval_map_general(spec, x, lam) - x;
      CHECK((lhs - rhs).norm() <= 1e-12 * std::max(1.0, rhs.norm()));
    }
  }
  SUBCASE("general site matrix at lam = 0 is the truncated one") {
    const Vec2 x{0.7, 2.1};
    const Mat2 ag = site_matrix_general(spec, x, {0.0, 0.0});
    const Mat2 at = site_matrix(spec, x);
    CHECK(std::abs(ag.a - at.a) < 1e-15);
    CHECK(std::abs(ag.b - at.b) < 1e-15);
    CHECK(std::abs(ag.c - at.c) < 1e-15);
    CHECK(std::abs(ag.d - at.d) < 1e-15);
  }
}

TEST_CASE("fold quadratic form") {
  const auto spec = testspecs::eb_map();
  std::mt19937 rng(13);
  std::uniform_real_distribution<double> coord(-5.0, 5.0);

  SUBCASE("B at the origin is the determinant of the linear part") {
    CHECK(quad_form(spec, {0.0, 0.0}).b == doctest::Approx(5.0));
  }
  SUBCASE("E at xi matches the hand-computed Jacobian") {
    const Mat2 dg = spec.field_xi.jacobian(spec.xi);
    CHECK(dg.a == doctest::Approx(-3.0));
    CHECK(dg.b == doctest::Approx(-0.5));
    CHECK(dg.c == doctest::Approx(0.5));
    CHECK(dg.d == doctest::Approx(-3.0));
    CHECK(quad_form(spec, spec.xi).e == doctest::Approx(9.25));
  }
  SUBCASE("pure axis evaluates the diagonal entries") {
    const Vec2 x{1.1, -0.7};
    const QuadForm q = quad_form(spec, x);
    const Mat2 m = map_jacobian_x(spec, x, {1.0, 0.0});
    CHECK(m.det() == doctest::Approx(q.b));
  }
  SUBCASE("fold identity: det(lam1 DF + lam2 DG) = lam^T Q lam") {
    for (int trial = 0; trial < 300; ++trial) {
      const Vec2 x{coord(rng), coord(rng)};
      const Vec2 lam{coord(rng), coord(rng)};
      const QuadForm q = quad_form(spec, x);
      const double quad =
          lam.x * lam.x * q.b + lam.x * lam.y * q.c + lam.y * lam.y * q.e;
      const double det = map_jacobian_x(spec, x, lam).det();
      CHECK(std::abs(det - quad) <= 1e-9 * std::max(1.0, std::abs(det)));
    }
  }
}

TEST_CASE("fold bifurcation function") {
  const auto spec = testspecs::eb_map();
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> coord(-5.0, 5.0);

  SUBCASE("kernel-direction evaluation is algebraically identical") {
    for (int trial = 0; trial < 300; ++trial) {
      const Vec2 x{coord(rng), coord(rng)};
      for (int row = 0; row < 2; ++row) {
        const Vec2 r = site_matrix(spec, x).row(row);
        const Vec2 lam{r.y, -r.x};  // kernel direction of row
        const QuadForm q = quad_form(spec, x);
        const double quad =
            lam.x * lam.x * q.b + lam.x * lam.y * q.c + lam.y * lam.y * q.e;
        const double gamma = fold_function(spec, row, x);
        CHECK(std::abs(gamma - quad) <= 1e-10 * std::max(1.0, std::abs(gamma)));
      }
    }
  }
  SUBCASE("analytic gradients match central differences") {
    for (int trial = 0; trial < 200; ++trial) {
      const Vec2 x{coord(rng), coord(rng)};
      const double h = 1e-6;
      const Vec2 gd = det_site_matrix_grad(spec, x);
      const double fdx =
          (det_site_matrix(spec, {x.x + h, x.y}) - det_site_matrix(spec, {x.x - h, x.y})) /
          (2 * h);
      const double fdy =
          (det_site_matrix(spec, {x.x, x.y + h}) - det_site_matrix(spec, {x.x, x.y - h})) /
          (2 * h);
      CHECK(std::abs(gd.x - fdx) <= 1e-5 * std::max(1.0, std::abs(fdx)));
      CHECK(std::abs(gd.y - fdy) <= 1e-5 * std::max(1.0, std::abs(fdy)));
      for (int row = 0; row < 2; ++row) {
        const Vec2 gg = fold_function_grad(spec, row, x);
        const double gx = (fold_function(spec, row, {x.x + h, x.y}) -
                           fold_function(spec, row, {x.x - h, x.y})) /
                          (2 * h);
        const double gy = (fold_function(spec, row, {x.x, x.y + h}) -
                           fold_function(spec, row, {x.x, x.y - h})) /
                          (2 * h);
        CHECK(std::abs(gg.x - gx) <= 1e-4 * std::max(1.0, std::abs(gx)));
        CHECK(std::abs(gg.y - gy) <= 1e-4 * std::max(1.0, std::abs(gy)));
      }
    }
  }
}

TEST_CASE("site condition probe on the EB map") {
  const auto spec = testspecs::eb_map();
  const auto rep = check_site_conditions(spec, 12.0 / (37.0 * kPi));

  CHECK(rep.p1_max_residual == doctest::Approx(0.0));
  CHECK(rep.origin_form.rotational);
  CHECK(rep.origin_form.a == doctest::Approx(2.0));
  CHECK(rep.origin_form.b == doctest::Approx(1.0));
  CHECK(rep.xi_form.rotational);
  CHECK(rep.xi_form.a == doctest::Approx(-3.0));
  CHECK(rep.xi_form.b == doctest::Approx(0.5));
  CHECK(rep.p2_origin_same_side);
  CHECK(rep.p2_xi_same_side);
}

TEST_CASE("map spec validation rejects broken inputs") {
  auto spec = testspecs::eb_map();
  CHECK_NOTHROW(spec.validate());

  MapSpec empty = spec;
  empty.field_origin = PlanarField{{0.0, 0.0}, {}, {}};
  CHECK_THROWS_AS(empty.validate(), ConfigError);

  MapSpec shifted = spec;
  shifted.field_origin = PlanarField{{0.0, 0.0}, {{{0, 0}, 0.5}, {{1, 0}, 2.0}},
                                     {{{0, 1}, 2.0}}};
  CHECK_THROWS_AS(shifted.validate(), ConfigError);
}
