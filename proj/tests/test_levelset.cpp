#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "spiral/continuation.hpp"
#include "spiral/levelset.hpp"
#include "test_specs.hpp"

using namespace spiral;
using namespace spiral::planar;

TEST_CASE("marching squares on a circle") {
  const auto f = [](Vec2 x) { return x.norm2() - 4.0; };
  Window w{-5, 5, -5, 5};
  LevelsetOptions opts;
  opts.resolution = 200;
  const auto curves = extract_levelset_fn(f, w, opts);
  REQUIRE(curves.size() == 1);
  CHECK(curves[0].closed);
  CHECK(curves[0].points.size() > 100);
  for (const auto& p : curves[0].points) {
    CHECK(std::abs(f(p)) <= 1e-10);
  }
}

TEST_CASE("marching squares through a saddle") {
  // f = x*y has an ambiguous cell at the origin; subdivision keeps the
  // vertices on the zero set.
  const auto f = [](Vec2 x) { return x.x * x.y; };
  Window w{-1, 1, -1, 1};
  LevelsetOptions opts;
  opts.resolution = 41;  // odd: the origin falls inside a cell
  const auto curves = extract_levelset_fn(f, w, opts);
  size_t total = 0;
  for (const auto& c : curves) {
    total += c.points.size();
    for (const auto& p : c.points) {
      CHECK(std::abs(f(p)) <= 1e-10);
    }
  }
  CHECK(total > 40);
}

TEST_CASE("EB map level curves") {
  const auto spec = testspecs::eb_map();
  Window w{-8, 8, -8, 8};
  LevelsetOptions opts;

  SUBCASE("kappa: C0 closed, Cxi exits the window") {
    const auto curves = extract_levelset(spec, CurveKind::kappa, w, opts);
    const LevelCurve* c0 = nullptr;
    const LevelCurve* cxi = nullptr;
    for (const auto& c : curves) {
      if (c.through_origin) c0 = &c;
      if (c.through_xi) cxi = &c;
    }
    REQUIRE(c0 != nullptr);
    REQUIRE(cxi != nullptr);
    CHECK(c0 != cxi);
    CHECK(c0->closed);
    CHECK_FALSE(cxi->closed);
    for (const auto& c : curves) {
      for (const auto& p : c.points) {
        CHECK(std::abs(det_site_matrix(spec, p)) <= 1e-10);
      }
    }
  }

  SUBCASE("fold-function curves satisfy the refinement contract") {
    const auto curves = extract_levelset(spec, CurveKind::fold1, w, opts);
    CHECK(!curves.empty());
    for (const auto& c : curves) {
      for (const auto& p : c.points) {
        // Steep quartics hit the representable-x floor: one ulp of x moves
        // the value by |grad| * ulp(|x|), which can exceed 1e-10.
        const double floor = fold_function_grad(spec, 0, p).norm() *
                             std::max(1.0, p.norm()) * 1e-15;
        CHECK(std::abs(fold_function(spec, 0, p)) <= std::max(1e-10, floor));
      }
    }
  }

  SUBCASE("workers do not change the extraction") {
    LevelsetOptions par = opts;
    par.resolution = 150;
    auto seq_curves = extract_levelset(spec, CurveKind::kappa, w, par);
    par.workers = 2;
    auto par_curves = extract_levelset(spec, CurveKind::kappa, w, par);
    REQUIRE(seq_curves.size() == par_curves.size());
    for (size_t k = 0; k < seq_curves.size(); ++k) {
      REQUIRE(seq_curves[k].points.size() == par_curves[k].points.size());
      for (size_t i = 0; i < seq_curves[k].points.size(); ++i) {
        CHECK((seq_curves[k].points[i] - par_curves[k].points[i]).norm() == 0.0);
      }
    }
  }
}

TEST_CASE("example 4 has a single shared curve") {
  // The shared loop extends to |x| ~ 30: use a window that contains it.
  const auto spec = testspecs::example4();
  const Window w{-40.0, 40.0, -40.0, 40.0};
  LevelsetOptions opts;
  opts.resolution = 800;
  const auto curves = extract_levelset(spec, CurveKind::kappa, w, opts);
  const LevelCurve* shared = nullptr;
  for (const auto& c : curves) {
    if (c.through_origin && c.through_xi) shared = &c;
  }
  REQUIRE(shared != nullptr);
  CHECK(shared->closed);
  CHECK(shared->label() == "C0=Cxi");
}

TEST_CASE("EB fold candidates match the reference table") {
  const auto spec = testspecs::eb_map();
  Window w{-8, 8, -8, 8};
  FoldCandidateOptions opts;
  std::vector<FoldCandidate> degenerate;
  const auto cands = fold_candidates(spec, w, opts, &degenerate);

  REQUIRE(cands.size() == 6);
  CHECK(degenerate.size() == 2);

  const Vec2 ref[6] = {{1.2483, -0.1286}, {0.2269, -3.4760}, {0.3371, 3.1473},
                       {2.2769, 0.2982},  {-3.2933, 6.1024}, {5.6733, -1.2807}};
  for (const auto& r : ref) {
    double best = 1e9;
    for (const auto& c : cands) best = std::min(best, (c.x - r).norm());
    CHECK(best <= 1e-3);
  }
  for (const auto& c : cands) {
    CHECK(std::abs(det_site_matrix(spec, c.x)) <=
          1e-11 * std::max(1.0, det_site_matrix_grad(spec, c.x).norm()));
    // The reported row may differ from the refinement row by the rank-1
    // proportionality factor, so allow an order of magnitude of slack.
    CHECK(std::abs(fold_function(spec, c.row, c.x)) <=
          1e-10 * std::max(1.0, fold_function_grad(spec, c.row, c.x).norm()));
    CHECK(c.case_tag == 2);
  }
}

TEST_CASE("candidate search is empty off the fold set") {
  // The catastrophe-free construction has no fold candidates anywhere.
  const auto spec = testspecs::catastrophe_free_map();
  Window w{-8, 8, -8, 8};
  const auto cands = fold_candidates(spec, w);
  CHECK(cands.empty());
}

TEST_CASE("kappa completeness against a Newton-grid sweep") {
  const auto spec = testspecs::eb_map();
  Window w{-6, 6, -6, 6};
  LevelsetOptions opts;
  opts.resolution = 300;
  const auto curves = extract_levelset(spec, CurveKind::kappa, w, opts);
  const double cell = std::hypot(w.width() / opts.resolution, w.height() / opts.resolution);

  const continuation::TruncatedCircleMap map(spec, 0.01);
  std::mt19937 rng(99);
  std::uniform_real_distribution<double> angle(0.0, kTwoPi);
  for (int trial = 0; trial < 10; ++trial) {
    const double s = angle(rng);
    for (const auto& root : continuation::newton_grid(map, s, w, 30)) {
      double best = 1e9;
      for (const auto& c : curves) {
        for (const auto& p : c.points) best = std::min(best, (p - root).norm());
      }
      CHECK(best <= cell);
    }
  }
}
