#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>

#include "spiral/continuation.hpp"
#include "test_specs.hpp"

using namespace spiral;
using namespace spiral::continuation;

namespace {

struct EbReference {
  // Catastrophes of the EB map from the reference table.
  static constexpr double c0_folds_s[2] = {5.9809, 0.2308};
  static constexpr double cxi_folds_s[4] = {1.1020, 2.1125, 1.1581, 1.9267};
  static constexpr double cxi_inf_s[2] = {1.0172, 2.3562};
};

std::vector<BranchEvent> qualifying_folds(const Branch& b) {
  std::vector<BranchEvent> out;
  for (const auto& ev : b.events) {
    if (ev.kind == EventKind::fold && !ev.degenerate) out.push_back(ev);
  }
  return out;
}

std::vector<BranchEvent> infinity_events(const Branch& b) {
  std::vector<BranchEvent> out;
  for (const auto& ev : b.events) {
    if (ev.kind == EventKind::infinity) out.push_back(ev);
  }
  return out;
}

bool matches_some(double s, const double* ref, int n, double tol) {
  for (int k = 0; k < n; ++k) {
    if (std::abs(wrap_angle(s - ref[k])) <= tol) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("EB map branches reproduce the reference table") {
  const auto spec = testspecs::eb_map();
  const TruncatedCircleMap map(spec, 0.01);
  const auto opts = default_options(spec);

  const Branch b0 = continue_branch(map, {0.0, 0.0}, 0.0, opts);
  const Branch bxi = continue_branch(map, spec.xi, kPi / 2.0, opts);

  SUBCASE("C0 closes into a loop with two qualifying folds") {
    CHECK(b0.closed);
    const auto folds = qualifying_folds(b0);
    REQUIRE(folds.size() == 2);
    for (const auto& ev : folds) {
      CHECK(matches_some(ev.s_star, EbReference::c0_folds_s, 2, 0.02));
    }
    CHECK(infinity_events(b0).empty());
    // the sub-resolution pair is present but flagged
    int degenerate = 0;
    for (const auto& ev : b0.events) degenerate += ev.degenerate ? 1 : 0;
    CHECK(degenerate == 2);
  }

  SUBCASE("C0 fold locations match the table") {
    for (const auto& ev : qualifying_folds(b0)) {
      REQUIRE(ev.x_star.has_value());
      const bool near_a = (*ev.x_star - Vec2{1.2483, -0.1286}).norm() <= 0.01;
      const bool near_b = (*ev.x_star - Vec2{0.2269, -3.4760}).norm() <= 0.01;
      CHECK((near_a || near_b));
    }
  }

  SUBCASE("Cxi carries four folds and two infinity catastrophes") {
    CHECK_FALSE(bxi.closed);
    CHECK(bxi.unbounded());
    const auto folds = qualifying_folds(bxi);
    REQUIRE(folds.size() == 4);
    for (const auto& ev : folds) {
      CHECK(matches_some(ev.s_star, EbReference::cxi_folds_s, 4, 0.02));
    }
    const auto infs = infinity_events(bxi);
    REQUIRE(infs.size() == 2);
    for (const auto& ev : infs) {
      CHECK(matches_some(ev.s_star, EbReference::cxi_inf_s, 2, 0.02));
    }
    const Vec2 ref[4] = {{0.3371, 3.1473}, {2.2769, 0.2982}, {-3.2933, 6.1024},
                         {5.6733, -1.2807}};
    for (const auto& ev : folds) {
      REQUIRE(ev.x_star.has_value());
      double best = 1e9;
      for (const auto& r : ref) best = std::min(best, (*ev.x_star - r).norm());
      CHECK(best <= 0.01);
    }
  }

  SUBCASE("branch residual and seed membership invariants") {
    CHECK((b0.points[b0.seed_index].x - Vec2{0.0, 0.0}).norm() <= 1e-12);
    CHECK(b0.points[b0.seed_index].s == doctest::Approx(0.0));
    CHECK((bxi.points[bxi.seed_index].x - spec.xi).norm() <= 1e-12);
    for (const auto* b : {&b0, &bxi}) {
      for (const auto& p : b->points) {
        CHECK(map.residual(p.x, p.s).norm() <= 1e-10);
      }
    }
  }

  SUBCASE("no catastrophe at the sites") {
    for (const auto& ev : b0.events) {
      if (ev.kind == EventKind::stall) continue;
      CHECK(std::abs(wrap_angle(ev.s_star - 0.0)) > 1e-3);
    }
    for (const auto& ev : bxi.events) {
      if (ev.kind == EventKind::stall) continue;
      CHECK(std::abs(wrap_angle(ev.s_star - kPi / 2.0)) > 1e-3);
    }
  }

  SUBCASE("fold parity on the loop is even (counting the flagged pair)") {
    int folds = 0;
    for (const auto& ev : b0.events) folds += ev.kind == EventKind::fold ? 1 : 0;
    CHECK(folds % 2 == 0);
  }

  SUBCASE("stability flips across every fold") {
    for (const auto* b : {&b0, &bxi}) {
      for (const auto& ev : b->events) {
        if (ev.kind != EventKind::fold) continue;
        const int before = static_cast<int>(std::floor(ev.position));
        const int after = before + 1;
        if (after >= static_cast<int>(b->points.size())) continue;
        CHECK(b->points[before].stability != b->points[after].stability);
      }
    }
  }

  SUBCASE("wedge angles match the table") {
    const auto rep = wedge_angles(b0, bxi, spec.xi);
    CHECK_FALSE(rep.same_curve);
    CHECK(rep.fore_origin.value == doctest::Approx(0.3023).epsilon(0.07));
    CHECK(rep.post_origin.value == doctest::Approx(0.2308).epsilon(0.09));
    CHECK(rep.fore_xi.value == doctest::Approx(0.4688).epsilon(0.05));
    CHECK(rep.post_xi.value == doctest::Approx(0.5417).epsilon(0.04));
    CHECK(std::abs(rep.fore_origin.value - 0.3023) <= 0.02);
    CHECK(std::abs(rep.post_origin.value - 0.2308) <= 0.02);
    CHECK(std::abs(rep.fore_xi.value - 0.4688) <= 0.02);
    CHECK(std::abs(rep.post_xi.value - 0.5417) <= 0.02);
    CHECK(rep.fore_origin.kind == AngleKind::fold);
    CHECK(rep.post_xi.kind == AngleKind::fold);
    CHECK(rep.overlap == "none");
  }
}

TEST_CASE("step halving leaves events in place") {
  const auto spec = testspecs::eb_map();
  const TruncatedCircleMap map(spec, 0.01);
  auto opts = default_options(spec);
  const Branch coarse = continue_branch(map, spec.xi, kPi / 2.0, opts);
  opts.step_init /= 2.0;
  opts.step_max /= 2.0;
  const Branch fine = continue_branch(map, spec.xi, kPi / 2.0, opts);

  const auto coarse_folds = qualifying_folds(coarse);
  const auto fine_folds = qualifying_folds(fine);
  REQUIRE(coarse_folds.size() == fine_folds.size());
  for (const auto& ev : coarse_folds) {
    double best_s = 1e9;
    double best_x = 1e9;
    for (const auto& fv : fine_folds) {
      if (std::abs(wrap_angle(ev.s_star - fv.s_star)) < best_s) {
        best_s = std::abs(wrap_angle(ev.s_star - fv.s_star));
        best_x = (*ev.x_star - *fv.x_star).norm();
      }
    }
    CHECK(best_s < 1e-3);
    CHECK(best_x < 1e-3);
  }
}

TEST_CASE("infinity extrapolation is stable under escape-radius doubling") {
  const auto spec = testspecs::eb_map();
  const TruncatedCircleMap map(spec, 0.01);
  auto opts = default_options(spec);
  const Branch b1 = continue_branch(map, spec.xi, kPi / 2.0, opts);
  opts.escape_radius *= 2.0;
  const Branch b2 = continue_branch(map, spec.xi, kPi / 2.0, opts);
  const auto i1 = infinity_events(b1);
  const auto i2 = infinity_events(b2);
  REQUIRE(i1.size() == 2);
  REQUIRE(i2.size() == 2);
  for (const auto& ev : i1) {
    double best = 1e9;
    for (const auto& other : i2) {
      best = std::min(best, std::abs(wrap_angle(ev.s_star - other.s_star)));
    }
    CHECK(best < 1e-3);
  }
}

TEST_CASE("the antipodal axis point lies on a branch") {
  const auto spec = testspecs::eb_map();
  const TruncatedCircleMap map(spec, 0.01);
  // P_rho(0, pi) = 0 because the origin field vanishes at 0.
  CHECK(map.residual({0.0, 0.0}, kPi).norm() == doctest::Approx(0.0));
  const Branch b = continue_branch(map, {0.0, 0.0}, kPi, default_options(spec));
  CHECK(b.points.size() > 10);
  CHECK((b.points[b.seed_index].x - Vec2{0.0, 0.0}).norm() <= 1e-12);
}

TEST_CASE("newton grid oracle cross-validates the branches") {
  const auto spec = testspecs::eb_map();
  const TruncatedCircleMap map(spec, 0.01);
  const auto opts = default_options(spec);
  const planar::Window window{-8.0, 8.0, -8.0, 8.0};

  const Branch b0 = continue_branch(map, {0.0, 0.0}, 0.0, opts);
  const Branch bxi = continue_branch(map, spec.xi, kPi / 2.0, opts);
  // Mirror branches carry the antipodal parameter directions.
  const Branch b0m = continue_branch(map, {0.0, 0.0}, kPi, opts);
  const Branch bxim = continue_branch(map, spec.xi, 3.0 * kPi / 2.0, opts);

  SUBCASE("s = 0 roots include the origin") {
    const auto roots = newton_grid(map, 0.0, window, 40);
    bool found = false;
    for (const auto& r : roots) found = found || r.norm() < 1e-8;
    CHECK(found);
  }

  SUBCASE("roots lie on continued branches at matching s") {
    std::mt19937 rng(2024);
    std::uniform_real_distribution<double> angle(0.0, kTwoPi);
    std::vector<Branch> branches{b0, bxi, b0m, bxim};
    for (int trial = 0; trial < 8; ++trial) {
      const double s = angle(rng);
      std::vector<Vec2> on_branches;
      for (const auto& b : branches) {
        for (const auto& x : branch_points_at_s(map, b, s)) on_branches.push_back(x);
      }
      for (const auto& root : newton_grid(map, s, window, 40)) {
        double best = 1e9;
        for (const auto& x : on_branches) best = std::min(best, (x - root).norm());
        if (best > 1e-6) {
          // Root on a kappa component not seeded from the sites: adopt it.
          const Branch extra = continue_branch(map, root, s, opts);
          for (const auto& x : branch_points_at_s(map, extra, s)) {
            best = std::min(best, (x - root).norm());
          }
          branches.push_back(extra);
        }
        CHECK(best <= 1e-6);
      }
    }
  }
}

TEST_CASE("linear truncation of the EB map has no folds") {
  const auto spec = testspecs::eb_linear_truncation();
  const TruncatedCircleMap map(spec, 0.01);
  const auto opts = default_options(spec);
  for (const auto& seed :
       {std::pair<Vec2, double>{{0.0, 0.0}, 0.0}, {spec.xi, kPi / 2.0}}) {
    const Branch b = continue_branch(map, seed.first, seed.second, opts);
    CHECK(qualifying_folds(b).empty());
    for (const auto& ev : b.events) CHECK(ev.kind != EventKind::fold);
  }
}

TEST_CASE("catastrophe-free map yields deleted-neighborhood wedges") {
  const auto spec = testspecs::catastrophe_free_map();
  const TruncatedCircleMap map(spec, 0.01);
  const auto opts = default_options(spec);
  const Branch b0 = continue_branch(map, {0.0, 0.0}, 0.0, opts);
  const Branch bxi = continue_branch(map, spec.xi, kPi / 2.0, opts);

  CHECK(b0.closed);
  CHECK(bxi.closed);
  CHECK(b0.events.empty());
  CHECK(bxi.events.empty());

  const auto rep = wedge_angles(b0, bxi, spec.xi);
  CHECK(rep.fore_origin.kind == AngleKind::catastrophe_free);
  CHECK(rep.post_xi.kind == AngleKind::catastrophe_free);
  CHECK(rep.overlap == "all four quadrants");
}

TEST_CASE("general map branches converge to the truncated ones") {
  const auto spec = testspecs::eb_revisited();
  const auto opts = default_options(spec);

  const TruncatedCircleMap trunc(spec, 0.01);
  const Branch ref = continue_branch(trunc, {0.0, 0.0}, 0.0, opts);
  const auto ref_folds = qualifying_folds(ref);
  REQUIRE(ref_folds.size() == 2);

  double prev_gap = -1.0;
  for (const double rho : {0.02, 0.01, 0.005}) {
    const GeneralCircleMap gen(spec, rho);
    const Branch b = continue_branch(gen, {0.0, 0.0}, 0.0, opts);
    const auto folds = qualifying_folds(b);
    REQUIRE(folds.size() == ref_folds.size());
    double gap = 0.0;
    for (const auto& ev : folds) {
      double best = 1e9;
      for (const auto& rv : ref_folds) {
        best = std::min(best, std::abs(wrap_angle(ev.s_star - rv.s_star)));
      }
      gap = std::max(gap, best);
    }
    if (prev_gap > 0.0) {
      CHECK(gap < prev_gap);              // shrinking with rho
      CHECK(gap / prev_gap < 0.75);       // roughly linear in rho
      CHECK(gap / prev_gap > 0.25);
    }
    prev_gap = gap;
  }
}
