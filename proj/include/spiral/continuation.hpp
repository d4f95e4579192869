#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "spiral/levelset.hpp"
#include "spiral/planar_map.hpp"

namespace spiral::continuation {

using planar::MapSpec;
using planar::Window;

// One-parameter family of planar maps restricted to the parameter circle of
// radius rho: x -> M(x, s). Continuation, fold detection and the Newton grid
// all run against this interface.
class CircleMap {
 public:
  virtual ~CircleMap() = default;
  // M(x, s) - x
  virtual Vec2 residual(const Vec2& x, double s) const = 0;
  // d/dx of the residual (= D_x M - I)
  virtual Mat2 residual_jac_x(const Vec2& x, double s) const = 0;
  virtual Vec2 residual_jac_s(const Vec2& x, double s) const = 0;
  // Normalization for the fold test function det(D_x M - I).
  virtual double fold_scale() const = 0;
  // Magnitude of the terms summed inside the residual: the cancellation
  // floor for convergence tests is eps times this.
  virtual double residual_scale(const Vec2& x, double s) const = 0;

  Mat2 map_jacobian(const Vec2& x, double s) const {
    return Mat2::identity() + residual_jac_x(x, s);
  }
  double fold_test(const Vec2& x, double s) const {
    return residual_jac_x(x, s).det() / fold_scale();
  }
};

// The truncated two-site map restricted to lam = rho (cos s, sin s).
class TruncatedCircleMap : public CircleMap {
 public:
  TruncatedCircleMap(const MapSpec& spec, double rho) : spec_(spec), rho_(rho) {}
  Vec2 residual(const Vec2& x, double s) const override;
  Mat2 residual_jac_x(const Vec2& x, double s) const override;
  Vec2 residual_jac_s(const Vec2& x, double s) const override;
  double fold_scale() const override { return kTwoPi * rho_ * kTwoPi * rho_; }
  double residual_scale(const Vec2& x, double s) const override;
  double rho() const { return rho_; }

 private:
  const MapSpec& spec_;
  double rho_;
};

// The general map with lambda-corrections restricted to the same circle.
class GeneralCircleMap : public CircleMap {
 public:
  GeneralCircleMap(const MapSpec& spec, double rho) : spec_(spec), rho_(rho) {}
  Vec2 residual(const Vec2& x, double s) const override;
  Mat2 residual_jac_x(const Vec2& x, double s) const override;
  Vec2 residual_jac_s(const Vec2& x, double s) const override;
  double fold_scale() const override { return kTwoPi * rho_ * kTwoPi * rho_; }
  double residual_scale(const Vec2& x, double s) const override;
  double rho() const { return rho_; }

 private:
  const MapSpec& spec_;
  double rho_;
};

enum class Stability { attracting, repelling, saddle };

struct BranchPoint {
  double s = 0.0;  // unwrapped along the branch
  Vec2 x;
  std::array<Complex, 2> eigs{};  // of D_x M at the point
  Stability stability = Stability::saddle;
};

enum class EventKind { fold, infinity, stall };

struct BranchEvent {
  EventKind kind = EventKind::fold;
  double s_star = 0.0;  // unwrapped
  std::optional<Vec2> x_star;
  double position = 0.0;  // fractional index into Branch::points
  bool low_confidence = false;
  // Member of a sub-resolution fold pair (angular separation below the pair
  // tolerance): reported but excluded from wedge angles and fold counts.
  bool degenerate = false;
};

enum class EndState { none, closed, escaped, stalled, exhausted };

struct Branch {
  double rho = 0.0;
  std::vector<BranchPoint> points;
  int seed_index = 0;
  bool closed = false;
  EndState front_end = EndState::none;  // state at points.front()
  EndState back_end = EndState::none;   // state at points.back()
  std::vector<BranchEvent> events;      // ordered by position

  bool unbounded() const {
    return front_end == EndState::escaped || back_end == EndState::escaped;
  }
};

struct ContinuationOptions {
  double step_init = 1e-2;
  double step_min = 1e-5;
  double step_max = 5e-2;
  double residual_tol = 1e-10;
  int corrector_max_iter = 10;
  double closure_tol = 1e-6;
  double escape_radius = 50.0;
  int max_points = 300000;
  double fold_tol = 1e-10;      // on det(D_x M - I) / fold_scale
  double fold_pair_tol = 1e-3;  // s* separation marking a degenerate pair
};

ContinuationOptions default_options(const MapSpec& spec);

// Pseudo-arclength continuation of the fixed-point branch through (x0, s0),
// in both directions, with eigenvalues attached at every accepted point.
// Fold and infinity events are detected and refined before returning.
Branch continue_branch(const CircleMap& map, const Vec2& x0, double s0,
                       const ContinuationOptions& opts);

// Fold events: sign changes of det(D_x M - I) along the branch, bisected on
// arclength between accepted points. Exposed separately for testing; called
// by continue_branch.
std::vector<BranchEvent> detect_and_refine_folds(const CircleMap& map, const Branch& branch,
                                                 const ContinuationOptions& opts);

// Infinity events: ends that crossed the escape radius, with s* estimated by
// extrapolating s against 1/|x| -> 0 over the monotone tail.
std::vector<BranchEvent> detect_infinity(const Branch& branch, double escape_radius);

// Fixed points of M(., s) from a seeds_per_side^2 grid of Newton starts,
// deduplicated. The brute-force oracle for branch cross-validation.
std::vector<Vec2> newton_grid(const CircleMap& map, double s, const Window& window,
                              int seeds_per_side, double residual_tol = 1e-10,
                              double dedupe_dist = 1e-6);

// Branch slice: x-values where the branch crosses angle s (mod 2pi),
// corrector-polished at exactly that angle.
std::vector<Vec2> branch_points_at_s(const CircleMap& map, const Branch& branch, double s,
                                     double residual_tol = 1e-10);

// --- Wedge report ----------------------------------------------------------

enum class AngleKind { fold, infinity, catastrophe_free, lower_bound };

struct WedgeAngle {
  double value = 0.0;  // in (0, pi]; pi stands in for catastrophe-free sides
  AngleKind kind = AngleKind::catastrophe_free;
  bool defined() const { return kind == AngleKind::fold || kind == AngleKind::infinity; }
};

struct WedgeReport {
  WedgeAngle fore_origin, post_origin;  // angles before/after the origin axis
  WedgeAngle fore_xi, post_xi;          // angles before/after the xi axis
  double nu1 = 0.0;                     // post_origin + fore_xi
  double nu2 = 0.0;                     // fore_origin + post_xi
  bool same_curve = false;              // branch through 0 also carries xi
  std::string overlap;                  // quadrant description
};

// First-catastrophe wedge angles for the branches through (0, 0) and
// (xi, pi/2). Pass the same branch twice when it carries both sites.
WedgeReport wedge_angles(const Branch& branch_origin, const Branch& branch_xi,
                         const Vec2& xi);

// Locates the position of site eta on a branch (distance-minimizing point);
// returns fractional index, or nullopt if farther than tol.
std::optional<double> locate_site(const Branch& branch, const Vec2& eta, double tol);

}  // namespace spiral::continuation
