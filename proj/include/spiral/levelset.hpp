#pragma once

#include <functional>
#include <string>
#include <vector>

#include "spiral/planar_map.hpp"

namespace spiral::planar {

struct Window {
  double x_min = -8.0, x_max = 8.0;
  double y_min = -8.0, y_max = 8.0;

  bool contains(const Vec2& p) const {
    return p.x >= x_min && p.x <= x_max && p.y >= y_min && p.y <= y_max;
  }
  double width() const { return x_max - x_min; }
  double height() const { return y_max - y_min; }
};

// Window auto-sized around both sites: side 4 * max(|xi|, 2), centered at 0.
Window default_window(const MapSpec& spec);

enum class CurveKind { kappa, fold1, fold2 };

struct LevelCurve {
  CurveKind kind = CurveKind::kappa;
  std::vector<Vec2> points;
  bool closed = false;
  bool through_origin = false;  // passes within a cell diagonal of 0
  bool through_xi = false;      // passes within a cell diagonal of xi
  std::vector<int> flagged_vertices;

  std::string label() const {
    if (through_origin && through_xi) return "C0=Cxi";
    if (through_origin) return "C0";
    if (through_xi) return "Cxi";
    return "";
  }
};

struct LevelsetOptions {
  int resolution = 600;       // cells per side
  double refine_tol = 1e-10;  // |f| target for vertex refinement
  int workers = 1;
};

// Marching-squares extraction of the zero set of det A (kind kappa) or of a
// fold bifurcation function (kinds fold1/fold2), with per-edge bisection
// refinement. Ambiguous saddle cells get one level of 4x subdivision; still
// ambiguous subcells are resolved by the center sample and flagged.
std::vector<LevelCurve> extract_levelset(const MapSpec& spec, CurveKind kind,
                                         const Window& window,
                                         const LevelsetOptions& opts = {});

// Same machinery over an arbitrary scalar function (used in tests).
std::vector<LevelCurve> extract_levelset_fn(const std::function<double(Vec2)>& f,
                                            const Window& window,
                                            const LevelsetOptions& opts = {});

// A point passing the visual fold criterion: a transverse intersection of
// the det A zero set with a fold-function zero set, carrying the kernel
// direction of A there.
struct FoldCandidate {
  Vec2 x;
  int row = 0;          // row of A whose fold function vanishes
  int case_tag = 2;     // 1: B = 0 branch, 2: B != 0 branch
  double kernel_angle = 0.0;  // s in [0, pi); the kernel meets the circle at s, s+pi
  double residual_det = 0.0;
  double residual_gamma = 0.0;
};

struct FoldCandidateOptions {
  int resolution = 600;
  double newton_tol = 1e-12;
  double dedupe_dist = 1e-6;
  double rank_ratio_min = 1e-6;  // sigma_min/sigma_max below this: near-tangent
  double pair_angle_tol = 1e-3;  // adjacent crossings closer than this: degenerate pair
};

// Qualifying candidates only; members of sub-resolution degenerate pairs
// (adjacent crossings along one curve with nearly identical kernel angles)
// land in *degenerate_out when provided.
std::vector<FoldCandidate> fold_candidates(const MapSpec& spec, const Window& window,
                                           const FoldCandidateOptions& opts = {},
                                           std::vector<FoldCandidate>* degenerate_out = nullptr);

}  // namespace spiral::planar
