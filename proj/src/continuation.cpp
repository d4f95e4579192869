#include "spiral/continuation.hpp"

#include <algorithm>
#include <cmath>

namespace spiral::continuation {

namespace {

struct Vec3 {
  double x = 0.0, y = 0.0, s = 0.0;
  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, s + o.s}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, s - o.s}; }
  Vec3 operator*(double c) const { return {x * c, y * c, s * c}; }
  double dot(const Vec3& o) const { return x * o.x + y * o.y + s * o.s; }
  double norm() const { return std::sqrt(x * x + y * y + s * s); }
  Vec2 xy() const { return {x, y}; }
};

Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.s - a.s * b.y, a.s * b.x - a.x * b.s, a.x * b.y - a.y * b.x};
}

// Gaussian elimination with partial pivoting on a 3x3 system.
Vec3 solve3(double m[3][3], double r[3]) {
  int perm[3] = {0, 1, 2};
  for (int col = 0; col < 2; ++col) {
    int piv = col;
    for (int row = col + 1; row < 3; ++row) {
      if (std::abs(m[perm[row]][col]) > std::abs(m[perm[piv]][col])) piv = row;
    }
    std::swap(perm[col], perm[piv]);
    const double d = m[perm[col]][col];
    if (d == 0.0) throw NumericalError("solve3: singular system");
    for (int row = col + 1; row < 3; ++row) {
      const double f = m[perm[row]][col] / d;
      for (int k = col; k < 3; ++k) m[perm[row]][k] -= f * m[perm[col]][k];
      r[perm[row]] -= f * r[perm[col]];
    }
  }
  if (m[perm[2]][2] == 0.0) throw NumericalError("solve3: singular system");
  Vec3 u;
  u.s = r[perm[2]] / m[perm[2]][2];
  u.y = (r[perm[1]] - m[perm[1]][2] * u.s) / m[perm[1]][1];
  u.x = (r[perm[0]] - m[perm[0]][1] * u.y - m[perm[0]][2] * u.s) / m[perm[0]][0];
  return u;
}

Stability classify(const std::array<Complex, 2>& eigs) {
  const double m0 = std::abs(eigs[0]);
  const double m1 = std::abs(eigs[1]);
  if (m0 < 1.0 && m1 < 1.0) return Stability::attracting;
  if (m0 > 1.0 && m1 > 1.0) return Stability::repelling;
  return Stability::saddle;
}

BranchPoint make_point(const CircleMap& map, const Vec3& u) {
  BranchPoint p;
  p.s = u.s;
  p.x = u.xy();
  p.eigs = eigenvalues2(map.map_jacobian(u.xy(), u.s));
  p.stability = classify(p.eigs);
  return p;
}

// Newton corrector in the hyperplane through u_pred orthogonal to tangent.
// Returns iterations used, or -1 on failure.
int correct(const CircleMap& map, const Vec3& u_pred, const Vec3& tangent, double tol,
            int max_iter, Vec3* out) {
  Vec3 u = u_pred;
  for (int it = 0; it < max_iter; ++it) {
    const Vec2 g = map.residual(u.xy(), u.s);
    const Vec3 diff = u - u_pred;
    const double plane = tangent.dot(diff);
    // Cancellation floor: the residual sums terms of residual_scale size.
    const double tol_eff = std::max(tol, 64.0 * 2.22e-16 * map.residual_scale(u.xy(), u.s));
    if (g.norm() <= tol_eff && std::abs(plane) <= 1e-12 * std::max(1.0, u.norm())) {
      *out = u;
      return it;
    }
    const Mat2 jx = map.residual_jac_x(u.xy(), u.s);
    const Vec2 js = map.residual_jac_s(u.xy(), u.s);
    double m[3][3] = {{jx.a, jx.b, js.x}, {jx.c, jx.d, js.y}, {tangent.x, tangent.y, tangent.s}};
    double r[3] = {-g.x, -g.y, -plane};
    Vec3 step;
    try {
      step = solve3(m, r);
    } catch (const NumericalError&) {
      return -1;
    }
    u = u + step;
    if (!std::isfinite(u.x) || !std::isfinite(u.y) || !std::isfinite(u.s)) return -1;
  }
  return -1;
}

// Polishes a point at fixed s to the fixed-point residual tolerance.
bool polish_at_s(const CircleMap& map, double s, Vec2* x, double tol) {
  for (int it = 0; it < 60; ++it) {
    const Vec2 g = map.residual(*x, s);
    const double tol_eff = std::max(tol, 64.0 * 2.22e-16 * map.residual_scale(*x, s));
    if (g.norm() <= tol_eff) return true;
    Vec2 step;
    try {
      step = solve2(map.residual_jac_x(*x, s), g);
    } catch (const NumericalError&) {
      return false;
    }
    *x -= step;
    if (!std::isfinite(x->x) || !std::isfinite(x->y) || x->norm() > 1e8) return false;
  }
  return false;
}

Vec3 kernel_tangent(const CircleMap& map, const Vec3& u) {
  const Mat2 jx = map.residual_jac_x(u.xy(), u.s);
  const Vec2 js = map.residual_jac_s(u.xy(), u.s);
  const Vec3 r1{jx.a, jx.b, js.x};
  const Vec3 r2{jx.c, jx.d, js.y};
  Vec3 t = cross(r1, r2);
  const double n = t.norm();
  if (n < 1e-14 * std::max(1.0, r1.norm() * r2.norm())) {
    throw NumericalError("continuation: singular seed (fold or rank-deficient point)");
  }
  return t * (1.0 / n);
}

struct Walk {
  std::vector<BranchPoint> points;
  EndState end = EndState::none;
};

Walk walk_branch(const CircleMap& map, const Vec3& seed, Vec3 tangent,
                 const ContinuationOptions& opts) {
  Walk walk;
  const Vec3 tangent0 = tangent;
  Vec3 u = seed;
  double h = opts.step_init;
  double travelled = 0.0;

  while (static_cast<int>(walk.points.size()) < opts.max_points) {
    Vec3 u_new;
    const int iters = correct(map, u + tangent * h, tangent, opts.residual_tol,
                              opts.corrector_max_iter, &u_new);
    if (iters < 0) {
      h /= 2.0;
      if (h < opts.step_min) {
        walk.end = EndState::stalled;
        return walk;
      }
      continue;
    }

    const Vec3 du = u_new - u;
    const double moved = du.norm();
    if (moved == 0.0) {
      h /= 2.0;
      if (h < opts.step_min) {
        walk.end = EndState::stalled;
        return walk;
      }
      continue;
    }
    u = u_new;
    tangent = du * (1.0 / moved);
    travelled += moved;
    walk.points.push_back(make_point(map, u));

    if (u.xy().norm() > opts.escape_radius) {
      walk.end = EndState::escaped;
      return walk;
    }
    if (travelled > 4.0 * opts.step_max) {
      const double close = std::hypot((u.xy() - seed.xy()).norm(), wrap_angle(u.s - seed.s));
      if (close < 2.0 * h && tangent.dot(tangent0) > 0.0) {
        // Project onto the hyperplane through the seed to test exact closure.
        Vec3 proj;
        const Vec3 seed_lift{seed.x, seed.y, u.s - wrap_angle(u.s - seed.s)};
        if (correct(map, seed_lift, tangent, opts.residual_tol, opts.corrector_max_iter,
                    &proj) >= 0) {
          const double gap = std::hypot((proj.xy() - seed.xy()).norm(),
                                        wrap_angle(proj.s - seed.s));
          if (gap < opts.closure_tol) {
            walk.end = EndState::closed;
            return walk;
          }
        }
      }
    }
    if (std::abs(u.s - seed.s) > kTwoPi + 0.1) {
      walk.end = EndState::exhausted;
      return walk;
    }

    if (iters <= 3) {
      h = std::min(h * 1.4, opts.step_max);
    } else if (iters >= 6) {
      h = std::max(h / 1.5, opts.step_min);
    }
  }
  walk.end = EndState::stalled;
  return walk;
}

}  // namespace

Vec2 TruncatedCircleMap::residual(const Vec2& x, double s) const {
  return kTwoPi * rho_ * (std::cos(s) * spec_.field_origin.eval(x) +
                          std::sin(s) * spec_.field_xi.eval(x));
}

Mat2 TruncatedCircleMap::residual_jac_x(const Vec2& x, double s) const {
  return kTwoPi * rho_ * (std::cos(s) * spec_.field_origin.jacobian(x) +
                          std::sin(s) * spec_.field_xi.jacobian(x));
}

Vec2 TruncatedCircleMap::residual_jac_s(const Vec2& x, double s) const {
  return kTwoPi * rho_ * (-std::sin(s) * spec_.field_origin.eval(x) +
                          std::cos(s) * spec_.field_xi.eval(x));
}

double TruncatedCircleMap::residual_scale(const Vec2& x, double s) const {
  return kTwoPi * rho_ * (std::abs(std::cos(s)) * spec_.field_origin.eval(x).norm() +
                          std::abs(std::sin(s)) * spec_.field_xi.eval(x).norm());
}

Vec2 GeneralCircleMap::residual(const Vec2& x, double s) const {
  const Vec2 lam{rho_ * std::cos(s), rho_ * std::sin(s)};
  return planar::eval_map_general(spec_, x, lam) - x;
}

Mat2 GeneralCircleMap::residual_jac_x(const Vec2& x, double s) const {
  const Vec2 lam{rho_ * std::cos(s), rho_ * std::sin(s)};
  return kTwoPi * planar::map_general_jacobian_x(spec_, x, lam);
}

Vec2 GeneralCircleMap::residual_jac_s(const Vec2& x, double s) const {
  const Vec2 lam{rho_ * std::cos(s), rho_ * std::sin(s)};
  const Vec2 dlam{-rho_ * std::sin(s), rho_ * std::cos(s)};
  Vec2 d = dlam.x * spec_.field_origin.eval(x) + dlam.y * spec_.field_xi.eval(x);
  if (spec_.corr_origin) d += 2.0 * lam.x * dlam.x * spec_.corr_origin->eval(x);
  if (spec_.corr_xi) d += 2.0 * lam.y * dlam.y * spec_.corr_xi->eval(x);
  if (spec_.cross) d += (dlam.x * lam.y + lam.x * dlam.y) * spec_.cross->eval(x);
  return kTwoPi * d;
}

double GeneralCircleMap::residual_scale(const Vec2& x, double s) const {
  const Vec2 lam{rho_ * std::cos(s), rho_ * std::sin(s)};
  double scale = std::abs(lam.x) * spec_.field_origin.eval(x).norm() +
                 std::abs(lam.y) * spec_.field_xi.eval(x).norm();
  if (spec_.corr_origin) scale += lam.x * lam.x * spec_.corr_origin->eval(x).norm();
  if (spec_.corr_xi) scale += lam.y * lam.y * spec_.corr_xi->eval(x).norm();
  if (spec_.cross) scale += std::abs(lam.x * lam.y) * spec_.cross->eval(x).norm();
  return kTwoPi * scale;
}

ContinuationOptions default_options(const MapSpec& spec) {
  ContinuationOptions opts;
  opts.escape_radius = 50.0 * std::max(spec.xi.norm(), 1.0);
  // Gaussian-envelope fields die exponentially: past the radius where the
  // fastest envelope reaches 1e-5 the fold test is roundoff noise, so a
  // branch out there has effectively escaped the perturbed region.
  for (const auto* field : {&spec.field_origin, &spec.field_xi}) {
    if (const auto& env = field->envelope(); env && env->rate < 0.0) {
      const double cut =
          env->center.norm() + std::sqrt(std::log(1e5) / -env->rate);
      opts.escape_radius = std::min(opts.escape_radius,
                                    std::max(cut, 3.0 * std::max(spec.xi.norm(), 2.0)));
    }
  }
  return opts;
}

Branch continue_branch(const CircleMap& map, const Vec2& x0, double s0,
                       const ContinuationOptions& opts) {
  Vec2 x_seed = x0;
  if (!polish_at_s(map, s0, &x_seed, opts.residual_tol)) {
    throw NumericalError("continuation: seed is not a fixed point");
  }
  const Vec3 seed{x_seed.x, x_seed.y, s0};
  const Vec3 tangent = kernel_tangent(map, seed);

  Branch branch;
  branch.rho = std::sqrt(map.fold_scale()) / kTwoPi;

  const Walk forward = walk_branch(map, seed, tangent, opts);
  if (forward.end == EndState::closed) {
    branch.closed = true;
    branch.points.push_back(make_point(map, seed));
    branch.points.insert(branch.points.end(), forward.points.begin(), forward.points.end());
    branch.seed_index = 0;
    branch.front_end = EndState::closed;
    branch.back_end = EndState::closed;
  } else {
    const Walk backward = walk_branch(map, seed, tangent * -1.0, opts);
    branch.points.reserve(forward.points.size() + backward.points.size() + 1);
    for (auto it = backward.points.rbegin(); it != backward.points.rend(); ++it) {
      branch.points.push_back(*it);
    }
    branch.seed_index = static_cast<int>(backward.points.size());
    branch.points.push_back(make_point(map, seed));
    branch.points.insert(branch.points.end(), forward.points.begin(), forward.points.end());
    branch.front_end = backward.end;
    branch.back_end = forward.end;
  }

  branch.events = detect_and_refine_folds(map, branch, opts);
  // Consecutive folds separated by less than the pair tolerance in angle are
  // a sub-resolution wrinkle of the branch: flag both members.
  for (size_t k = 0; k + 1 < branch.events.size(); ++k) {
    auto& a = branch.events[k];
    auto& b = branch.events[k + 1];
    if (a.kind == EventKind::fold && b.kind == EventKind::fold &&
        std::abs(wrap_angle(a.s_star - b.s_star)) < opts.fold_pair_tol) {
      a.degenerate = true;
      b.degenerate = true;
    }
  }
  auto inf_events = detect_infinity(branch, opts.escape_radius * 0.999);
  branch.events.insert(branch.events.end(), inf_events.begin(), inf_events.end());
  if (branch.front_end == EndState::stalled) {
    branch.events.push_back({EventKind::stall, branch.points.front().s, branch.points.front().x,
                             0.0, false});
  }
  if (branch.back_end == EndState::stalled) {
    branch.events.push_back({EventKind::stall, branch.points.back().s, branch.points.back().x,
                             static_cast<double>(branch.points.size() - 1), false});
  }
  std::sort(branch.events.begin(), branch.events.end(),
            [](const BranchEvent& a, const BranchEvent& b) { return a.position < b.position; });
  return branch;
}

std::vector<BranchEvent> detect_and_refine_folds(const CircleMap& map, const Branch& branch,
                                                 const ContinuationOptions& opts) {
  std::vector<BranchEvent> events;
  const auto& pts = branch.points;
  const int n = static_cast<int>(pts.size());
  if (n < 2) return events;

  std::vector<double> tau(n);
  for (int i = 0; i < n; ++i) tau[i] = map.fold_test(pts[i].x, pts[i].s);

  auto refine_between = [&](int k, int k_next) -> std::optional<BranchEvent> {
    const Vec3 ua{pts[k].x.x, pts[k].x.y, pts[k].s};
    // Unwrap the neighbor's s against point k (loops wrap from last to first).
    const double s_next = pts[k].s + wrap_angle(pts[k_next].s - pts[k].s);
    const Vec3 ub{pts[k_next].x.x, pts[k_next].x.y, s_next};
    const Vec3 chord = ub - ua;
    const double chord_len = chord.norm();
    if (chord_len == 0.0) return std::nullopt;
    const Vec3 dir = chord * (1.0 / chord_len);

    double ta = 0.0, tb = 1.0;
    double fa = tau[k], fb = tau[k_next];
    double best_theta = std::abs(fa) < std::abs(fb) ? 0.0 : 1.0;
    Vec3 best_u = std::abs(fa) < std::abs(fb) ? ua : ub;
    double best_f = std::min(std::abs(fa), std::abs(fb));

    // det() of the x-Jacobian cancels terms of its squared Frobenius size.
    const Mat2 jx0 = map.residual_jac_x(pts[k].x, pts[k].s);
    const double jx_sq = jx0.a * jx0.a + jx0.b * jx0.b + jx0.c * jx0.c + jx0.d * jx0.d;
    const double fold_target =
        std::max(opts.fold_tol, 32.0 * 2.22e-16 * jx_sq / map.fold_scale());

    for (int it = 0; it < 100 && best_f > fold_target; ++it) {
      double theta = 0.5 * (ta + tb);
      if (fb != fa) {
        const double sec = ta - fa * (tb - ta) / (fb - fa);
        const double w = tb - ta;
        if (sec > ta + 0.01 * w && sec < tb - 0.01 * w) theta = sec;
      }
      Vec3 u_mid;
      if (correct(map, ua + chord * theta, dir, opts.residual_tol, opts.corrector_max_iter,
                  &u_mid) < 0) {
        break;
      }
      const double fm = map.fold_test(u_mid.xy(), u_mid.s);
      if (std::abs(fm) < best_f) {
        best_f = std::abs(fm);
        best_theta = theta;
        best_u = u_mid;
      }
      if ((fm >= 0.0) == (fa >= 0.0)) {
        ta = theta;
        fa = fm;
      } else {
        tb = theta;
        fb = fm;
      }
      if (tb - ta < 1e-15) break;
    }
    BranchEvent ev;
    ev.kind = EventKind::fold;
    ev.s_star = best_u.s;
    ev.x_star = best_u.xy();
    ev.position = k + best_theta;
    ev.low_confidence = best_f > std::max(1e-6, 100.0 * fold_target);
    return ev;
  };

  const int last = branch.closed ? n : n - 1;
  for (int k = 0; k < last; ++k) {
    const int k_next = (k + 1) % n;
    if ((tau[k] >= 0.0) == (tau[k_next] >= 0.0)) continue;
    if (auto ev = refine_between(k, k_next)) events.push_back(*ev);
  }

  // Second pass: near-zero |tau| minima without a sign change (possible
  // double roots). Refinement only records them if the test function
  // actually reaches the fold tolerance.
  double tau_scale = 0.0;
  for (double t : tau) tau_scale = std::max(tau_scale, std::abs(t));
  for (int k = 1; k + 1 < n; ++k) {
    if ((tau[k - 1] >= 0.0) != (tau[k] >= 0.0)) continue;
    if ((tau[k] >= 0.0) != (tau[k + 1] >= 0.0)) continue;
    if (std::abs(tau[k]) > 1e-6 * tau_scale) continue;
    if (std::abs(tau[k]) > std::abs(tau[k - 1]) || std::abs(tau[k]) > std::abs(tau[k + 1])) continue;
    if (std::abs(tau[k]) <= opts.fold_tol) {
      BranchEvent ev;
      ev.kind = EventKind::fold;
      ev.s_star = pts[k].s;
      ev.x_star = pts[k].x;
      ev.position = k;
      ev.low_confidence = true;
      events.push_back(ev);
    }
  }

  // Deduplicate events that refined to the same location from both sides.
  std::sort(events.begin(), events.end(),
            [](const BranchEvent& a, const BranchEvent& b) { return a.position < b.position; });
  std::vector<BranchEvent> unique;
  for (const auto& ev : events) {
    if (!unique.empty() && std::abs(unique.back().s_star - ev.s_star) < 1e-9 &&
        ev.x_star && unique.back().x_star &&
        (*unique.back().x_star - *ev.x_star).norm() < 1e-7) {
      continue;
    }
    unique.push_back(ev);
  }
  return unique;
}

std::vector<BranchEvent> detect_infinity(const Branch& branch, double escape_radius) {
  std::vector<BranchEvent> events;
  const auto& pts = branch.points;
  const int n = static_cast<int>(pts.size());
  if (n < 4) return events;

  auto extrapolate = [&](bool at_back) -> std::optional<BranchEvent> {
    const int end = at_back ? n - 1 : 0;
    if (pts[end].x.norm() < escape_radius) return std::nullopt;
    // Collect the monotone tail in |x| walking inward from the end.
    std::vector<int> tail{end};
    double prev_r = pts[end].x.norm();
    for (int step = 1; step < std::min(n, 400); ++step) {
      const int idx = at_back ? n - 1 - step : step;
      if (idx < 0 || idx >= n) break;
      const double r = pts[idx].x.norm();
      if (r >= prev_r) break;  // oscillation: keep the last monotone stretch
      if (r < 0.15 * pts[end].x.norm()) break;
      tail.push_back(idx);
      prev_r = r;
    }
    if (tail.size() < 3) return std::nullopt;
    // Least squares fit s = s_inf + c1 u + c2 u^2 with u = 1/|x| -> 0.
    double m00 = 0, m01 = 0, m02 = 0, m12 = 0, m22 = 0;
    double r0 = 0, r1 = 0, r2 = 0;
    for (int idx : tail) {
      const double u = 1.0 / pts[idx].x.norm();
      const double v = pts[idx].s;
      m00 += 1.0;
      m01 += u;
      m02 += u * u;
      m12 += u * u * u;
      m22 += u * u * u * u;
      r0 += v;
      r1 += u * v;
      r2 += u * u * v;
    }
    BranchEvent ev;
    ev.kind = EventKind::infinity;
    ev.x_star = std::nullopt;
    ev.position = static_cast<double>(end);
    ev.low_confidence = tail.size() < 8;
    if (tail.size() >= 6) {
      double m[3][3] = {{m00, m01, m02}, {m01, m02, m12}, {m02, m12, m22}};
      double r[3] = {r0, r1, r2};
      try {
        ev.s_star = solve3(m, r).x;
        return ev;
      } catch (const NumericalError&) {
      }
    }
    const double denom = m00 * m02 - m01 * m01;
    if (std::abs(denom) < 1e-300) return std::nullopt;
    ev.s_star = (r0 * m02 - m01 * r1) / denom;
    return ev;
  };

  if (branch.front_end == EndState::escaped) {
    if (auto ev = extrapolate(false)) events.push_back(*ev);
  }
  if (branch.back_end == EndState::escaped) {
    if (auto ev = extrapolate(true)) events.push_back(*ev);
  }
  return events;
}

std::vector<Vec2> newton_grid(const CircleMap& map, double s, const Window& window,
                              int seeds_per_side, double residual_tol, double dedupe_dist) {
  std::vector<Vec2> roots;
  for (int j = 0; j < seeds_per_side; ++j) {
    for (int i = 0; i < seeds_per_side; ++i) {
      Vec2 x{window.x_min + (i + 0.5) * window.width() / seeds_per_side,
             window.y_min + (j + 0.5) * window.height() / seeds_per_side};
      if (!polish_at_s(map, s, &x, residual_tol)) continue;
      if (!window.contains(x)) continue;
      roots.push_back(x);
    }
  }
  std::sort(roots.begin(), roots.end(), [](const Vec2& a, const Vec2& b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  });
  std::vector<Vec2> unique;
  for (const auto& r : roots) {
    bool dup = false;
    for (const auto& kept : unique) {
      if ((kept - r).norm() < dedupe_dist) {
        dup = true;
        break;
      }
    }
    if (!dup) unique.push_back(r);
  }
  return unique;
}

std::vector<Vec2> branch_points_at_s(const CircleMap& map, const Branch& branch, double s,
                                     double residual_tol) {
  std::vector<Vec2> result;
  const auto& pts = branch.points;
  const int n = static_cast<int>(pts.size());
  const int last = branch.closed ? n : n - 1;
  for (int k = 0; k < last; ++k) {
    const int k_next = (k + 1) % n;
    const double sa = pts[k].s;
    const double sb = pts[k].s + wrap_angle(pts[k_next].s - pts[k].s);
    const double lo = std::min(sa, sb);
    const double hi = std::max(sa, sb);
    if (hi == lo) continue;
    // Angles are identified mod 2*pi; find matching representatives.
    const double base = s + kTwoPi * std::floor((lo - s) / kTwoPi);
    for (double sq = base; sq <= hi + 1e-12; sq += kTwoPi) {
      if (sq < lo - 1e-12) continue;
      const double t = (sq - sa) / (sb - sa);
      if (t < -1e-9 || t > 1.0 + 1e-9) continue;
      Vec2 x = pts[k].x + t * (pts[k_next].x - pts[k].x);
      if (!polish_at_s(map, s, &x, residual_tol)) continue;
      bool dup = false;
      for (const auto& kept : result) {
        if ((kept - x).norm() < 1e-7) {
          dup = true;
          break;
        }
      }
      if (!dup) result.push_back(x);
    }
  }
  return result;
}

std::optional<double> locate_site(const Branch& branch, const Vec2& eta, double tol) {
  const auto& pts = branch.points;
  if (pts.empty()) return std::nullopt;
  double best_dist = (pts[0].x - eta).norm();
  double best_pos = 0.0;
  const int n = static_cast<int>(pts.size());
  const int last = branch.closed ? n : n - 1;
  for (int k = 0; k < last; ++k) {
    const int k_next = (k + 1) % n;
    const Vec2 d = pts[k_next].x - pts[k].x;
    const double len2 = d.norm2();
    double t = len2 > 0.0 ? std::clamp((eta - pts[k].x).dot(d) / len2, 0.0, 1.0) : 0.0;
    const Vec2 proj = pts[k].x + t * d;
    const double dist = (proj - eta).norm();
    if (dist < best_dist) {
      best_dist = dist;
      best_pos = k + t;
    }
  }
  if (best_dist > tol) return std::nullopt;
  return best_pos;
}

namespace {

double s_at_position(const Branch& branch, double pos) {
  const auto& pts = branch.points;
  const int n = static_cast<int>(pts.size());
  const int k = std::min(static_cast<int>(pos), n - 1);
  const double t = pos - k;
  if (k + 1 >= n || t == 0.0) return pts[k].s;
  return pts[k].s + t * wrap_angle(pts[k + 1].s - pts[k].s);
}

struct FirstEvents {
  std::optional<BranchEvent> forward;
  std::optional<BranchEvent> backward;
};

FirstEvents first_events(const Branch& branch, double ref_pos) {
  FirstEvents fe;
  std::vector<BranchEvent> catastrophes;
  for (const auto& ev : branch.events) {
    if ((ev.kind == EventKind::fold || ev.kind == EventKind::infinity) && !ev.degenerate) {
      catastrophes.push_back(ev);
    }
  }
  if (catastrophes.empty()) return fe;
  for (const auto& ev : catastrophes) {
    if (ev.position > ref_pos) {
      if (!fe.forward || ev.position < fe.forward->position) fe.forward = ev;
    } else if (ev.position < ref_pos) {
      if (!fe.backward || ev.position > fe.backward->position) fe.backward = ev;
    }
  }
  if (branch.closed) {
    // Wrap around the loop when one side has no event before the seam.
    if (!fe.forward) {
      auto it = std::min_element(catastrophes.begin(), catastrophes.end(),
                                 [](const BranchEvent& a, const BranchEvent& b) {
                                   return a.position < b.position;
                                 });
      fe.forward = *it;
    }
    if (!fe.backward) {
      auto it = std::max_element(catastrophes.begin(), catastrophes.end(),
                                 [](const BranchEvent& a, const BranchEvent& b) {
                                   return a.position < b.position;
                                 });
      fe.backward = *it;
    }
  }
  return fe;
}

AngleKind angle_kind(EventKind k) {
  return k == EventKind::fold ? AngleKind::fold : AngleKind::infinity;
}

// First-catastrophe wedge angles at a site located at ref_pos on the branch.
// s_axis is the exact axis angle (0 or pi/2); the branch may carry the site
// at s_axis + pi, so the reference is snapped to the nearest representative
// of {s_axis + k*pi}.
std::pair<WedgeAngle, WedgeAngle> site_angles(const Branch& branch, double ref_pos,
                                              double s_axis) {
  const double s_raw = s_at_position(branch, ref_pos);
  const double snapped = s_raw - std::remainder(s_raw - s_axis, kPi);

  WedgeAngle fore, post;
  const FirstEvents fe = first_events(branch, ref_pos);

  auto resolve_end = [&](bool forward_dir) -> WedgeAngle {
    WedgeAngle wa;
    const EndState end = forward_dir ? branch.back_end : branch.front_end;
    if (branch.closed || end == EndState::none) {
      wa.kind = AngleKind::catastrophe_free;
      wa.value = kPi;
    } else {
      const double s_end = forward_dir ? branch.points.back().s : branch.points.front().s;
      wa.kind = AngleKind::lower_bound;
      wa.value = std::abs(wrap_angle(s_end - snapped));
    }
    return wa;
  };

  auto to_angle = [&](const BranchEvent& ev) {
    WedgeAngle wa;
    wa.kind = angle_kind(ev.kind);
    wa.value = std::abs(wrap_angle(ev.s_star - snapped));
    return wa;
  };

  std::optional<std::pair<double, WedgeAngle>> cand_a, cand_b;  // signed diff, angle
  if (fe.forward) {
    cand_a = {wrap_angle(fe.forward->s_star - snapped), to_angle(*fe.forward)};
  }
  if (fe.backward) {
    cand_b = {wrap_angle(fe.backward->s_star - snapped), to_angle(*fe.backward)};
  }

  if (cand_a && cand_b) {
    if (cand_a->first >= 0.0 && cand_b->first < 0.0) {
      post = cand_a->second;
      fore = cand_b->second;
    } else if (cand_a->first < 0.0 && cand_b->first >= 0.0) {
      fore = cand_a->second;
      post = cand_b->second;
    } else {
      // Both first catastrophes landed on the same rotational side; keep the
      // closer one there and assign the other to the remaining side.
      const bool a_closer = std::abs(cand_a->first) <= std::abs(cand_b->first);
      const auto& closer = a_closer ? *cand_a : *cand_b;
      const auto& other = a_closer ? *cand_b : *cand_a;
      if (closer.first >= 0.0) {
        post = closer.second;
        fore = other.second;
      } else {
        fore = closer.second;
        post = other.second;
      }
    }
  } else if (cand_a || cand_b) {
    const auto& cand = cand_a ? *cand_a : *cand_b;
    WedgeAngle open_side = resolve_end(cand_a ? false : true);
    if (cand.first >= 0.0) {
      post = cand.second;
      fore = open_side;
    } else {
      fore = cand.second;
      post = open_side;
    }
  } else {
    fore = resolve_end(false);
    post = resolve_end(true);
  }
  return {fore, post};
}

}  // namespace

WedgeReport wedge_angles(const Branch& branch_origin, const Branch& branch_xi, const Vec2& xi) {
  WedgeReport rep;

  const auto origin_pos = locate_site(branch_origin, {0.0, 0.0}, 1e-3);
  const double ref_origin = origin_pos.value_or(branch_origin.seed_index);
  auto [fore0, post0] = site_angles(branch_origin, ref_origin, 0.0);
  rep.fore_origin = fore0;
  rep.post_origin = post0;

  const auto shared = locate_site(branch_origin, xi, 0.06);
  if (shared) {
    const double s_here = s_at_position(branch_origin, *shared);
    if (std::abs(std::remainder(s_here - kPi / 2.0, kPi)) < 0.05) {
      rep.same_curve = true;
      auto [fore_xi, post_xi] = site_angles(branch_origin, *shared, kPi / 2.0);
      rep.fore_xi = fore_xi;
      rep.post_xi = post_xi;
    }
  }
  if (!rep.same_curve) {
    const auto xi_pos = locate_site(branch_xi, xi, 1e-3);
    const double ref_xi = xi_pos.value_or(branch_xi.seed_index);
    auto [fore_xi, post_xi] = site_angles(branch_xi, ref_xi, kPi / 2.0);
    rep.fore_xi = fore_xi;
    rep.post_xi = post_xi;
  }

  rep.nu1 = rep.post_origin.value + rep.fore_xi.value;
  rep.nu2 = rep.fore_origin.value + rep.post_xi.value;

  const double half_pi = kPi / 2.0;
  const double eps = 1e-9;
  if (rep.nu1 > half_pi + eps && rep.nu2 > half_pi + eps) {
    rep.overlap = "all four quadrants";
  } else if (rep.nu1 > half_pi + eps) {
    rep.overlap = "first and third quadrants";
  } else if (rep.nu2 > half_pi + eps) {
    rep.overlap = "second and fourth quadrants";
  } else if (std::abs(rep.nu1 - half_pi) <= eps || std::abs(rep.nu2 - half_pi) <= eps) {
    rep.overlap = "none (zero-measure complement)";
  } else {
    rep.overlap = "none";
  }
  return rep;
}

}  // namespace spiral::continuation
