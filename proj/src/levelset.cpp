#include "spiral/levelset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <thread>
#include <unordered_map>
#include <unordered_set>

namespace spiral::planar {

namespace {

using Key = std::int64_t;

struct NodeInfo {
  Vec2 pos;
  bool flagged = false;
};

struct Segment {
  Key a;
  Key b;
};

struct Builder {
  std::unordered_map<Key, NodeInfo> nodes;
  std::vector<Segment> segments;
  Key next_internal_key;
  double refine_tol;
  const std::function<double(Vec2)>* f;

  // Bisection along [pa, pb] assuming a sign change; returns the point with
  // the smallest |f| visited.
  Vec2 refine(Vec2 pa, Vec2 pb, double fa, double fb) const {
    if (fa == 0.0) return pa;
    if (fb == 0.0) return pb;
    Vec2 best = std::abs(fa) < std::abs(fb) ? pa : pb;
    double best_val = std::min(std::abs(fa), std::abs(fb));
    for (int it = 0; it < 120 && best_val > refine_tol; ++it) {
      const Vec2 pm = 0.5 * (pa + pb);
      if (pm.x == pa.x && pm.y == pa.y) break;
      if (pm.x == pb.x && pm.y == pb.y) break;
      const double fm = (*f)(pm);
      if (std::abs(fm) < best_val) {
        best_val = std::abs(fm);
        best = pm;
      }
      if ((fm >= 0.0) == (fa >= 0.0)) {
        pa = pm;
        fa = fm;
      } else {
        pb = pm;
        fb = fm;
      }
    }
    return best;
  }

  void ensure_node(Key key, const Vec2& pa, const Vec2& pb, double fa, double fb,
                   bool flag = false) {
    auto it = nodes.find(key);
    if (it == nodes.end()) {
      nodes[key] = {refine(pa, pb, fa, fb), flag};
    } else if (flag) {
      it->second.flagged = true;
    }
  }
};

// Edge endpoints as corner indices; corners are ordered c0=(0,0), c1=(1,0),
// c2=(1,1), c3=(0,1) within a cell.
constexpr int kEdgeEnds[4][2] = {{0, 1}, {1, 2}, {3, 2}, {0, 3}};

// Non-ambiguous marching-squares segment table: pattern -> edge pairs.
const std::vector<std::pair<int, int>>& pattern_segments(int pattern) {
  static const std::vector<std::pair<int, int>> table[16] = {
      {},          {{0, 3}},    {{0, 1}},   {{1, 3}},
      {{1, 2}},    {},          {{0, 2}},   {{2, 3}},
      {{2, 3}},    {{0, 2}},    {},         {{1, 2}},
      {{1, 3}},    {{0, 1}},    {{0, 3}},   {},
  };
  return table[pattern];
}

bool ambiguous(int pattern) { return pattern == 5 || pattern == 10; }

std::vector<std::pair<int, int>> saddle_segments(int pattern, double center_value) {
  const bool pos = center_value >= 0.0;
  if ((pattern == 5 && pos) || (pattern == 10 && !pos)) {
    return {{0, 1}, {2, 3}};
  }
  return {{0, 3}, {1, 2}};
}

struct EdgeSpec {
  Key key;
  Vec2 pa, pb;   // endpoints used for refinement (full parent edge when shared)
  double fa, fb;
  bool flag = false;
};

// Processes one (sub)cell given its corners, values, and an edge resolver.
void emit_cell(Builder& bld, const std::array<Vec2, 4>& corners,
               const std::array<double, 4>& values,
               const std::function<EdgeSpec(int)>& edge_spec, bool may_subdivide,
               const std::function<double(Vec2)>& f);

void emit_segments(Builder& bld, const std::vector<std::pair<int, int>>& segs,
                   const std::function<EdgeSpec(int)>& edge_spec, bool flag_all) {
  for (const auto& [e1, e2] : segs) {
    const EdgeSpec s1 = edge_spec(e1);
    const EdgeSpec s2 = edge_spec(e2);
    bld.ensure_node(s1.key, s1.pa, s1.pb, s1.fa, s1.fb, s1.flag || flag_all);
    bld.ensure_node(s2.key, s2.pa, s2.pb, s2.fa, s2.fb, s2.flag || flag_all);
    bld.segments.push_back({s1.key, s2.key});
  }
}

void subdivide_cell(Builder& bld, const std::array<Vec2, 4>& corners,
                    const std::array<double, 4>& values,
                    const std::function<EdgeSpec(int)>& edge_spec,
                    const std::function<double(Vec2)>& f) {
  const Vec2 c0 = corners[0];
  const double h = corners[1].x - corners[0].x;
  const Vec2 mb{c0.x + h / 2, c0.y}, mr{c0.x + h, c0.y + h / 2};
  const Vec2 mt{c0.x + h / 2, c0.y + h}, ml{c0.x, c0.y + h / 2};
  const Vec2 cc{c0.x + h / 2, c0.y + h / 2};
  const double fmb = f(mb), fmr = f(mr), fmt = f(mt), fml = f(ml), fcc = f(cc);

  // Interior sub-edge keys (bottom-, right-, top-, left-center spokes).
  const Key ib = bld.next_internal_key++;
  const Key ir = bld.next_internal_key++;
  const Key it = bld.next_internal_key++;
  const Key il = bld.next_internal_key++;

  struct Sub {
    std::array<Vec2, 4> c;
    std::array<double, 4> v;
    // For each edge: either parent edge index (>= 0) or -1-interior_slot.
    std::array<int, 4> parent_edge;
    std::array<Key, 4> interior_key;
  };

  const std::array<Sub, 4> subs = {{
      {{c0, mb, cc, ml}, {values[0], fmb, fcc, fml}, {0, -1, -1, 3}, {0, ib, il, 0}},
      {{mb, corners[1], mr, cc}, {fmb, values[1], fmr, fcc}, {0, 1, -1, -1}, {0, 0, ir, ib}},
      {{cc, mr, corners[2], mt}, {fcc, fmr, values[2], fmt}, {-1, 1, 2, -1}, {ir, 0, 0, it}},
      {{ml, cc, mt, corners[3]}, {fml, fcc, fmt, values[3]}, {-1, -1, 2, 3}, {il, it, 0, 0}},
  }};

  for (const auto& sub : subs) {
    auto sub_edge_spec = [&](int e) -> EdgeSpec {
      const Vec2 pa = sub.c[kEdgeEnds[e][0]];
      const Vec2 pb = sub.c[kEdgeEnds[e][1]];
      const double fa = sub.v[kEdgeEnds[e][0]];
      const double fb = sub.v[kEdgeEnds[e][1]];
      if (sub.parent_edge[e] >= 0) {
        const EdgeSpec parent = edge_spec(sub.parent_edge[e]);
        // The parent edge carries at most one recorded crossing; it belongs
        // to the half whose endpoint signs differ. A half with an extra
        // crossing invisible to the parent gets a fresh flagged node.
        if ((parent.fa >= 0.0) != (parent.fb >= 0.0) && (fa >= 0.0) != (fb >= 0.0)) {
          return parent;
        }
        EdgeSpec spec{bld.next_internal_key++, pa, pb, fa, fb, true};
        return spec;
      }
      return EdgeSpec{sub.interior_key[e], pa, pb, fa, fb, false};
    };
    emit_cell(bld, sub.c, sub.v, sub_edge_spec, false, f);
  }
}

void emit_cell(Builder& bld, const std::array<Vec2, 4>& corners,
               const std::array<double, 4>& values,
               const std::function<EdgeSpec(int)>& edge_spec, bool may_subdivide,
               const std::function<double(Vec2)>& f) {
  int pattern = 0;
  for (int k = 0; k < 4; ++k) {
    if (values[k] >= 0.0) pattern |= 1 << k;
  }
  if (pattern == 0 || pattern == 15) return;

  if (!ambiguous(pattern)) {
    emit_segments(bld, pattern_segments(pattern), edge_spec, false);
    return;
  }
  if (may_subdivide) {
    subdivide_cell(bld, corners, values, edge_spec, f);
    return;
  }
  const Vec2 center = 0.25 * (corners[0] + corners[1] + corners[2] + corners[3]);
  emit_segments(bld, saddle_segments(pattern, f(center)), edge_spec, true);
}

bool lex_less(const Vec2& a, const Vec2& b) {
  return a.x < b.x || (a.x == b.x && a.y < b.y);
}

std::vector<LevelCurve> chain_curves(Builder& bld, CurveKind kind) {
  std::unordered_map<Key, std::vector<int>> incident;
  for (int i = 0; i < static_cast<int>(bld.segments.size()); ++i) {
    incident[bld.segments[i].a].push_back(i);
    incident[bld.segments[i].b].push_back(i);
  }

  std::vector<bool> used(bld.segments.size(), false);
  std::vector<LevelCurve> curves;

  auto trace = [&](Key start, int seg_id) {
    LevelCurve curve;
    curve.kind = kind;
    Key current = start;
    curve.points.push_back(bld.nodes[current].pos);
    if (bld.nodes[current].flagged) curve.flagged_vertices.push_back(0);
    int seg = seg_id;
    while (true) {
      used[seg] = true;
      const Segment& s = bld.segments[seg];
      current = (s.a == current) ? s.b : s.a;
      if (current == start) {
        curve.closed = true;
        break;
      }
      if (bld.nodes[current].flagged) {
        curve.flagged_vertices.push_back(static_cast<int>(curve.points.size()));
      }
      curve.points.push_back(bld.nodes[current].pos);
      int next = -1;
      for (int cand : incident[current]) {
        if (!used[cand]) {
          next = cand;
          break;
        }
      }
      if (next < 0) break;
      seg = next;
    }
    return curve;
  };

  // Open chains first (endpoints have odd incidence), then leftover loops.
  std::vector<Key> keys;
  keys.reserve(incident.size());
  for (const auto& [k, v] : incident) keys.push_back(k);
  std::sort(keys.begin(), keys.end());

  for (Key k : keys) {
    if (incident[k].size() % 2 == 1) {
      for (int seg : incident[k]) {
        if (!used[seg]) curves.push_back(trace(k, seg));
      }
    }
  }
  for (Key k : keys) {
    for (int seg : incident[k]) {
      if (!used[seg]) curves.push_back(trace(k, seg));
    }
  }
  return curves;
}

void normalize_curves(std::vector<LevelCurve>& curves) {
  for (auto& c : curves) {
    if (c.points.size() < 2) continue;
    if (!c.closed) {
      if (lex_less(c.points.back(), c.points.front())) {
        std::reverse(c.points.begin(), c.points.end());
        const int n = static_cast<int>(c.points.size());
        for (auto& idx : c.flagged_vertices) idx = n - 1 - idx;
        std::sort(c.flagged_vertices.begin(), c.flagged_vertices.end());
      }
    } else {
      int min_idx = 0;
      for (int i = 1; i < static_cast<int>(c.points.size()); ++i) {
        if (lex_less(c.points[i], c.points[min_idx])) min_idx = i;
      }
      std::rotate(c.points.begin(), c.points.begin() + min_idx, c.points.end());
      const int n = static_cast<int>(c.points.size());
      for (auto& idx : c.flagged_vertices) idx = (idx - min_idx + n) % n;
      std::sort(c.flagged_vertices.begin(), c.flagged_vertices.end());
    }
  }
  std::sort(curves.begin(), curves.end(), [](const LevelCurve& a, const LevelCurve& b) {
    if (a.points.empty() || b.points.empty()) return a.points.size() < b.points.size();
    if (a.points.front().x != b.points.front().x) return a.points.front().x < b.points.front().x;
    if (a.points.front().y != b.points.front().y) return a.points.front().y < b.points.front().y;
    return a.points.size() < b.points.size();
  });
}

}  // namespace

Window default_window(const MapSpec& spec) {
  const double side = 4.0 * std::max(spec.xi.norm(), 2.0);
  Window w;
  w.x_min = -side / 2.0;
  w.x_max = side / 2.0;
  w.y_min = -side / 2.0;
  w.y_max = side / 2.0;
  return w;
}

std::vector<LevelCurve> extract_levelset_fn(const std::function<double(Vec2)>& f,
                                            const Window& window,
                                            const LevelsetOptions& opts) {
  const int n = opts.resolution;
  const double hx = window.width() / n;
  const double hy = window.height() / n;

  std::vector<double> samples(static_cast<size_t>(n + 1) * (n + 1));
  auto node_pos = [&](int i, int j) {
    return Vec2{window.x_min + i * hx, window.y_min + j * hy};
  };
  auto sample_rows = [&](int j0, int j1) {
    for (int j = j0; j < j1; ++j) {
      for (int i = 0; i <= n; ++i) {
        samples[static_cast<size_t>(j) * (n + 1) + i] = f(node_pos(i, j));
      }
    }
  };
  const int workers = std::max(1, opts.workers);
  if (workers == 1) {
    sample_rows(0, n + 1);
  } else {
    std::vector<std::thread> pool;
    const int chunk = (n + 1 + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
      const int j0 = w * chunk;
      const int j1 = std::min(n + 1, j0 + chunk);
      if (j0 < j1) pool.emplace_back(sample_rows, j0, j1);
    }
    for (auto& t : pool) t.join();
  }

  Builder bld;
  bld.refine_tol = opts.refine_tol;
  bld.f = &f;
  const Key h_count = static_cast<Key>(n) * (n + 1);
  const Key v_count = static_cast<Key>(n + 1) * n;
  bld.next_internal_key = h_count + v_count;

  auto value_at = [&](int i, int j) { return samples[static_cast<size_t>(j) * (n + 1) + i]; };

  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const std::array<Vec2, 4> corners = {node_pos(i, j), node_pos(i + 1, j),
                                           node_pos(i + 1, j + 1), node_pos(i, j + 1)};
      const std::array<double, 4> values = {value_at(i, j), value_at(i + 1, j),
                                            value_at(i + 1, j + 1), value_at(i, j + 1)};
      auto edge_spec = [&](int e) -> EdgeSpec {
        Key key = 0;
        switch (e) {
          case 0: key = static_cast<Key>(j) * n + i; break;                       // bottom
          case 2: key = static_cast<Key>(j + 1) * n + i; break;                   // top
          case 3: key = h_count + static_cast<Key>(j) * (n + 1) + i; break;       // left
          case 1: key = h_count + static_cast<Key>(j) * (n + 1) + (i + 1); break; // right
        }
        return EdgeSpec{key, corners[kEdgeEnds[e][0]], corners[kEdgeEnds[e][1]],
                        values[kEdgeEnds[e][0]], values[kEdgeEnds[e][1]], false};
      };
      emit_cell(bld, corners, values, edge_spec, true, f);
    }
  }

  auto curves = chain_curves(bld, CurveKind::kappa);
  normalize_curves(curves);
  return curves;
}

std::vector<LevelCurve> extract_levelset(const MapSpec& spec, CurveKind kind,
                                         const Window& window, const LevelsetOptions& opts) {
  std::function<double(Vec2)> f;
  switch (kind) {
    case CurveKind::kappa:
      f = [&spec](Vec2 x) { return det_site_matrix(spec, x); };
      break;
    case CurveKind::fold1:
      f = [&spec](Vec2 x) { return fold_function(spec, 0, x); };
      break;
    case CurveKind::fold2:
      f = [&spec](Vec2 x) { return fold_function(spec, 1, x); };
      break;
  }
  auto curves = extract_levelset_fn(f, window, opts);

  const double cell_diag = std::hypot(window.width() / opts.resolution,
                                      window.height() / opts.resolution);
  for (auto& c : curves) {
    c.kind = kind;
    for (const auto& p : c.points) {
      if (p.norm() <= cell_diag) c.through_origin = true;
      if ((p - spec.xi).norm() <= cell_diag) c.through_xi = true;
    }
  }
  return curves;
}

std::vector<FoldCandidate> fold_candidates(const MapSpec& spec, const Window& window,
                                           const FoldCandidateOptions& opts,
                                           std::vector<FoldCandidate>* degenerate_out) {
  LevelsetOptions ls_opts;
  ls_opts.resolution = opts.resolution;
  const auto kappa = extract_levelset(spec, CurveKind::kappa, window, ls_opts);

  struct RawCandidate {
    FoldCandidate cand;
    double angle = 0.0;  // kernel angle mod pi, for pair detection
    bool degenerate = false;
  };
  std::vector<RawCandidate> raw;

  auto refine_candidate = [&](Vec2 guess, int row) -> std::optional<FoldCandidate> {
    Vec2 u = guess;
    for (int it = 0; it < 60; ++it) {
      const double fd = det_site_matrix(spec, u);
      const double fg = fold_function(spec, row, u);
      const Vec2 gd = det_site_matrix_grad(spec, u);
      const Vec2 gg = fold_function_grad(spec, row, u);
      const double tol_d = opts.newton_tol * std::max(1.0, gd.norm());
      const double tol_g = opts.newton_tol * std::max(1.0, gg.norm());
      if (std::abs(fd) <= tol_d && std::abs(fg) <= tol_g) {
        FoldCandidate cand;
        cand.x = u;
        cand.row = row;
        cand.residual_det = fd;
        cand.residual_gamma = fg;
        return cand;
      }
      const Mat2 jac{gd.x, gd.y, gg.x, gg.y};
      Vec2 step;
      try {
        step = solve2(jac, {fd, fg});
      } catch (const NumericalError&) {
        return std::nullopt;
      }
      u -= step;
      if (step.norm() > 1.0) return std::nullopt;  // diverging away from the bracket
    }
    return std::nullopt;
  };

  auto kernel_angle_at = [&](const Vec2& x) {
    const Mat2 a = site_matrix(spec, x);
    const Vec2 r = a.row(0).norm() >= a.row(1).norm() ? a.row(0) : a.row(1);
    double angle = wrap_angle_2pi(std::atan2(-r.x, r.y));
    if (angle >= kPi) angle -= kPi;
    return angle;
  };

  for (const auto& curve : kappa) {
    for (int row = 0; row < 2; ++row) {
      const size_t n = curve.points.size();
      if (n < 2) continue;
      const size_t last = curve.closed ? n : n - 1;
      std::vector<size_t> chain;  // indices into raw, in polyline order
      for (size_t k = 0; k < last; ++k) {
        const Vec2& pa = curve.points[k];
        const Vec2& pb = curve.points[(k + 1) % n];
        const double ga = fold_function(spec, row, pa);
        const double gb = fold_function(spec, row, pb);
        if ((ga >= 0.0) == (gb >= 0.0)) continue;
        if (auto cand = refine_candidate(0.5 * (pa + pb), row)) {
          RawCandidate rc;
          rc.cand = *cand;
          rc.angle = kernel_angle_at(cand->x);
          chain.push_back(raw.size());
          raw.push_back(rc);
        }
      }
      // Adjacent crossings along the curve with nearly equal kernel angles
      // form a sub-resolution pair.
      for (size_t k = 0; k + 1 < chain.size(); ++k) {
        double gap = std::abs(raw[chain[k]].angle - raw[chain[k + 1]].angle);
        gap = std::min(gap, kPi - gap);
        if (gap < opts.pair_angle_tol) {
          raw[chain[k]].degenerate = true;
          raw[chain[k + 1]].degenerate = true;
        }
      }
    }
  }

  // Validate and tag.
  struct Tagged {
    FoldCandidate cand;
    bool degenerate;
  };
  std::vector<Tagged> valid;
  for (auto& rc : raw) {
    FoldCandidate cand = rc.cand;
    if (!window.contains(cand.x)) continue;
    const Mat2 a = site_matrix(spec, cand.x);
    // Prefer the better-conditioned row for reporting the kernel line.
    const int row = a.row(0).norm() >= a.row(1).norm() ? 0 : 1;
    const Vec2 r = a.row(row);
    const double a_scale = std::abs(a.a) + std::abs(a.b) + std::abs(a.c) + std::abs(a.d);
    if (r.norm() <= 1e-8 * std::max(1.0, a_scale)) continue;  // row validity fails

    const Vec2 gd = det_site_matrix_grad(spec, cand.x);
    const Vec2 gg = fold_function_grad(spec, row, cand.x);
    const auto sv = singular_values2({gd.x, gd.y, gg.x, gg.y});
    if (sv[0] <= 0.0 || sv[1] / sv[0] < opts.rank_ratio_min) continue;  // near-tangent

    const QuadForm q = quad_form(spec, cand.x);
    const double q_scale = std::max({1.0, std::abs(q.b), std::abs(q.c), std::abs(q.e)});
    if (std::abs(q.b) <= 1e-9 * q_scale) {
      if (std::abs(r.x * q.c - r.y * q.e) > 1e-6 * q_scale * std::max(1.0, r.norm())) continue;
      cand.case_tag = 1;
    } else {
      if (q.c * q.c - 4.0 * q.b * q.e < -1e-9 * q_scale * q_scale) continue;
      cand.case_tag = 2;
    }

    cand.row = row;
    cand.kernel_angle = rc.angle;
    valid.push_back({cand, rc.degenerate});
  }

  std::sort(valid.begin(), valid.end(), [](const Tagged& a, const Tagged& b) {
    if (a.cand.x.x != b.cand.x.x) return a.cand.x.x < b.cand.x.x;
    return a.cand.x.y < b.cand.x.y;
  });
  std::vector<FoldCandidate> out;
  std::vector<FoldCandidate> degenerate;
  auto near_any = [&](const std::vector<FoldCandidate>& list, const Vec2& x) {
    for (const auto& kept : list) {
      if ((kept.x - x).norm() < opts.dedupe_dist) return true;
    }
    return false;
  };
  for (const auto& t : valid) {
    auto& sink = t.degenerate ? degenerate : out;
    if (!near_any(sink, t.cand.x)) sink.push_back(t.cand);
  }
  if (degenerate_out) *degenerate_out = degenerate;
  return out;
}

}  // namespace spiral::planar
