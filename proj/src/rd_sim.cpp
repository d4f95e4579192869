#include "spiral/rd_sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <thread>

namespace spiral::rd {

void laplacian_5pt(const std::vector<double>& f, int n, double h, std::vector<double>* out) {
  if (h <= 0.0) throw ConfigError("laplacian_5pt: spacing must be positive");
  out->resize(f.size());
  const double inv_h2 = 1.0 / (h * h);
  for (int j = 0; j < n; ++j) {
    const int jm = j == 0 ? 1 : j - 1;
    const int jp = j == n - 1 ? n - 2 : j + 1;
    for (int i = 0; i < n; ++i) {
      const int im = i == 0 ? 1 : i - 1;
      const int ip = i == n - 1 ? n - 2 : i + 1;
      (*out)[j * n + i] = (f[j * n + im] + f[j * n + ip] + f[jm * n + i] + f[jp * n + i] -
                           4.0 * f[j * n + i]) *
                          inv_h2;
    }
  }
}

Simulator::Simulator(const ModelSpec& model, const GridConfig& grid, int workers)
    : model_(model), workers_(std::max(1, workers)) {
  model_.validate();
  state_.grid = grid;
  const size_t cells = static_cast<size_t>(grid.n) * grid.n;
  state_.u.assign(cells, 0.0);
  state_.v.assign(cells, 0.0);
  phi_u_.assign(cells, 0.0);
  phi_v_.assign(cells, 0.0);
  for (auto* buf : {&k1u_, &k1v_, &k2u_, &k2v_, &k3u_, &k3v_, &k4u_, &k4v_, &tmpu_, &tmpv_}) {
    buf->assign(cells, 0.0);
  }

  double u0, v0;
  model_.rest_state(&u0, &v0);
  std::fill(state_.u.begin(), state_.u.end(), u0);
  std::fill(state_.v.begin(), state_.v.end(), v0);

  std::vector<double> amps;
  for (const auto& bell : model_.bells) amps.push_back(bell.amplitude);
  set_bell_amplitudes(amps);
}

void Simulator::set_bell_amplitudes(const std::vector<double>& amplitudes) {
  if (amplitudes.size() != model_.bells.size()) {
    throw ConfigError("set_bell_amplitudes: amplitude count mismatch");
  }
  for (size_t b = 0; b < amplitudes.size(); ++b) model_.bells[b].amplitude = amplitudes[b];

  const int n = state_.grid.n;
  std::fill(phi_u_.begin(), phi_u_.end(), 0.0);
  std::fill(phi_v_.begin(), phi_v_.end(), 0.0);
  for (const auto& bell : model_.bells) {
    auto& target = bell.target == Species::u ? phi_u_ : phi_v_;
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        target[j * n + i] += bell.eval(state_.grid.node(i, j));
      }
    }
  }
}

CrossFieldInit Simulator::default_cross_field(const Vec2& core) const {
  CrossFieldInit init;
  init.core = core;
  model_.rest_state(&init.u_rest, &init.v_rest);
  init.u_excited = model_.excited_u();
  if (model_.kinetics == Kinetics::fhn) {
    init.v_elevated = init.v_rest + 0.8;
  } else {
    init.v_elevated = init.v_rest + 0.25;
  }
  return init;
}

void Simulator::apply_cross_field(const CrossFieldInit& init) {
  const int n = state_.grid.n;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const Vec2 p = state_.grid.node(i, j);
      const bool excited = init.mirror ? p.y < init.core.y : p.y > init.core.y;
      state_.u[j * n + i] = excited ? init.u_excited : init.u_rest;
      state_.v[j * n + i] = p.x > init.core.x ? init.v_elevated : init.v_rest;
    }
  }
  state_.time = 0.0;
  last_core_ = init.core;
}

double Simulator::cfl_limit() const {
  const double dmax = std::max(model_.diff_u, model_.diff_v);
  const double h = state_.grid.spacing();
  if (dmax <= 0.0) return std::numeric_limits<double>::infinity();
  return h * h / (4.0 * dmax);
}

void Simulator::rhs(const std::vector<double>& u, const std::vector<double>& v,
                    std::vector<double>* du, std::vector<double>* dv) const {
  const int n = state_.grid.n;
  const double h = state_.grid.spacing();
  const double inv_h2 = 1.0 / (h * h);
  const double cu = model_.diff_u;
  const double cv = model_.diff_v;

  auto block = [&](int j0, int j1) {
    for (int j = j0; j < j1; ++j) {
      const int jm = j == 0 ? 1 : j - 1;
      const int jp = j == n - 1 ? n - 2 : j + 1;
      for (int i = 0; i < n; ++i) {
        const int im = i == 0 ? 1 : i - 1;
        const int ip = i == n - 1 ? n - 2 : i + 1;
        const int idx = j * n + i;
        double ru, rv;
        model_.reaction(u[idx], v[idx], phi_u_[idx], phi_v_[idx], &ru, &rv);
        const double lap_u =
            (u[j * n + im] + u[j * n + ip] + u[jm * n + i] + u[jp * n + i] - 4.0 * u[idx]) *
            inv_h2;
        (*du)[idx] = ru + cu * lap_u;
        if (cv != 0.0) {
          const double lap_v =
              (v[j * n + im] + v[j * n + ip] + v[jm * n + i] + v[jp * n + i] - 4.0 * v[idx]) *
              inv_h2;
          (*dv)[idx] = rv + cv * lap_v;
        } else {
          (*dv)[idx] = rv;
        }
      }
    }
  };

  if (workers_ == 1) {
    block(0, n);
    return;
  }
  std::vector<std::thread> pool;
  const int chunk = (n + workers_ - 1) / workers_;
  for (int w = 0; w < workers_; ++w) {
    const int j0 = w * chunk;
    const int j1 = std::min(n, j0 + chunk);
    if (j0 < j1) pool.emplace_back(block, j0, j1);
  }
  for (auto& t : pool) t.join();
}

void Simulator::check_finite() const {
  const int n = state_.grid.n;
  for (size_t idx = 0; idx < state_.u.size(); ++idx) {
    if (!std::isfinite(state_.u[idx]) || !std::isfinite(state_.v[idx])) {
      const int i = static_cast<int>(idx) % n;
      const int j = static_cast<int>(idx) / n;
      const Vec2 p = state_.grid.node(i, j);
      char msg[160];
      std::snprintf(msg, sizeof(msg),
                    "rd step: blow-up at t=%.6f, node (%d, %d) = (%.3f, %.3f)", state_.time, i,
                    j, p.x, p.y);
      throw NumericalError(msg);
    }
  }
}

void Simulator::step(Scheme scheme, double dt) {
  const size_t cells = state_.u.size();
  auto& u = state_.u;
  auto& v = state_.v;

  if (scheme == Scheme::rk2) {
    rhs(u, v, &k1u_, &k1v_);
    for (size_t c = 0; c < cells; ++c) {
      tmpu_[c] = u[c] + dt * k1u_[c];
      tmpv_[c] = v[c] + dt * k1v_[c];
    }
    rhs(tmpu_, tmpv_, &k2u_, &k2v_);
    for (size_t c = 0; c < cells; ++c) {
      u[c] += 0.5 * dt * (k1u_[c] + k2u_[c]);
      v[c] += 0.5 * dt * (k1v_[c] + k2v_[c]);
    }
  } else {
    rhs(u, v, &k1u_, &k1v_);
    for (size_t c = 0; c < cells; ++c) {
      tmpu_[c] = u[c] + 0.5 * dt * k1u_[c];
      tmpv_[c] = v[c] + 0.5 * dt * k1v_[c];
    }
    rhs(tmpu_, tmpv_, &k2u_, &k2v_);
    for (size_t c = 0; c < cells; ++c) {
      tmpu_[c] = u[c] + 0.5 * dt * k2u_[c];
      tmpv_[c] = v[c] + 0.5 * dt * k2v_[c];
    }
    rhs(tmpu_, tmpv_, &k3u_, &k3v_);
    for (size_t c = 0; c < cells; ++c) {
      tmpu_[c] = u[c] + dt * k3u_[c];
      tmpv_[c] = v[c] + dt * k3v_[c];
    }
    rhs(tmpu_, tmpv_, &k4u_, &k4v_);
    for (size_t c = 0; c < cells; ++c) {
      u[c] += dt / 6.0 * (k1u_[c] + 2.0 * k2u_[c] + 2.0 * k3u_[c] + k4u_[c]);
      v[c] += dt / 6.0 * (k1v_[c] + 2.0 * k2v_[c] + 2.0 * k3v_[c] + k4v_[c]);
    }
  }
  state_.time += dt;
  check_finite();
}

void Simulator::advance(Scheme scheme, double dt, int steps) {
  for (int k = 0; k < steps; ++k) step(scheme, dt);
}

std::optional<Vec2> Simulator::tip(double iso_u, double iso_v,
                                   const std::optional<Vec2>& prev) const {
  const int n = state_.grid.n;
  const double h = state_.grid.spacing();
  std::vector<Vec2> candidates;

  for (int j = 0; j + 1 < n; ++j) {
    for (int i = 0; i + 1 < n; ++i) {
      const double a00 = state_.u[j * n + i] - iso_u;
      const double a10 = state_.u[j * n + i + 1] - iso_u;
      const double a01 = state_.u[(j + 1) * n + i] - iso_u;
      const double a11 = state_.u[(j + 1) * n + i + 1] - iso_u;
      if ((a00 > 0) == (a10 > 0) && (a10 > 0) == (a01 > 0) && (a01 > 0) == (a11 > 0)) {
        continue;
      }
      const double b00 = state_.v[j * n + i] - iso_v;
      const double b10 = state_.v[j * n + i + 1] - iso_v;
      const double b01 = state_.v[(j + 1) * n + i] - iso_v;
      const double b11 = state_.v[(j + 1) * n + i + 1] - iso_v;
      if ((b00 > 0) == (b10 > 0) && (b10 > 0) == (b01 > 0) && (b01 > 0) == (b11 > 0)) {
        continue;
      }

      // Bilinear Newton for the in-cell contour intersection.
      double s = 0.5, t = 0.5;
      bool ok = false;
      for (int it = 0; it < 25; ++it) {
        const double av = a00 * (1 - s) * (1 - t) + a10 * s * (1 - t) + a01 * (1 - s) * t +
                          a11 * s * t;
        const double bv = b00 * (1 - s) * (1 - t) + b10 * s * (1 - t) + b01 * (1 - s) * t +
                          b11 * s * t;
        const Mat2 jac{(a10 - a00) * (1 - t) + (a11 - a01) * t,
                       (a01 - a00) * (1 - s) + (a11 - a10) * s,
                       (b10 - b00) * (1 - t) + (b11 - b01) * t,
                       (b01 - b00) * (1 - s) + (b11 - b10) * s};
        Vec2 delta;
        try {
          delta = solve2(jac, {av, bv});
        } catch (const NumericalError&) {
          break;
        }
        s -= delta.x;
        t -= delta.y;
        if (std::abs(delta.x) < 1e-12 && std::abs(delta.y) < 1e-12) {
          ok = true;
          break;
        }
        if (s < -1.0 || s > 2.0 || t < -1.0 || t > 2.0) break;
      }
      if (ok && s >= -0.01 && s <= 1.01 && t >= -0.01 && t <= 1.01) {
        const Vec2 base = state_.grid.node(i, j);
        candidates.push_back({base.x + s * h, base.y + t * h});
      }
    }
  }

  if (candidates.empty()) return std::nullopt;
  const Vec2 ref = prev.value_or(Vec2{0.0, 0.0});
  return *std::min_element(candidates.begin(), candidates.end(),
                           [&ref](const Vec2& a, const Vec2& b) {
                             return (a - ref).norm2() < (b - ref).norm2();
                           });
}

std::pair<double, double> Simulator::auto_iso() const {
  const double u_max = *std::max_element(state_.u.begin(), state_.u.end());
  const double u_min = *std::min_element(state_.u.begin(), state_.u.end());
  const double iso_u = 0.2 * u_max;
  const double band = 0.02 * std::max(u_max - u_min, 1e-12);
  double sum_v = 0.0;
  int count = 0;
  for (size_t idx = 0; idx < state_.u.size(); ++idx) {
    if (std::abs(state_.u[idx] - iso_u) <= band) {
      sum_v += state_.v[idx];
      ++count;
    }
  }
  double iso_v;
  if (count > 0) {
    iso_v = sum_v / count;
  } else {
    iso_v = 0.0;
    for (double val : state_.v) iso_v += val;
    iso_v /= static_cast<double>(state_.v.size());
  }
  return {iso_u, iso_v};
}

// --- Spectral tip analysis ---------------------------------------------------

namespace {

void fft_pow2(std::vector<Complex>& a, bool inverse) {
  const size_t n = a.size();
  for (size_t i = 1, j = 0; i < n; ++i) {
    size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (size_t len = 2; len <= n; len <<= 1) {
    const double ang = (inverse ? 1.0 : -1.0) * kTwoPi / static_cast<double>(len);
    const Complex wl{std::cos(ang), std::sin(ang)};
    for (size_t i = 0; i < n; i += len) {
      Complex w{1.0, 0.0};
      for (size_t k = 0; k < len / 2; ++k) {
        const Complex lo = a[i + k];
        const Complex hi = a[i + k + len / 2] * w;
        a[i + k] = lo + hi;
        a[i + k + len / 2] = lo - hi;
        w *= wl;
      }
    }
  }
  if (inverse) {
    for (auto& z : a) z /= static_cast<double>(n);
  }
}

// DFT of arbitrary length (Bluestein when the size is not a power of two).
std::vector<Complex> dft(const std::vector<Complex>& x) {
  const size_t n = x.size();
  if (n == 0) return {};
  if ((n & (n - 1)) == 0) {
    auto a = x;
    fft_pow2(a, false);
    return a;
  }
  size_t m = 1;
  while (m < 2 * n - 1) m <<= 1;
  std::vector<Complex> a(m, Complex{0.0, 0.0});
  std::vector<Complex> b(m, Complex{0.0, 0.0});
  std::vector<Complex> w(n);
  for (size_t k = 0; k < n; ++k) {
    const long long k2 = static_cast<long long>(k) * static_cast<long long>(k) %
                         (2 * static_cast<long long>(n));
    const double ang = -kPi * static_cast<double>(k2) / static_cast<double>(n);
    w[k] = {std::cos(ang), std::sin(ang)};
    a[k] = x[k] * w[k];
  }
  b[0] = std::conj(w[0]);
  for (size_t k = 1; k < n; ++k) {
    b[k] = std::conj(w[k]);
    b[m - k] = b[k];
  }
  fft_pow2(a, false);
  fft_pow2(b, false);
  for (size_t k = 0; k < m; ++k) a[k] *= b[k];
  fft_pow2(a, true);
  std::vector<Complex> out(n);
  for (size_t k = 0; k < n; ++k) out[k] = a[k] * w[k];
  return out;
}

}  // namespace

AnchoringResult anchoring_center(const std::vector<TipSample>& tips,
                                 double transient_fraction, double drift_threshold,
                                 double min_periods) {
  AnchoringResult res;
  if (tips.size() < 16) {
    res.note = "too few tip samples";
    return res;
  }
  size_t start = static_cast<size_t>(std::floor(tips.size() * transient_fraction));
  if (tips.size() - start < 16) start = tips.size() - 16;
  const size_t m = tips.size() - start;
  const double t0 = tips[start].t;
  const double t1 = tips.back().t;
  const double dt_s = (t1 - t0) / static_cast<double>(m - 1);

  std::vector<Complex> z(m);
  Complex mean{0.0, 0.0};
  for (size_t k = 0; k < m; ++k) {
    z[k] = {tips[start + k].pos.x, tips[start + k].pos.y};
    mean += z[k];
  }
  mean /= static_cast<double>(m);
  res.center = {mean.real(), mean.imag()};

  const auto spectrum = dft(z);
  size_t k_star = 1;
  double peak = -1.0;
  std::vector<double> mags;
  mags.reserve(m - 1);
  for (size_t k = 1; k < m; ++k) {
    const double mag = std::abs(spectrum[k]);
    mags.push_back(mag);
    if (mag > peak) {
      peak = mag;
      k_star = k;
    }
  }
  std::nth_element(mags.begin(), mags.begin() + mags.size() / 2, mags.end());
  const double median = mags[mags.size() / 2];
  res.radius = peak / static_cast<double>(m);

  double cycles = k_star <= m / 2 ? static_cast<double>(k_star)
                                  : static_cast<double>(k_star) - static_cast<double>(m);
  // Sub-bin refinement by a parabola on the peak magnitudes, skipped when
  // the neighbors are at leakage-free noise level (exact whole periods).
  const size_t kl = (k_star + m - 1) % m;
  const size_t kr = (k_star + 1) % m;
  if (kl != 0 && kr != 0) {
    const double y0 = std::abs(spectrum[kl]);
    const double y1 = peak;
    const double y2 = std::abs(spectrum[kr]);
    if (std::max(y0, y2) > 1e-9 * y1) {
      const double denom = y0 - 2.0 * y1 + y2;
      if (denom != 0.0) {
        const double delta = std::clamp(0.5 * (y0 - y2) / denom, -0.5, 0.5);
        cycles += cycles >= 0 ? delta : -delta;
      }
    }
  }
  if (cycles == 0.0) {
    res.note = "no rotation frequency";
    return res;
  }
  res.period = static_cast<double>(m) * dt_s / std::abs(cycles);

  if (peak < 5.0 * std::max(median, 1e-300)) {
    res.note = "no dominant spectral peak";
    return res;
  }
  if (std::abs(cycles) < min_periods) {
    res.note = "window shorter than the minimum rotation count";
    return res;
  }

  // Center over the largest whole number of periods (from the tail).
  const double spp = res.period / dt_s;
  const size_t n_cycles = static_cast<size_t>(std::floor(static_cast<double>(m) / spp));
  const size_t n_crop =
      std::min(m, static_cast<size_t>(std::llround(static_cast<double>(n_cycles) * spp)));
  Complex c{0.0, 0.0};
  for (size_t k = m - n_crop; k < m; ++k) c += z[k];
  c /= static_cast<double>(n_crop);
  res.center = {c.real(), c.imag()};

  // Drift from the linear trend of per-period block means (the rotation
  // averages out block-wise, so an anchored circle gives slope ~ 0).
  if (n_cycles >= 2) {
    std::vector<Complex> block_mean;
    std::vector<double> block_time;
    for (size_t blk = 0; blk < n_cycles; ++blk) {
      const size_t lo = m - n_crop + static_cast<size_t>(std::llround(blk * spp));
      const size_t hi =
          std::min(m, m - n_crop + static_cast<size_t>(std::llround((blk + 1) * spp)));
      if (hi <= lo) continue;
      Complex sum{0.0, 0.0};
      for (size_t k = lo; k < hi; ++k) sum += z[k];
      block_mean.push_back(sum / static_cast<double>(hi - lo));
      block_time.push_back(t0 + dt_s * (static_cast<double>(lo + hi) / 2.0));
    }
    if (block_mean.size() >= 2) {
      double tbar = 0.0;
      Complex zbar{0.0, 0.0};
      for (size_t k = 0; k < block_mean.size(); ++k) {
        tbar += block_time[k];
        zbar += block_mean[k];
      }
      tbar /= static_cast<double>(block_mean.size());
      zbar /= static_cast<double>(block_mean.size());
      Complex num{0.0, 0.0};
      double den = 0.0;
      for (size_t k = 0; k < block_mean.size(); ++k) {
        num += (block_mean[k] - zbar) * (block_time[k] - tbar);
        den += (block_time[k] - tbar) * (block_time[k] - tbar);
      }
      res.drift_speed = den > 0.0 ? std::abs(num) / den : 0.0;
    }
  }

  const double drift_per_period = res.drift_speed * res.period;
  if (drift_per_period > drift_threshold * std::max(res.radius, 1e-12)) {
    res.note = "drifting (unanchored)";
    return res;
  }
  res.anchored = true;
  return res;
}

ExperimentResult run_experiment(Simulator& sim, const ExperimentConfig& cfg) {
  ExperimentResult out;
  const double dt = sim.state().grid.dt;
  const int steps = std::max(1, static_cast<int>(std::llround(cfg.duration / dt)));
  std::optional<Vec2> prev = sim.last_core();
  double iso_u = cfg.iso_u;
  double iso_v = cfg.iso_v;
  int frame_id = 0;

  for (int k = 0; k < steps; ++k) {
    sim.step(cfg.scheme, dt);
    if ((k + 1) % cfg.tip_every == 0) {
      if (cfg.auto_iso) {
        std::tie(iso_u, iso_v) = sim.auto_iso();
      }
      const auto tp = sim.tip(iso_u, iso_v, prev);
      if (tp) {
        out.tips.push_back({sim.state().time, *tp});
        prev = tp;
      }
    }
    if (cfg.frame_every > 0 && (k + 1) % cfg.frame_every == 0) {
      char name[64];
      std::snprintf(name, sizeof(name), "%s%05d.pgm", cfg.frame_prefix.c_str(), frame_id++);
      write_pgm(name, sim.state().u, sim.state().grid.n);
    }
  }
  out.anchoring = anchoring_center(out.tips, cfg.transient_fraction);
  return out;
}

std::vector<SweepRecord> run_sweep(Simulator& sim, const SweepConfig& cfg) {
  if (sim.model().bells.size() < 2) {
    throw ConfigError("run_sweep: need at least two bells for the amplitude path");
  }
  std::vector<SweepRecord> records;
  const double dt = sim.state().grid.dt;
  const int settle_steps = static_cast<int>(std::llround(cfg.settle_duration / dt));

  for (int k = 0; k < cfg.steps; ++k) {
    const double tau = cfg.steps == 1
                           ? cfg.tau_begin
                           : cfg.tau_begin + (cfg.tau_end - cfg.tau_begin) * k / (cfg.steps - 1);
    std::vector<double> amps;
    for (const auto& bell : sim.model().bells) amps.push_back(bell.amplitude);
    amps[0] = cfg.rho * std::cos(tau);
    amps[1] = cfg.rho * std::sin(tau);
    sim.set_bell_amplitudes(amps);

    sim.advance(cfg.experiment.scheme, dt, settle_steps);
    ExperimentConfig mcfg = cfg.experiment;
    mcfg.duration = cfg.measure_duration;
    const auto result = run_experiment(sim, mcfg);
    records.push_back({tau, result.anchoring});
  }
  return records;
}

HysteresisSummary analyze_hysteresis(const std::vector<SweepRecord>& forward,
                                     const std::vector<SweepRecord>& reverse,
                                     double jump_threshold) {
  HysteresisSummary summary;
  auto jumps = [&](const std::vector<SweepRecord>& recs, std::vector<double>* out) {
    for (size_t k = 1; k < recs.size(); ++k) {
      if (!recs[k].result.anchored || !recs[k - 1].result.anchored) continue;
      if ((recs[k].result.center - recs[k - 1].result.center).norm() > jump_threshold) {
        out->push_back(0.5 * (recs[k].tau + recs[k - 1].tau));
      }
    }
  };
  jumps(forward, &summary.forward_jumps);
  jumps(reverse, &summary.reverse_jumps);

  bool any = false;
  double lo = 0.0, hi = 0.0;
  for (const auto& f : forward) {
    for (const auto& r : reverse) {
      if (std::abs(f.tau - r.tau) > 1e-9) continue;
      if (!f.result.anchored || !r.result.anchored) continue;
      if ((f.result.center - r.result.center).norm() > jump_threshold) {
        if (!any) {
          lo = hi = f.tau;
          any = true;
        } else {
          lo = std::min(lo, f.tau);
          hi = std::max(hi, f.tau);
        }
      }
    }
  }
  summary.disagreement = any && hi > lo;
  summary.tau_lo = lo;
  summary.tau_hi = hi;
  return summary;
}

void write_pgm(const std::string& path, const std::vector<double>& field, int n) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("write_pgm: cannot open " + path);
  const double lo = *std::min_element(field.begin(), field.end());
  const double hi = *std::max_element(field.begin(), field.end());
  const double scale = hi > lo ? 255.0 / (hi - lo) : 0.0;
  out << "P5\n" << n << " " << n << "\n255\n";
  std::vector<unsigned char> row(n);
  for (int j = n - 1; j >= 0; --j) {  // top row first
    for (int i = 0; i < n; ++i) {
      row[i] = static_cast<unsigned char>(std::lround((field[j * n + i] - lo) * scale));
    }
    out.write(reinterpret_cast<const char*>(row.data()), n);
  }
}

}  // namespace spiral::rd
