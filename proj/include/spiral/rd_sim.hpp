#pragma once

#include <optional>
#include <string>
#include <vector>

#include "spiral/rd_model.hpp"

namespace spiral::rd {

struct GridConfig {
  int n = 200;              // grid points per side
  double half_width = 30.0; // domain [-L, L]^2
  double dt = 0.005;

  double spacing() const { return 2.0 * half_width / (n - 1); }
  Vec2 node(int i, int j) const {
    return {-half_width + i * spacing(), -half_width + j * spacing()};
  }
};

enum class Scheme { rk2, rk4 };

struct SimState {
  GridConfig grid;
  std::vector<double> u, v;  // row-major, index j*n + i
  double time = 0.0;
};

// 5-point Laplacian with Neumann mirror ghosts (reflection across the
// boundary node).
void laplacian_5pt(const std::vector<double>& f, int n, double h, std::vector<double>* out);

struct CrossFieldInit {
  Vec2 core;          // where the free wave end (future spiral core) sits
  double u_rest = 0.0, v_rest = 0.0;
  double u_excited = 0.0;
  double v_elevated = 0.0;
  bool mirror = false;  // flips the excited half-plane: opposite chirality
};

struct TipSample {
  double t;
  Vec2 pos;
};

// Explicit-stepping simulator holding the model, grid state and the
// precomputed bell fields.
class Simulator {
 public:
  Simulator(const ModelSpec& model, const GridConfig& grid, int workers = 1);

  const ModelSpec& model() const { return model_; }
  const SimState& state() const { return state_; }
  SimState& state() { return state_; }

  // Rebuilds the bell field grids after amplitude changes (sweeps).
  void set_bell_amplitudes(const std::vector<double>& amplitudes);

  // Standard cross-field stimulus: u excited on one half-plane, v elevated
  // on the perpendicular one, free end at init.core.
  void apply_cross_field(const CrossFieldInit& init);
  CrossFieldInit default_cross_field(const Vec2& core) const;

  double cfl_limit() const;

  // One explicit step; throws NumericalError with time and location on
  // blow-up. Deterministic for a fixed worker count and also across worker
  // counts (synchronous stages, per-cell arithmetic unchanged).
  void step(Scheme scheme, double dt);
  void advance(Scheme scheme, double dt, int steps);

  // Spiral tip: transversal intersection of level contours u = iso_u and
  // v = iso_v, nearest to prev when several cells intersect.
  std::optional<Vec2> tip(double iso_u, double iso_v,
                          const std::optional<Vec2>& prev = std::nullopt) const;

  // Oregonator convention: iso_u = 0.2 * max(u), iso_v = mean v on the
  // u-front.
  std::pair<double, double> auto_iso() const;

  const std::vector<double>& phi_u() const { return phi_u_; }
  const std::vector<double>& phi_v() const { return phi_v_; }

  // Where the stimulus put the free end; used to seed the tip search.
  const std::optional<Vec2>& last_core() const { return last_core_; }

 private:
  void rhs(const std::vector<double>& u, const std::vector<double>& v,
           std::vector<double>* du, std::vector<double>* dv) const;
  void check_finite() const;

  ModelSpec model_;
  SimState state_;
  int workers_;
  std::optional<Vec2> last_core_;
  std::vector<double> phi_u_, phi_v_;
  // scratch stage arrays
  mutable std::vector<double> k1u_, k1v_, k2u_, k2v_, k3u_, k3v_, k4u_, k4v_, tmpu_, tmpv_;
};

// --- Tip-series analysis ----------------------------------------------------

struct AnchoringResult {
  bool anchored = false;
  Vec2 center;
  double period = 0.0;
  double radius = 0.0;       // dominant rotation amplitude
  double drift_speed = 0.0;  // linear trend of the tip path
  std::string note;
};

// Spectral center extraction: dominant nonzero frequency gives the rotation
// period; the center is the mean over the largest whole number of periods
// after the transient cut. Drift or a missing spectral peak yields an
// unanchored verdict.
AnchoringResult anchoring_center(const std::vector<TipSample>& tips,
                                 double transient_fraction,
                                 double drift_threshold = 0.05,
                                 double min_periods = 5.0);

// --- Experiments -------------------------------------------------------------

struct ExperimentConfig {
  Scheme scheme = Scheme::rk2;
  double duration = 400.0;
  int tip_every = 10;            // sample the tip every this many steps
  double transient_fraction = 0.5;
  bool auto_iso = false;         // derive iso levels from the state
  double iso_u = 0.0;
  double iso_v = 0.0;
  int frame_every = 0;           // 0: no frames
  std::string frame_prefix;
};

struct ExperimentResult {
  std::vector<TipSample> tips;
  AnchoringResult anchoring;
};

ExperimentResult run_experiment(Simulator& sim, const ExperimentConfig& cfg);

// --- Parameter-path sweeps ---------------------------------------------------

struct SweepConfig {
  double rho = 0.01;        // radius of the amplitude path (alpha_1, alpha_2)
  double tau_begin = 0.0;
  double tau_end = kPi / 2.0;
  int steps = 10;           // number of tau samples (inclusive of both ends)
  double settle_duration = 60.0;   // warm-up at each tau before measuring
  double measure_duration = 60.0;  // window used for the anchoring center
  ExperimentConfig experiment;     // scheme/iso/tip settings per step
};

struct SweepRecord {
  double tau;
  AnchoringResult result;
};

// Warm-started sweep along alpha(tau) = rho (cos tau, sin tau) applied to
// the first two bell amplitudes. The state carries over between steps.
std::vector<SweepRecord> run_sweep(Simulator& sim, const SweepConfig& cfg);

struct HysteresisSummary {
  bool disagreement = false;
  double tau_lo = 0.0, tau_hi = 0.0;  // disagreement interval
  std::vector<double> forward_jumps, reverse_jumps;
};

HysteresisSummary analyze_hysteresis(const std::vector<SweepRecord>& forward,
                                     const std::vector<SweepRecord>& reverse,
                                     double jump_threshold = 1.0);

// Portable graymap frame of a field (u by default), min..max scaled.
void write_pgm(const std::string& path, const std::vector<double>& field, int n);

}  // namespace spiral::rd
