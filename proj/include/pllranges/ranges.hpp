#pragma once

#include <vector>

#include "pllranges/interval_union.hpp"
#include "pllranges/model.hpp"
#include "pllranges/sim.hpp"
#include "pllranges/stability.hpp"

namespace pllranges {

// Bounds on the initial filter state; the phase always spans one period.
struct StateBox {
  std::vector<double> lo;
  std::vector<double> hi;
  bool relative = false;  // bounds are offsets from the stable equilibrium closest to zero

  void validate(int order) const;
};

// +-2 |x_eq| at the existence bound per component; with a pole at zero, offsets of
// +-2 amplitude (1 + |h|) / |c_i| around the equilibrium.
StateBox default_box(const PllModel& model);

struct PullInOptions {
  double omega_max = 0.0;  // <= 0: 1.01 x existence bound, or 10 L with a pole at zero
  int omega_grid = 16;
  int points_per_dim = 9;
  int phases = 16;
  IntegratorConfig cfg = {Method::dopri5, 1e-9, 1e-12, 0.0, 0.0, 10.0};
  LockOptions lock;
  double refine_rel = 1e-3;
  int jobs = 0;
};

struct OmegaEvidence {
  double omega = 0.0;
  bool member = false;
  bool inconclusive = false;   // some run was undecided or failed
  bool short_circuit = false;  // no stable equilibrium; nothing simulated
  int simulations = 0;
  int locked = 0;
  int not_locked = 0;
  int undecided = 0;
  int failures = 0;
};

// Pull-in ESTIMATE: simulation over a finite grid cannot certify global stability.
struct PullInResult {
  IntervalUnion estimate;
  std::vector<OmegaEvidence> evidence;  // sorted by omega
  std::vector<BoundaryRefinement> boundaries;
  double omega_max = 0.0;
};

OmegaEvidence pull_in_member(const LoopSpec& spec, double omega, const StateBox& box,
                             const PullInOptions& opts);
PullInResult pull_in_estimate(const LoopSpec& spec, const StateBox& box,
                              const PullInOptions& opts = {});

struct LockInOptions {
  double omega_hint = 0.0;  // <= 0: existence bound / 16 (L / 16 with a pole at zero)
  IntegratorConfig cfg = {Method::dopri5, 1e-9, 1e-12, 0.0, 0.0, 10.0};
  LockOptions lock;
  SlipOptions slip;
  double rel_width = 1e-3;
  int max_doublings = 40;
};

struct PredicateRun {
  double omega = 0.0;
  bool pass = false;
  LockState state = LockState::undecided;
  int slips = 0;
  double sup_deviation = 0.0;
};

// Start at the stable equilibrium of +omega closest to zero, simulate at -omega and
// require lock without slips. Needs an odd characteristic.
PredicateRun lock_in_predicate(const LoopSpec& spec, double omega, const LockInOptions& opts);

struct LockInResult {
  double omega_l = 0.0;
  double lo = 0.0;  // largest probe where the predicate held (0 if none)
  double hi = 0.0;  // smallest probe above lo where it failed
  bool unbounded = false;      // never failed up to the doubling limit
  bool zero_only = false;      // failed at every positive probe
  bool monotone = true;        // P(0.9 lo) held and P(1.1 hi) failed
  std::vector<PredicateRun> probes;
};

LockInResult lock_in_frequency(const LoopSpec& spec, const LockInOptions& opts = {});

struct BandOptions {
  int points_x = 9;
  int phases = 16;
  IntegratorConfig cfg = {Method::dopri5, 1e-9, 1e-12, 0.0, 0.0, 10.0};
  LockOptions lock;
  SlipOptions slip;
  bool verify = true;
  int jobs = 0;
};

struct BandViolation {
  double omega = 0.0;
  double x = 0.0;
  double theta = 0.0;
  LockState state = LockState::undecided;
  int slips = 0;
};

struct BandResult {
  double half_width = 0.0;  // |x_eq| of the stable equilibrium closest to zero
  int checked = 0;
  std::vector<BandViolation> violations;
};

BandResult lock_in_band(const LoopSpec& spec, double omega_tilde, const BandOptions& opts = {});

}  // namespace pllranges
