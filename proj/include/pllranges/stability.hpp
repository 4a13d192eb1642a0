#pragma once

#include <vector>

#include "pllranges/equilibria.hpp"
#include "pllranges/interval_union.hpp"
#include "pllranges/model.hpp"
#include "pllranges/polynomial.hpp"

namespace pllranges {

// Characteristic polynomial s d(s) + K a(s) of the linearization, K = L phi'(theta_eq),
// scaled so the leading coefficient is positive.
struct CharPoly {
  poly::Coeffs coeffs;  // ascending powers
  double K = 0.0;
};

CharPoly char_poly(const PllModel& model, double theta_eq);
CharPoly char_poly(const PllModel& model, const Equilibrium& eq);

// Routh array test. Requires a nonzero last coefficient.
Stability routh_hurwitz(const poly::Coeffs& p);

Stability classify(const PllModel& model, double theta_eq);
// Writes the verdict into eq and returns it.
Stability classify(const PllModel& model, Equilibrium& eq);

// True when the model has at least one asymptotically stable equilibrium.
bool hold_in_member(const PllModel& model);

struct HoldInOptions {
  double omega_max = 0.0;  // <= 0: 1.01 x existence bound (10 L with a pole at zero)
  int grid = 2048;
  bool signed_sweep = false;  // sweep [-omega_max, omega_max] instead of [0, omega_max]
  int jobs = 0;
};

struct BoundaryRefinement {
  double omega = 0.0;   // midpoint of the final bracket
  double width = 0.0;   // final bracket width
  bool member_below = false;
};

struct HoldInResult {
  IntervalUnion set;
  std::vector<BoundaryRefinement> boundaries;
  double omega_max = 0.0;
  int samples = 0;
  bool reaches_omega_max = false;  // top interval was cut by the sweep limit
};

HoldInResult hold_in_set(const LoopSpec& spec, const HoldInOptions& opts = {});

// Frequencies where a root of the characteristic polynomial can cross the imaginary axis.
std::vector<double> critical_omegas(const PllModel& model);

struct HoldInFrequency {
  bool defined = false;  // false when 0 is not in the hold-in set
  double value = 0.0;
  bool truncated = false;  // the tracked stable branch jumped before the interval end
};

HoldInFrequency hold_in_frequency(const LoopSpec& spec, const HoldInResult& hold_in,
                                  int grid = 2048);

}  // namespace pllranges
