#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include "pllranges/equilibria.hpp"
#include "pllranges/model.hpp"

namespace pllranges {

enum class Method { dopri5, rk4 };

std::string_view method_name(Method m);

struct IntegratorConfig {
  Method method = Method::dopri5;
  double rel_tol = 1e-9;
  double abs_tol = 1e-12;
  double max_step = 0.0;  // <= 0: horizon / 200; also the fixed step of rk4
  double min_step = 0.0;  // <= 0: 1e-12 x horizon
  double horizon = 20.0;

  double effective_max_step() const { return max_step > 0.0 ? max_step : horizon / 200.0; }
  double effective_min_step() const { return min_step > 0.0 ? min_step : 1e-12 * horizon; }
  // Throws invalid_argument when the fields are inconsistent.
  void validate() const;
};

struct SlipOptions {
  double window_fraction = 0.1;   // trailing share of the horizon standing in for limsup
  double threshold_periods = 1.0; // 0.5 gives the half-period variant
};

struct SlipReport {
  int count = 0;               // largest k with k * threshold < limsup estimate
  bool limsup = false;         // limsup |theta(0) - theta(t)| > threshold
  bool sup = false;            // sup |theta(0) - theta(t)| > threshold
  double sup_deviation = 0.0;
  double limsup_estimate = 0.0;
  double threshold = 0.0;
};

enum class LockState { locked, not_locked, undecided };

std::string_view lock_state_name(LockState s);

struct LockOptions {
  double eps_freq = 0.0;   // <= 0: 1e-4 x max(1, |omega|)
  double eps_state = 1e-4;
  double window = 0.0;     // <= 0: 10% of the horizon
};

struct LockVerdict {
  LockState state = LockState::undecided;
  std::optional<Equilibrium> equilibrium;  // stable equilibrium reached (canonical copy)
  int cycles = 0;          // final phase = equilibrium theta + cycles * period
  double max_rate = 0.0;   // max |theta'| over the window
  double distance = 0.0;   // max distance to the equilibrium over the window
};

struct Trajectory {
  int dimension = 0;
  double period = 0.0;
  bool reversed = false;  // integrated backwards; t holds elapsed reverse time
  std::vector<double> t;
  std::vector<double> states;  // row-major, dimension entries per sample
  SlipReport slips;
  LockVerdict lock;

  std::size_t size() const noexcept { return t.size(); }
  const double* state(std::size_t i) const { return states.data() + i * dimension; }
  double theta(std::size_t i) const { return states[i * dimension + dimension - 1]; }
  Eigen::VectorXd state_vector(std::size_t i) const {
    return Eigen::Map<const Eigen::VectorXd>(state(i), dimension);
  }
};

// Returning true from the callback ends the integration after the current step.
using StopPredicate = std::function<bool(double t, const double* state)>;

// Integration without post-analysis; `reverse` integrates the time-reversed field.
Trajectory integrate_raw(const PllModel& model, const Eigen::VectorXd& initial,
                         const IntegratorConfig& cfg, bool reverse = false,
                         const StopPredicate& stop = {});

// Integration followed by slip and lock analysis with default options.
Trajectory integrate(const PllModel& model, const Eigen::VectorXd& initial,
                     const IntegratorConfig& cfg);

SlipReport detect_slips(const Trajectory& traj, const SlipOptions& opts = {});

// `stable` may be passed to avoid recomputing the equilibria of `model`.
LockVerdict detect_lock(const Trajectory& traj, const PllModel& model, const LockOptions& opts = {},
                        const std::vector<Equilibrium>* stable = nullptr);

// Distance from a state to an equilibrium with the phase compared modulo the period.
double distance_to(const PllModel& model, const double* state, const Equilibrium& eq);

// Outcome of one simulation in a sweep. Stops early once the state sits deep inside
// the linear basin of a stable equilibrium.
struct Outcome {
  LockState state = LockState::undecided;
  SlipReport slips;
  int equilibrium_branch = -1;
  int cycles = 0;
  double t_end = 0.0;
  bool failed = false;  // integrator gave up; counted as undecided
};

Outcome simulate_outcome(const PllModel& model, const Eigen::VectorXd& initial,
                         const IntegratorConfig& cfg, const std::vector<Equilibrium>& stable,
                         const LockOptions& lock = {}, const SlipOptions& slip = {});

struct MirroredTrajectory {
  PllModel model;
  Trajectory trajectory;
};

// Negated trajectory paired with the model at -omega; requires an odd characteristic.
MirroredTrajectory apply_symmetry(const PllModel& model, const Trajectory& traj);

// V = 0.5 (c.x - omega/L)^2 + (c.b / L) * integral_0^theta phi, for a first-order
// filter with its pole at zero. Along solutions dV/dt = -h (c.b) phi^2.
double integrator_lyapunov(const PllModel& model, const double* state);

struct LyapunovReport {
  int trajectories = 0;
  int violations = 0;
  double worst_increase = 0.0;  // largest V(t_{i+1}) - V(t_i) - tol
  bool pass = false;
};

LyapunovReport lyapunov_check(const PllModel& model, int trajectories, std::uint64_t seed,
                              const IntegratorConfig& cfg);

}  // namespace pllranges
