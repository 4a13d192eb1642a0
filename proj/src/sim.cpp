#include "pllranges/sim.hpp"

#include <algorithm>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "pllranges/error.hpp"

namespace pllranges {

namespace odeint = boost::numeric::odeint;

namespace {

using State = std::vector<double>;

[[noreturn]] void fail_at(double t) {
  std::ostringstream os;
  os.precision(17);
  os << "integration failure at t=" << t;
  throw Error(Errc::integration_failure, os.str());
}

bool all_finite(const State& x) {
  return std::all_of(x.begin(), x.end(), [](double v) { return std::isfinite(v); });
}

double lock_eps_freq(const PllModel& model, const LockOptions& opts) {
  return opts.eps_freq > 0.0 ? opts.eps_freq : 1e-4 * std::max(1.0, std::abs(model.omega()));
}

// Closest stable equilibrium to a state; nullptr when there are none.
const Equilibrium* nearest_equilibrium(const PllModel& model, const double* state,
                                       const std::vector<Equilibrium>& stable, double* dist) {
  const Equilibrium* best = nullptr;
  double gap = std::numeric_limits<double>::infinity();
  for (const auto& eq : stable) {
    const double d = distance_to(model, state, eq);
    if (d < gap) {
      gap = d;
      best = &eq;
    }
  }
  if (dist) *dist = gap;
  return best;
}

int cycles_from(const PllModel& model, double theta, const Equilibrium& eq) {
  return static_cast<int>(std::lround((theta - eq.theta) / model.pd().period()));
}

}  // namespace

std::string_view method_name(Method m) {
  return m == Method::dopri5 ? "dopri5" : "rk4";
}

std::string_view lock_state_name(LockState s) {
  switch (s) {
    case LockState::locked: return "locked";
    case LockState::not_locked: return "not-locked";
    case LockState::undecided: return "undecided";
  }
  return "unknown";
}

void IntegratorConfig::validate() const {
  auto bad = [](const char* what) { throw Error(Errc::invalid_argument, what); };
  if (!(horizon > 0.0) || !std::isfinite(horizon)) bad("horizon must be positive");
  if (!(rel_tol > 0.0)) bad("rel-tol must be positive");
  if (!(abs_tol > 0.0)) bad("abs-tol must be positive");
  if (!(effective_min_step() < effective_max_step())) bad("min-step must be below max-step");
}

Trajectory integrate_raw(const PllModel& model, const Eigen::VectorXd& initial,
                         const IntegratorConfig& cfg, bool reverse, const StopPredicate& stop) {
  cfg.validate();
  const int dim = model.dimension();
  if (initial.size() != dim)
    throw Error(Errc::state_dimension, "state dimension: expected " + std::to_string(dim));

  Trajectory traj;
  traj.dimension = dim;
  traj.period = model.pd().period();
  traj.reversed = reverse;

  State x(initial.data(), initial.data() + dim);
  if (!all_finite(x)) throw Error(Errc::invalid_argument, "initial state not finite");
  auto record = [&](double t) {
    traj.t.push_back(t);
    traj.states.insert(traj.states.end(), x.begin(), x.end());
  };
  auto sys = [&](const State& s, State& ds, double) {
    model.rhs(s.data(), ds.data());
    if (reverse)
      for (double& v : ds) v = -v;
  };

  const double T = cfg.horizon;
  const double hmax = cfg.effective_max_step();
  double t = 0.0;
  record(t);
  if (stop && stop(t, x.data())) return traj;

  if (cfg.method == Method::rk4) {
    odeint::runge_kutta4<State> stepper;
    const auto steps = static_cast<long long>(std::ceil(T / hmax - 1e-9));
    for (long long k = 0; k < steps; ++k) {
      const double t_next = std::min(T, static_cast<double>(k + 1) * hmax);
      stepper.do_step(sys, x, t, t_next - t);
      t = t_next;
      if (!all_finite(x)) fail_at(t);
      record(t);
      if (stop && stop(t, x.data())) break;
    }
    return traj;
  }

  auto stepper = odeint::make_controlled(cfg.abs_tol, cfg.rel_tol,
                                         odeint::runge_kutta_dopri5<State>());
  const double hmin = cfg.effective_min_step();
  State dxdt(static_cast<std::size_t>(dim));
  sys(x, dxdt, t);
  double dt = std::min(hmax, 1e-4 * T);
  while (t < T) {
    bool last = false;
    if (t + dt >= T) {
      dt = T - t;
      last = true;
    }
    const double t_before = t;
    const auto res = stepper.try_step(sys, x, dxdt, t, dt);
    if (res == odeint::success) {
      if (last) t = T;
      if (!all_finite(x)) fail_at(t_before);
      record(t);
      if (stop && stop(t, x.data())) break;
      dt = std::min(dt, hmax);
    } else if (dt < hmin) {
      fail_at(t);
    }
  }
  return traj;
}

SlipReport detect_slips(const Trajectory& traj, const SlipOptions& opts) {
  SlipReport rep;
  rep.threshold = traj.period * opts.threshold_periods;
  if (traj.size() == 0) return rep;
  const double th0 = traj.theta(0);
  const double t_end = traj.t.back();
  const double t_window = t_end - opts.window_fraction * (t_end - traj.t.front());
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const double dev = std::abs(th0 - traj.theta(i));
    rep.sup_deviation = std::max(rep.sup_deviation, dev);
    if (traj.t[i] >= t_window) rep.limsup_estimate = std::max(rep.limsup_estimate, dev);
  }
  rep.sup = rep.sup_deviation > rep.threshold;
  rep.limsup = rep.limsup_estimate > rep.threshold;
  rep.count = std::max(0, static_cast<int>(std::ceil(rep.limsup_estimate / rep.threshold)) - 1);
  return rep;
}

double distance_to(const PllModel& model, const double* state, const Equilibrium& eq) {
  const int n = model.order();
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    const double d = state[i] - eq.x[i];
    s += d * d;
  }
  const double dth = model.pd().wrap(state[n] - eq.theta);
  return std::sqrt(s + dth * dth);
}

LockVerdict detect_lock(const Trajectory& traj, const PllModel& model, const LockOptions& opts,
                        const std::vector<Equilibrium>* stable) {
  LockVerdict v;
  if (traj.size() == 0) return v;
  std::vector<Equilibrium> own;
  if (stable == nullptr) {
    own = stable_equilibria(model);
    stable = &own;
  }
  const double eps_freq = lock_eps_freq(model, opts);
  const double t_end = traj.t.back();
  const double w = opts.window > 0.0 ? opts.window : 0.1 * (t_end - traj.t.front());
  const double t_window = t_end - w;
  const std::size_t last = traj.size() - 1;

  std::size_t first = last;
  while (first > 0 && traj.t[first - 1] >= t_window) --first;

  double dist_end = 0.0;
  const Equilibrium* target = nearest_equilibrium(model, traj.state(last), *stable, &dist_end);
  Eigen::VectorXd d(traj.dimension);
  bool locked = target != nullptr;
  for (std::size_t i = first; i <= last; ++i) {
    model.rhs(traj.state(i), d.data());
    const double rate = std::abs(d[traj.dimension - 1]);
    v.max_rate = std::max(v.max_rate, rate);
    if (target) v.distance = std::max(v.distance, distance_to(model, traj.state(i), *target));
  }
  locked = locked && v.max_rate < eps_freq && v.distance < opts.eps_state;
  if (locked) {
    v.state = LockState::locked;
    v.equilibrium = *target;
    v.cycles = cycles_from(model, traj.theta(last), *target);
    return v;
  }
  // Persistent slipping: the phase drifts by more than a period inside the window.
  const double drift = std::abs(traj.theta(last) - traj.theta(first));
  v.state = drift > traj.period ? LockState::not_locked : LockState::undecided;
  return v;
}

Trajectory integrate(const PllModel& model, const Eigen::VectorXd& initial,
                     const IntegratorConfig& cfg) {
  Trajectory traj = integrate_raw(model, initial, cfg);
  traj.slips = detect_slips(traj);
  traj.lock = detect_lock(traj, model);
  return traj;
}

Outcome simulate_outcome(const PllModel& model, const Eigen::VectorXd& initial,
                         const IntegratorConfig& cfg, const std::vector<Equilibrium>& stable,
                         const LockOptions& lock, const SlipOptions& slip) {
  Outcome out;
  const double eps_freq = lock_eps_freq(model, lock);
  const int n = model.order();
  std::vector<double> d(static_cast<std::size_t>(n) + 1);
  bool converged = false;
  auto stop = [&](double, const double* s) {
    double dist = 0.0;
    if (!nearest_equilibrium(model, s, stable, &dist) || dist >= 0.1 * lock.eps_state) return false;
    model.rhs(s, d.data());
    converged = std::abs(d[static_cast<std::size_t>(n)]) < 0.1 * eps_freq;
    return converged;
  };

  Trajectory traj;
  try {
    traj = integrate_raw(model, initial, cfg, false, stop);
  } catch (const Error& e) {
    if (e.code() != Errc::integration_failure) throw;
    out.failed = true;
    return out;
  }
  out.t_end = traj.t.back();
  const std::size_t last = traj.size() - 1;

  if (converged) {
    SlipReport rep;
    rep.threshold = traj.period * slip.threshold_periods;
    const double th0 = traj.theta(0);
    for (std::size_t i = 0; i < traj.size(); ++i)
      rep.sup_deviation = std::max(rep.sup_deviation, std::abs(th0 - traj.theta(i)));
    rep.limsup_estimate = std::abs(th0 - traj.theta(last));
    rep.sup = rep.sup_deviation > rep.threshold;
    rep.limsup = rep.limsup_estimate > rep.threshold;
    rep.count = std::max(0, static_cast<int>(std::ceil(rep.limsup_estimate / rep.threshold)) - 1);
    out.slips = rep;
    out.state = LockState::locked;
    const Equilibrium* eq = nearest_equilibrium(model, traj.state(last), stable, nullptr);
    out.equilibrium_branch = eq->branch;
    out.cycles = cycles_from(model, traj.theta(last), *eq);
    return out;
  }

  out.slips = detect_slips(traj, slip);
  const LockVerdict v = detect_lock(traj, model, lock, &stable);
  out.state = v.state;
  if (v.equilibrium) {
    out.equilibrium_branch = v.equilibrium->branch;
    out.cycles = v.cycles;
  }
  return out;
}

MirroredTrajectory apply_symmetry(const PllModel& model, const Trajectory& traj) {
  if (!model.pd().odd()) throw Error(Errc::symmetry_unavailable, "symmetry unavailable");
  Trajectory m = traj;
  for (double& v : m.states) v = -v;
  m.slips = detect_slips(m);
  const PllModel mirrored = model.with_omega(-model.omega());
  m.lock = detect_lock(m, mirrored);
  return {mirrored, std::move(m)};
}

double integrator_lyapunov(const PllModel& model, const double* state) {
  if (model.order() != 1)
    throw Error(Errc::scalar_filter_required,
                "Lyapunov function defined for a first-order filter only");
  if (model.tf().zero_pole_multiplicity() != 1)
    throw Error(Errc::invalid_argument, "Lyapunov function requires a pole at zero");
  const FilterRealization& fr = model.filter();
  const double beta = fr.c[0] * fr.b[0];
  const double y = fr.c[0] * state[0] - model.omega() / model.gain();
  return 0.5 * y * y + beta / model.gain() * model.pd().integral(state[1]);
}

LyapunovReport lyapunov_check(const PllModel& model, int trajectories, std::uint64_t seed,
                              const IntegratorConfig& cfg) {
  LyapunovReport rep;
  const FilterRealization& fr = model.filter();
  // Validates the model shape before any simulation.
  Eigen::VectorXd probe = Eigen::VectorXd::Zero(model.dimension());
  (void)integrator_lyapunov(model, probe.data());

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> offset(-1.0, 1.0);
  const double P = model.pd().period();
  std::uniform_real_distribution<double> phase(-P / 2.0, P / 2.0);
  rep.worst_increase = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < trajectories; ++k) {
    Eigen::VectorXd s(2);
    s[0] = (model.omega() / model.gain() + offset(rng)) / fr.c[0];
    s[1] = phase(rng);
    const Trajectory traj = integrate_raw(model, s, cfg);
    double prev = integrator_lyapunov(model, traj.state(0));
    for (std::size_t i = 1; i < traj.size(); ++i) {
      const double cur = integrator_lyapunov(model, traj.state(i));
      const double excess = cur - prev - 1e-8 * (1.0 + prev);
      rep.worst_increase = std::max(rep.worst_increase, excess);
      if (excess > 0.0) ++rep.violations;
      prev = cur;
    }
    ++rep.trajectories;
  }
  rep.pass = rep.violations == 0;
  return rep;
}

}  // namespace pllranges
