#include "pllranges/ranges.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pllranges/error.hpp"
#include "pllranges/parallel.hpp"

namespace pllranges {

namespace {

double default_omega_max(const PllModel& base, const LoopSpec& spec) {
  const double bound = existence_bound(base);
  return std::isfinite(bound) ? 1.01 * bound : 10.0 * spec.L;
}

const Equilibrium* closest_to_zero(const std::vector<Equilibrium>& eqs) {
  const Equilibrium* best = nullptr;
  for (const auto& e : eqs)
    if (!best || std::abs(e.theta) < std::abs(best->theta)) best = &e;
  return best;
}

// Cartesian grid of filter states: points^order entries, each of length order.
std::vector<Eigen::VectorXd> state_grid(const StateBox& box, int order, int points,
                                        const Eigen::VectorXd& center) {
  std::vector<Eigen::VectorXd> out;
  std::size_t total = 1;
  for (int i = 0; i < order; ++i) total *= static_cast<std::size_t>(points);
  out.reserve(total);
  for (std::size_t k = 0; k < total; ++k) {
    Eigen::VectorXd x(order);
    std::size_t rem = k;
    for (int i = 0; i < order; ++i) {
      const auto idx = static_cast<double>(rem % static_cast<std::size_t>(points));
      rem /= static_cast<std::size_t>(points);
      const double lo = box.lo[static_cast<std::size_t>(i)], hi = box.hi[static_cast<std::size_t>(i)];
      x[i] = lo + (hi - lo) * idx / (points - 1);
      if (box.relative) x[i] += center[i];
    }
    out.push_back(std::move(x));
  }
  return out;
}

}  // namespace

void StateBox::validate(int order) const {
  if (static_cast<int>(lo.size()) != order || static_cast<int>(hi.size()) != order)
    throw Error(Errc::state_dimension,
                "state dimension: state box needs " + std::to_string(order) + " bounds");
  for (std::size_t i = 0; i < lo.size(); ++i)
    if (!(lo[i] < hi[i]) || !std::isfinite(lo[i]) || !std::isfinite(hi[i]))
      throw Error(Errc::invalid_argument, "state box bounds must satisfy lo < hi");
}

StateBox default_box(const PllModel& model) {
  const FilterRealization& fr = model.filter();
  const int n = fr.order();
  StateBox box;
  box.lo.resize(static_cast<std::size_t>(n));
  box.hi.resize(static_cast<std::size_t>(n));
  if (n == 0) return box;
  const double amp = model.pd().amplitude_max();
  Eigen::VectorXd w(n);
  if (model.tf().zero_pole_multiplicity() == 0) {
    w = 2.0 * amp * fr.A.partialPivLu().solve(fr.b).cwiseAbs();
  } else {
    box.relative = true;
    for (int i = 0; i < n; ++i)
      w[i] = fr.c[i] != 0.0 ? 2.0 * amp * (1.0 + std::abs(fr.h)) / std::abs(fr.c[i]) : 0.0;
  }
  const double fallback = w.maxCoeff() > 0.0 ? w.maxCoeff() : 1.0;
  for (int i = 0; i < n; ++i) {
    const double wi = w[i] > 0.0 ? w[i] : fallback;
    box.lo[static_cast<std::size_t>(i)] = -wi;
    box.hi[static_cast<std::size_t>(i)] = wi;
  }
  return box;
}

OmegaEvidence pull_in_member(const LoopSpec& spec, double omega, const StateBox& box,
                             const PullInOptions& opts) {
  const PllModel model = PllModel::build(spec.with_omega(omega));
  box.validate(model.order());
  OmegaEvidence ev;
  ev.omega = omega;
  const auto stable = stable_equilibria(model);
  if (stable.empty()) {
    ev.short_circuit = true;
    return ev;
  }
  const Equilibrium* center = closest_to_zero(stable);
  const auto states = state_grid(box, model.order(), opts.points_per_dim, center->x);
  const double P = model.pd().period();
  const std::size_t total = states.size() * static_cast<std::size_t>(opts.phases);
  std::vector<Outcome> outcomes(total);
  parallel_for(total, opts.jobs, [&](std::size_t k) {
    const std::size_t si = k / static_cast<std::size_t>(opts.phases);
    const std::size_t pj = k % static_cast<std::size_t>(opts.phases);
    Eigen::VectorXd init(model.dimension());
    init << states[si], -P / 2.0 + P * static_cast<double>(pj) / opts.phases;
    outcomes[k] = simulate_outcome(model, init, opts.cfg, stable, opts.lock);
  });
  for (const auto& o : outcomes) {
    ++ev.simulations;
    if (o.failed) ++ev.failures;
    else if (o.state == LockState::locked) ++ev.locked;
    else if (o.state == LockState::not_locked) ++ev.not_locked;
    else ++ev.undecided;
  }
  ev.inconclusive = ev.failures > 0 || ev.undecided > 0;
  ev.member = ev.locked == ev.simulations;
  return ev;
}

PullInResult pull_in_estimate(const LoopSpec& spec, const StateBox& box,
                              const PullInOptions& opts) {
  if (opts.points_per_dim < 2 || opts.phases < 1 || opts.omega_grid < 2)
    throw Error(Errc::invalid_argument, "pull-in grids too small");
  const PllModel base = PllModel::build(spec.with_omega(0.0));
  box.validate(base.order());
  PullInResult res;
  res.omega_max = opts.omega_max > 0.0 ? opts.omega_max : default_omega_max(base, spec);

  std::vector<OmegaEvidence> grid;
  for (int k = 0; k < opts.omega_grid; ++k)
    grid.push_back(pull_in_member(spec, res.omega_max * k / (opts.omega_grid - 1), box, opts));
  res.evidence = grid;

  std::vector<Interval> pieces;
  std::vector<double> edges(grid.size() + 1, 0.0);
  const double target = opts.refine_rel * res.omega_max;
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    if (grid[i].member == grid[i + 1].member) continue;
    double lo = grid[i].omega, hi = grid[i + 1].omega;
    const bool lo_member = grid[i].member;
    while (hi - lo > target) {
      const double mid = 0.5 * (lo + hi);
      OmegaEvidence ev = pull_in_member(spec, mid, box, opts);
      res.evidence.push_back(ev);
      if (ev.member == lo_member) lo = mid;
      else hi = mid;
    }
    res.boundaries.push_back({0.5 * (lo + hi), hi - lo, lo_member});
    edges[i + 1] = 0.5 * (lo + hi);
  }
  for (std::size_t i = 0; i < grid.size();) {
    if (!grid[i].member) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < grid.size() && grid[j + 1].member) ++j;
    Interval iv;
    iv.lo = i == 0 ? 0.0 : edges[i];
    iv.lo_closed = i == 0;
    iv.hi = j + 1 == grid.size() ? res.omega_max : edges[j + 1];
    iv.hi_closed = j + 1 == grid.size();
    pieces.push_back(iv);
    i = j + 1;
  }
  res.estimate = IntervalUnion(std::move(pieces));
  std::sort(res.evidence.begin(), res.evidence.end(),
            [](const OmegaEvidence& a, const OmegaEvidence& b) { return a.omega < b.omega; });
  return res;
}

PredicateRun lock_in_predicate(const LoopSpec& spec, double omega, const LockInOptions& opts) {
  if (!spec.pd.odd())
    throw Error(Errc::odd_characteristic_required, "procedure requires odd characteristic");
  PredicateRun run;
  run.omega = omega;
  const PllModel plus = PllModel::build(spec.with_omega(omega));
  const auto start_set = stable_equilibria(plus);
  const Equilibrium* start = closest_to_zero(start_set);
  if (!start) return run;
  const PllModel minus = plus.with_omega(-omega);
  const auto stable = stable_equilibria(minus);
  if (stable.empty()) return run;
  Eigen::VectorXd init(plus.dimension());
  init << start->x, start->theta;
  const Outcome o = simulate_outcome(minus, init, opts.cfg, stable, opts.lock, opts.slip);
  run.state = o.failed ? LockState::undecided : o.state;
  run.slips = o.slips.count;
  run.sup_deviation = o.slips.sup_deviation;
  run.pass = !o.failed && o.state == LockState::locked && o.slips.count == 0;
  return run;
}

LockInResult lock_in_frequency(const LoopSpec& spec, const LockInOptions& opts) {
  if (!spec.pd.odd())
    throw Error(Errc::odd_characteristic_required, "procedure requires odd characteristic");
  const PllModel base = PllModel::build(spec.with_omega(0.0));
  double hint = opts.omega_hint;
  if (!(hint > 0.0)) {
    const double bound = existence_bound(base);
    hint = (std::isfinite(bound) ? bound : spec.L) / 16.0;
  }
  LockInResult res;
  auto probe = [&](double w) {
    PredicateRun r = lock_in_predicate(spec, w, opts);
    res.probes.push_back(r);
    return r.pass;
  };

  double lo = 0.0, hi = 0.0;
  if (probe(hint)) {
    lo = hint;
    double w = hint;
    int k = 0;
    for (; k < opts.max_doublings; ++k) {
      w *= 2.0;
      if (!probe(w)) break;
      lo = w;
    }
    if (k == opts.max_doublings) {
      res.unbounded = true;
      res.lo = lo;
      res.hi = std::numeric_limits<double>::infinity();
      res.omega_l = lo;
      return res;
    }
    hi = w;
  } else {
    hi = hint;
    double w = hint;
    bool found = false;
    for (int k = 0; k < opts.max_doublings; ++k) {
      w *= 0.5;
      if (probe(w)) {
        lo = w;
        found = true;
        break;
      }
      hi = w;
    }
    if (!found) {
      res.zero_only = true;
      res.lo = 0.0;
      res.hi = hi;
      res.omega_l = 0.0;
      return res;
    }
  }
  while (hi - lo > opts.rel_width * hi) {
    const double mid = 0.5 * (lo + hi);
    if (probe(mid)) lo = mid;
    else hi = mid;
  }
  res.lo = lo;
  res.hi = hi;
  res.omega_l = 0.5 * (lo + hi);
  res.monotone = probe(0.9 * lo) && !probe(1.1 * hi);
  return res;
}

BandResult lock_in_band(const LoopSpec& spec, double omega_tilde, const BandOptions& opts) {
  const PllModel plus = PllModel::build(spec.with_omega(omega_tilde));
  if (plus.order() != 1)
    throw Error(Errc::scalar_filter_required,
                "band approximation defined for scalar filter state only");
  const auto stable = stable_equilibria(plus);
  const Equilibrium* eq = closest_to_zero(stable);
  if (!eq) throw Error(Errc::no_stable_equilibria, "no stable equilibria");
  BandResult res;
  res.half_width = std::abs(eq->x[0]);
  if (!opts.verify) return res;

  const double w = res.half_width;
  const int nx = w > 0.0 ? std::max(opts.points_x, 1) : 1;
  const double P = plus.pd().period();
  std::vector<std::pair<double, double>> points;
  for (int i = 0; i < nx; ++i) {
    const double x = nx == 1 ? 0.0 : -w + 2.0 * w * i / (nx - 1);
    for (int j = 0; j < opts.phases; ++j) points.emplace_back(x, -P / 2.0 + P * j / opts.phases);
  }
  const std::vector<double> signs = omega_tilde == 0.0 ? std::vector<double>{1.0}
                                                       : std::vector<double>{1.0, -1.0};
  for (double sgn : signs) {
    const PllModel m = plus.with_omega(sgn * omega_tilde);
    const auto st = stable_equilibria(m);
    std::vector<Outcome> outs(points.size());
    parallel_for(points.size(), opts.jobs, [&](std::size_t k) {
      Eigen::VectorXd init(2);
      init << points[k].first, points[k].second;
      outs[k] = simulate_outcome(m, init, opts.cfg, st, opts.lock, opts.slip);
    });
    for (std::size_t k = 0; k < points.size(); ++k) {
      ++res.checked;
      const Outcome& o = outs[k];
      if (!o.failed && o.state == LockState::locked && o.slips.count == 0) continue;
      res.violations.push_back({m.omega(), points[k].first, points[k].second,
                                o.failed ? LockState::undecided : o.state, o.slips.count});
    }
  }
  return res;
}

}  // namespace pllranges
