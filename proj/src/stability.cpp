#include "pllranges/stability.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>

#include "pllranges/error.hpp"
#include "pllranges/parallel.hpp"

namespace pllranges {

namespace {

constexpr double kMarginalEps = 1e-10;

double row_scale(const std::vector<double>& r) {
  double m = 0.0;
  for (double v : r) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace

CharPoly char_poly(const PllModel& model, double theta_eq) {
  if (!model.pd().smooth_at(theta_eq))
    throw Error(Errc::nonsmooth_linearization_point, "nonsmooth linearization point");
  const double K = model.gain() * model.pd().derivative(theta_eq);
  const auto& d = model.tf().den();
  poly::Coeffs sd(d.size() + 1, 0.0);
  for (std::size_t i = 0; i < d.size(); ++i) sd[i + 1] = d[i];
  poly::Coeffs p = poly::add(sd, poly::scale(model.tf().num(), K));
  if (p.back() < 0.0) p = poly::scale(p, -1.0);
  return {std::move(p), K};
}

CharPoly char_poly(const PllModel& model, const Equilibrium& eq) {
  return char_poly(model, eq.theta);
}

Stability routh_hurwitz(const poly::Coeffs& p_in) {
  if (p_in.size() < 2 || p_in.back() == 0.0)
    throw Error(Errc::degenerate_polynomial, "degenerate polynomial");
  poly::Coeffs p = p_in;
  if (p.back() < 0.0) p = poly::scale(p, -1.0);
  const int N = static_cast<int>(p.size()) - 1;

  // Roots in the closed left half plane force nonnegative coefficients.
  for (double v : p)
    if (v < 0.0) return Stability::unstable;

  const std::size_t width = static_cast<std::size_t>(N / 2 + 1);
  std::vector<double> prev(width, 0.0), cur(width, 0.0);
  for (int i = N, j = 0; i >= 0; i -= 2, ++j) prev[static_cast<std::size_t>(j)] = p[static_cast<std::size_t>(i)];
  for (int i = N - 1, j = 0; i >= 0; i -= 2, ++j) cur[static_cast<std::size_t>(j)] = p[static_cast<std::size_t>(i)];

  std::vector<double> first{prev[0]};
  bool zero_row = false;
  // Row k holds the coefficients of power N - k.
  for (int k = 1; k <= N; ++k) {
    const double scale = std::max(row_scale(prev), row_scale(cur));
    const double eps = kMarginalEps * scale;
    if (row_scale(cur) <= eps) {
      // Auxiliary polynomial from the row above, replaced by its derivative.
      zero_row = true;
      const int power = N - k + 1;
      for (std::size_t j = 0; j < width; ++j) {
        const int pw = power - 2 * static_cast<int>(j);
        cur[j] = pw > 0 ? prev[j] * pw : 0.0;
      }
    } else if (std::abs(cur[0]) <= eps) {
      // A vanishing pivot in a nonzero row always comes with a right half plane root.
      return Stability::unstable;
    }
    first.push_back(cur[0]);
    std::vector<double> next(width, 0.0);
    for (std::size_t j = 0; j + 1 < width; ++j)
      next[j] = (cur[0] * prev[j + 1] - prev[0] * cur[j + 1]) / cur[0];
    prev = std::move(cur);
    cur = std::move(next);
  }

  for (std::size_t i = 1; i < first.size(); ++i)
    if ((first[i] < 0.0) != (first[0] < 0.0)) return Stability::unstable;
  return zero_row ? Stability::marginal : Stability::asymptotically_stable;
}

Stability classify(const PllModel& model, double theta_eq) {
  return routh_hurwitz(char_poly(model, theta_eq).coeffs);
}

Stability classify(const PllModel& model, Equilibrium& eq) {
  eq.stability = classify(model, eq.theta);
  return eq.stability;
}

bool hold_in_member(const PllModel& model) {
  for (const auto& eq : find_equilibria(model))
    if (eq.stability == Stability::asymptotically_stable) return true;
  return false;
}

std::vector<double> critical_omegas(const PllModel& model) {
  std::vector<double> out;
  if (model.tf().zero_pole_multiplicity() > 0) return out;
  const auto& a = model.tf().num();
  const auto& d = model.tf().den();
  using C = std::complex<double>;
  const C I(0.0, 1.0);

  // q(w) = Im[ i w d(iw) conj(a(iw)) ]; its positive roots give K = -i w d(iw) / a(iw) real.
  std::vector<C> dw(d.size()), aw(a.size());
  C ik = 1.0;
  for (std::size_t k = 0; k < d.size(); ++k, ik *= I) dw[k] = d[k] * ik;
  ik = 1.0;
  for (std::size_t k = 0; k < a.size(); ++k, ik *= I) aw[k] = a[k] * std::conj(ik);
  std::vector<C> prod(dw.size() + aw.size(), 0.0);
  for (std::size_t i = 0; i < dw.size(); ++i)
    for (std::size_t j = 0; j < aw.size(); ++j) prod[i + j + 1] += I * dw[i] * aw[j];
  poly::Coeffs q(prod.size());
  for (std::size_t k = 0; k < prod.size(); ++k) q[k] = prod[k].imag();
  const double qscale = row_scale(q);
  for (double& v : q)
    if (std::abs(v) <= 1e-14 * qscale) v = 0.0;
  q = poly::trim(q);

  std::vector<double> gains{0.0};
  if (poly::degree(q) >= 1) {
    // Factor out the trivial root at w = 0.
    std::size_t lead_zero = 0;
    while (lead_zero < q.size() && q[lead_zero] == 0.0) ++lead_zero;
    poly::Coeffs qr(q.begin() + static_cast<std::ptrdiff_t>(lead_zero), q.end());
    if (poly::degree(qr) >= 1) {
      for (const auto& r : poly::roots(qr)) {
        if (!(r.real() > 0.0) || std::abs(r.imag()) > 1e-7 * std::max(1.0, std::abs(r))) continue;
        const double w = r.real();
        const C aval = poly::eval(a, C(0.0, w));
        if (std::abs(aval) == 0.0) continue;
        gains.push_back((-I * w * poly::eval(d, C(0.0, w)) / aval).real());
      }
    }
  }

  const PdCharacteristic& pd = model.pd();
  const double L = model.gain();
  const double scale = L * model.dc_gain();
  for (double K : gains) {
    const double target = K / L;
    const auto thetas = detail::periodic_roots(
        [&](double t) { return pd.derivative(t) - target; }, pd.period(), 4096, 1e-13);
    for (double t : thetas) out.push_back(std::abs(scale * pd.eval(t)));
  }
  out.push_back(existence_bound(model));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

HoldInResult hold_in_set(const LoopSpec& spec, const HoldInOptions& opts) {
  if (opts.grid < 64) throw Error(Errc::invalid_argument, "hold-in grid must be at least 64");
  const PllModel base = PllModel::build(spec.with_omega(0.0));
  double wmax = opts.omega_max;
  if (!(wmax > 0.0)) {
    const double bound = existence_bound(base);
    wmax = std::isfinite(bound) ? 1.01 * bound : 10.0 * spec.L;
  }
  const double lo_end = opts.signed_sweep ? -wmax : 0.0;

  std::vector<double> samples;
  samples.reserve(static_cast<std::size_t>(opts.grid) + 64);
  for (int k = 0; k < opts.grid; ++k)
    samples.push_back(lo_end + (wmax - lo_end) * k / (opts.grid - 1));
  std::vector<double> crit;
  for (double w : critical_omegas(base)) {
    if (w <= wmax) {
      crit.push_back(w);
      if (opts.signed_sweep) crit.push_back(-w);
    }
  }
  std::sort(crit.begin(), crit.end());
  for (std::size_t i = 0; i < crit.size(); ++i) {
    samples.push_back(crit[i]);
    if (i + 1 < crit.size()) samples.push_back(0.5 * (crit[i] + crit[i + 1]));
  }
  std::sort(samples.begin(), samples.end());
  const double dedupe = 1e-12 * wmax;
  std::vector<double> uniq;
  for (double w : samples) {
    if (w < lo_end || w > wmax) continue;
    if (uniq.empty() || w - uniq.back() > dedupe) uniq.push_back(w);
  }
  samples = std::move(uniq);

  std::vector<char> member(samples.size());
  parallel_for(samples.size(), opts.jobs,
               [&](std::size_t i) { member[i] = hold_in_member(base.with_omega(samples[i])); });

  HoldInResult res;
  res.omega_max = wmax;
  res.samples = static_cast<int>(samples.size());

  // Refine every verdict change by bisection.
  std::vector<std::size_t> changes;
  for (std::size_t i = 0; i + 1 < samples.size(); ++i)
    if (member[i] != member[i + 1]) changes.push_back(i);
  std::vector<BoundaryRefinement> refined(changes.size());
  const double target = 1e-6 * wmax;
  parallel_for(changes.size(), opts.jobs, [&](std::size_t c) {
    const std::size_t i = changes[c];
    double lo = samples[i], hi = samples[i + 1];
    const bool lo_member = member[i] != 0;
    while (hi - lo > target) {
      const double mid = 0.5 * (lo + hi);
      if (hold_in_member(base.with_omega(mid)) == lo_member) lo = mid;
      else hi = mid;
    }
    refined[c] = {0.5 * (lo + hi), hi - lo, lo_member};
  });
  res.boundaries = refined;

  std::vector<Interval> pieces;
  std::size_t c = 0;
  for (std::size_t i = 0; i < samples.size();) {
    if (!member[i]) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < samples.size() && member[j + 1]) ++j;
    Interval iv;
    if (i == 0) {
      iv.lo = samples[0];
      iv.lo_closed = true;
    } else {
      while (changes[c] != i - 1) ++c;
      iv.lo = refined[c].omega;
    }
    if (j + 1 == samples.size()) {
      iv.hi = samples[j];
      iv.hi_closed = true;
      res.reaches_omega_max = true;
    } else {
      while (changes[c] != j) ++c;
      iv.hi = refined[c].omega;
    }
    pieces.push_back(iv);
    i = j + 1;
  }
  res.set = IntervalUnion(std::move(pieces));
  return res;
}

HoldInFrequency hold_in_frequency(const LoopSpec& spec, const HoldInResult& hold_in, int grid) {
  HoldInFrequency out;
  const Interval* iv = hold_in.set.find(0.0);
  if (iv == nullptr) return out;
  out.defined = true;
  out.value = iv->hi;

  const PllModel base = PllModel::build(spec.with_omega(0.0));
  const PdCharacteristic& pd = base.pd();
  const double step = hold_in.omega_max / std::max(grid - 1, 1);
  const double slope_scale = base.gain() * base.dc_gain();

  auto nearest = [&](const std::vector<Equilibrium>& eqs, double ref) {
    const Equilibrium* best = nullptr;
    double gap = std::numeric_limits<double>::infinity();
    for (const auto& e : eqs) {
      const double g = std::abs(pd.wrap(e.theta - ref));
      if (g < gap) {
        gap = g;
        best = &e;
      }
    }
    return std::pair{best, gap};
  };

  auto start = stable_equilibria(base);
  if (start.empty()) return out;
  double prev = nearest(start, 0.0).first->theta;
  double prev_w = 0.0;
  for (double w = step; w < iv->hi; w += step) {
    const auto eqs = stable_equilibria(base.with_omega(w));
    const auto [eq, gap] = nearest(eqs, prev);
    double bound = 0.0;
    if (std::isfinite(slope_scale)) {
      const double slope = std::abs(slope_scale * pd.derivative(prev));
      bound = slope > 0.0 ? 10.0 * step / slope : std::numeric_limits<double>::infinity();
    }
    if (eq == nullptr || gap > bound + 1e-9) {
      out.value = std::min(out.value, prev_w + 0.5 * step);
      out.truncated = true;
      return out;
    }
    prev = eq->theta;
    prev_w = w;
  }
  return out;
}

}  // namespace pllranges
