#include "pllranges/portrait.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "pllranges/error.hpp"
#include "pllranges/parallel.hpp"

namespace pllranges {

namespace {

void require_first_order(const PllModel& model) {
  if (model.order() != 1)
    throw Error(Errc::scalar_filter_required,
                "phase-plane operations defined for a first-order filter only");
}

Eigen::Matrix2d jacobian(const PllModel& model, const Equilibrium& eq) {
  const FilterRealization& fr = model.filter();
  const double dphi = model.pd().derivative(eq.theta);
  const double L = model.gain();
  Eigen::Matrix2d J;
  J << fr.A(0, 0), fr.b[0] * dphi, -L * fr.c[0], -L * fr.h * dphi;
  return J;
}

// Unit vector with a deterministic sign.
Eigen::Vector2d oriented(Eigen::Vector2d v) {
  v.normalize();
  if (v[0] < 0.0 || (v[0] == 0.0 && v[1] < 0.0)) v = -v;
  return v;
}

Cell classify_cell(const Outcome& o, int branch) {
  if (o.failed || o.state == LockState::undecided) return Cell::undecided;
  if (o.state == LockState::locked && o.slips.count == 0 &&
      (branch < 0 || o.equilibrium_branch == branch))
    return Cell::member;
  return Cell::non_member;
}

DomainRaster raster_domain(const PllModel& model, const std::vector<Equilibrium>& stable,
                           int branch, const RasterBox& box, const DomainOptions& opts) {
  if (box.nx < 1 || box.ntheta < 1 || !(box.x_hi > box.x_lo) || !(box.theta_hi > box.theta_lo))
    throw Error(Errc::invalid_argument, "raster box is empty");
  DomainRaster r;
  r.box = box;
  const std::size_t total = static_cast<std::size_t>(box.nx) * box.ntheta;
  r.cells.assign(total, Cell::undecided);
  parallel_for(total, opts.jobs, [&](std::size_t k) {
    const int ix = static_cast<int>(k / static_cast<std::size_t>(box.ntheta));
    const int it = static_cast<int>(k % static_cast<std::size_t>(box.ntheta));
    Eigen::VectorXd init(2);
    init << box.x(ix), box.theta(it);
    r.cells[k] = classify_cell(simulate_outcome(model, init, opts.cfg, stable, opts.lock, opts.slip),
                               branch);
  });
  return r;
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

}  // namespace

std::string_view branch_name(SeparatrixBranch b) {
  switch (b) {
    case SeparatrixBranch::stable_1: return "stable-1";
    case SeparatrixBranch::stable_2: return "stable-2";
    case SeparatrixBranch::unstable_1: return "unstable-1";
    case SeparatrixBranch::unstable_2: return "unstable-2";
  }
  return "unknown";
}

RasterBox default_raster(const PllModel& model, int nx, int ntheta) {
  require_first_order(model);
  double xeq = 0.0;
  for (const auto& e : find_equilibria(model)) xeq = std::max(xeq, std::abs(e.x[0]));
  const double w = 3.0 * xeq + 0.05;
  const double P = model.pd().period();
  return {-w, w, -P / 2.0, P / 2.0, nx, ntheta};
}

SeparatrixSet trace_separatrices(const PllModel& model, const SeparatrixOptions& opts) {
  require_first_order(model);
  SeparatrixSet out;
  const double P = model.pd().period();
  double x_limit = opts.x_limit;
  if (!(x_limit > 0.0)) {
    const RasterBox box = default_raster(model);
    x_limit = box.x_hi;
  }

  for (const auto& eq : find_equilibria(model)) {
    if (eq.stability == Stability::asymptotically_stable) continue;
    if (!model.pd().smooth_at(eq.theta)) {
      out.notes.push_back("equilibrium at theta=" + fmt(eq.theta) + " skipped: nonsmooth point");
      continue;
    }
    const Eigen::Matrix2d J = jacobian(model, eq);
    Eigen::EigenSolver<Eigen::Matrix2d> es(J);
    const auto ev = es.eigenvalues();
    if (std::abs(ev[0].imag()) > 0.0 || std::abs(ev[1].imag()) > 0.0 ||
        !((ev[0].real() < 0.0 && ev[1].real() > 0.0) || (ev[0].real() > 0.0 && ev[1].real() < 0.0))) {
      out.notes.push_back("equilibrium at theta=" + fmt(eq.theta) + " skipped: not a saddle");
      continue;
    }
    const int is = ev[0].real() < 0.0 ? 0 : 1;
    const int iu = 1 - is;
    const Eigen::Vector2d vs = oriented(es.eigenvectors().col(is).real());
    const Eigen::Vector2d vu = oriented(es.eigenvectors().col(iu).real());
    const double rate = std::min(std::abs(ev[0].real()), std::abs(ev[1].real()));
    IntegratorConfig cfg = opts.cfg;
    cfg.horizon = opts.horizon > 0.0 ? opts.horizon : 40.0 / rate;
    // Dense output keeps the polyline chord error small.
    if (!(opts.cfg.max_step > 0.0)) cfg.max_step = cfg.horizon / 4000.0;
    cfg.min_step = 0.0;

    const Eigen::Vector2d p(eq.x[0], eq.theta);
    struct Seed {
      SeparatrixBranch branch;
      Eigen::Vector2d dir;
      bool reverse;
    };
    const Seed seeds[] = {{SeparatrixBranch::stable_1, vs, true},
                          {SeparatrixBranch::stable_2, -vs, true},
                          {SeparatrixBranch::unstable_1, vu, false},
                          {SeparatrixBranch::unstable_2, -vu, false}};
    for (const Seed& sd : seeds) {
      const Eigen::VectorXd init = p + opts.eps_offset * sd.dir;
      auto stop = [&](double, const double* s) {
        return std::abs(s[0]) > 10.0 * x_limit || std::abs(s[1] - eq.theta) > 3.0 * P;
      };
      const Trajectory tr = integrate_raw(model, init, cfg, sd.reverse, stop);
      Separatrix sep;
      sep.saddle = eq;
      sep.branch = sd.branch;
      sep.reverse_time = sd.reverse;
      sep.t = tr.t;
      sep.points.reserve(tr.size());
      for (std::size_t i = 0; i < tr.size(); ++i) sep.points.push_back({tr.state(i)[0], tr.theta(i)});
      out.curves.push_back(std::move(sep));
    }
  }
  return out;
}

DomainRaster local_lock_in_domain(const PllModel& model, const Equilibrium& eq,
                                  const RasterBox& box, const DomainOptions& opts) {
  // Absence of locked states is reported ahead of the order restriction.
  const auto stable = stable_equilibria(model);
  if (stable.empty()) throw Error(Errc::no_stable_equilibria, "no stable equilibria");
  require_first_order(model);
  const Equilibrium* match = nullptr;
  for (const auto& s : stable)
    if (std::abs(model.pd().wrap(s.theta - eq.theta)) <= 1e-9) match = &s;
  if (!match) throw Error(Errc::invalid_argument, "equilibrium is not a stable equilibrium of the model");
  return raster_domain(model, stable, match->branch, box, opts);
}

DomainRaster no_slip_domain(const PllModel& model, const RasterBox& box, const DomainOptions& opts) {
  const auto stable = stable_equilibria(model);
  if (stable.empty()) throw Error(Errc::no_stable_equilibria, "no stable equilibria");
  require_first_order(model);
  return raster_domain(model, stable, -1, box, opts);
}

double maximal_band(const DomainRaster& raster) {
  const RasterBox& b = raster.box;
  std::vector<int> rows(static_cast<std::size_t>(b.nx));
  for (int i = 0; i < b.nx; ++i) rows[static_cast<std::size_t>(i)] = i;
  std::stable_sort(rows.begin(), rows.end(),
                   [&](int a, int c) { return std::abs(b.x(a)) < std::abs(b.x(c)); });
  double w = 0.0;
  for (int i : rows) {
    for (int j = 0; j < b.ntheta; ++j)
      if (raster.at(i, j) != Cell::member) return w;
    w = std::abs(b.x(i));
  }
  return w;
}

UniformDomain uniform_domain_intersection(const LoopSpec& spec, double omega, const RasterBox& box,
                                          const DomainOptions& opts, int equilibrium_checks) {
  if (!spec.pd.odd())
    throw Error(Errc::odd_characteristic_required, "procedure requires odd characteristic");
  const double w = std::abs(omega);
  const PllModel plus = PllModel::build(spec.with_omega(w));
  require_first_order(plus);
  const PllModel minus = plus.with_omega(-w);

  UniformDomain u;
  u.plus = no_slip_domain(plus, box, opts);
  u.minus = w == 0.0 ? u.plus : no_slip_domain(minus, box, opts);
  u.intersection = u.plus;
  for (std::size_t k = 0; k < u.intersection.cells.size(); ++k) {
    const Cell a = u.plus.cells[k], b = u.minus.cells[k];
    Cell c = Cell::member;
    if (a == Cell::non_member || b == Cell::non_member) c = Cell::non_member;
    else if (a == Cell::undecided || b == Cell::undecided) c = Cell::undecided;
    u.intersection.cells[k] = c;
  }
  u.band_half_width = maximal_band(u.intersection);

  const auto stable_plus = stable_equilibria(plus);
  const auto stable_minus = stable_equilibria(minus);
  const int checks = std::max(equilibrium_checks, 2);
  bool inside = true;
  for (int k = 0; k < checks && inside; ++k) {
    const double wt = -w + 2.0 * w * k / (checks - 1);
    const auto eqs = stable_equilibria(plus.with_omega(wt));
    if (eqs.empty()) inside = false;
    for (const auto& e : eqs) {
      Eigen::VectorXd init(2);
      init << e.x[0], e.theta;
      for (const auto* pair : {&stable_plus, &stable_minus}) {
        const PllModel& m = pair == &stable_plus ? plus : minus;
        const Outcome o = simulate_outcome(m, init, opts.cfg, *pair, opts.lock, opts.slip);
        if (classify_cell(o, -1) != Cell::member) inside = false;
      }
    }
  }
  u.equilibria_inside = inside;
  return u;
}

std::vector<PlanePoint> zero_freq_diff_locus(const PllModel& model, int samples) {
  require_first_order(model);
  const FilterRealization& fr = model.filter();
  if (fr.c[0] == 0.0) throw Error(Errc::degenerate_locus, "degenerate locus");
  if (samples < 2) throw Error(Errc::invalid_argument, "locus needs at least 2 samples");
  const double P = model.pd().period();
  const double L = model.gain();
  std::vector<PlanePoint> out;
  out.reserve(static_cast<std::size_t>(samples));
  for (int k = 0; k < samples; ++k) {
    const double th = -P / 2.0 + P * k / samples;
    out.push_back({(model.omega() - L * fr.h * model.pd().eval(th)) / (L * fr.c[0]), th});
  }
  return out;
}

void write_separatrices_csv(std::ostream& os, const SeparatrixSet& set) {
  os << "kind,branch,x,theta\n";
  for (const auto& s : set.curves) {
    const bool stable = s.branch == SeparatrixBranch::stable_1 || s.branch == SeparatrixBranch::stable_2;
    const char* side =
        (s.branch == SeparatrixBranch::stable_1 || s.branch == SeparatrixBranch::unstable_1) ? "1" : "2";
    const std::string id = "saddle" + std::to_string(s.saddle.branch) + "-" + side;
    for (const auto& p : s.points)
      os << (stable ? "stable" : "unstable") << ',' << id << ',' << fmt(p[0]) << ',' << fmt(p[1]) << '\n';
  }
}

void write_locus_csv(std::ostream& os, const std::vector<PlanePoint>& locus) {
  os << "kind,branch,x,theta\n";
  for (const auto& p : locus) os << "locus,0," << fmt(p[0]) << ',' << fmt(p[1]) << '\n';
}

void write_raster_csv(std::ostream& os, const DomainRaster& raster) {
  const RasterBox& b = raster.box;
  os << "x\\theta";
  for (int j = 0; j < b.ntheta; ++j) os << ',' << fmt(b.theta(j));
  os << '\n';
  for (int i = 0; i < b.nx; ++i) {
    os << fmt(b.x(i));
    for (int j = 0; j < b.ntheta; ++j) os << ',' << static_cast<int>(raster.at(i, j));
    os << '\n';
  }
}

void write_svg(std::ostream& os, const PortraitScene& scene) {
  const RasterBox& b = scene.box;
  const double W = 800.0, H = 600.0, m = 50.0;
  auto px = [&](double theta) { return m + (theta - b.theta_lo) / (b.theta_hi - b.theta_lo) * (W - 2 * m); };
  auto py = [&](double x) { return H - m - (x - b.x_lo) / (b.x_hi - b.x_lo) * (H - 2 * m); };
  os << std::setprecision(6);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
     << "\" viewBox=\"0 0 " << W << ' ' << H << "\">\n";
  os << "<defs><clipPath id=\"plot\"><rect x=\"" << m << "\" y=\"" << m << "\" width=\"" << W - 2 * m
     << "\" height=\"" << H - 2 * m << "\"/></clipPath></defs>\n";
  os << "<rect x=\"0\" y=\"0\" width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
  if (!scene.title.empty())
    os << "<text x=\"" << m << "\" y=\"" << m - 15 << "\" font-size=\"14\">" << scene.title << "</text>\n";

  auto shade = [&](const DomainRaster* r, const char* color) {
    if (!r) return;
    const RasterBox& rb = r->box;
    const double dx = (rb.x_hi - rb.x_lo) / rb.nx, dt = (rb.theta_hi - rb.theta_lo) / rb.ntheta;
    os << "<g fill=\"" << color << "\" fill-opacity=\"0.3\" clip-path=\"url(#plot)\">\n";
    for (int i = 0; i < rb.nx; ++i) {
      for (int j = 0; j < rb.ntheta;) {
        if (r->at(i, j) != Cell::member) {
          ++j;
          continue;
        }
        int k = j;
        while (k + 1 < rb.ntheta && r->at(i, k + 1) == Cell::member) ++k;
        const double t0 = rb.theta_lo + j * dt, t1 = rb.theta_lo + (k + 1) * dt;
        const double x0 = rb.x_lo + i * dx, x1 = x0 + dx;
        os << "<rect x=\"" << px(t0) << "\" y=\"" << py(x1) << "\" width=\"" << px(t1) - px(t0)
           << "\" height=\"" << py(x0) - py(x1) << "\"/>\n";
        j = k + 1;
      }
    }
    os << "</g>\n";
  };
  shade(scene.shade_a, "black");
  shade(scene.shade_b, "red");

  auto curves = [&](const SeparatrixSet* set, const char* color) {
    if (!set) return;
    os << "<g fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.2\" clip-path=\"url(#plot)\">\n";
    for (const auto& s : set->curves) {
      for (int shift = -2; shift <= 2; ++shift) {
        os << "<polyline points=\"";
        for (const auto& p : s.points) os << px(p[1] + shift * scene.period) << ',' << py(p[0]) << ' ';
        os << "\"/>\n";
      }
    }
    os << "</g>\n";
  };
  curves(scene.separatrices, "black");
  curves(scene.separatrices_mirror, "red");

  if (scene.locus) {
    os << "<polyline fill=\"none\" stroke=\"blue\" stroke-dasharray=\"6,4\" clip-path=\"url(#plot)\" points=\"";
    for (const auto& p : *scene.locus) os << px(p[1]) << ',' << py(p[0]) << ' ';
    os << "\"/>\n";
  }
  if (scene.equilibria) {
    for (const auto& e : *scene.equilibria) {
      const bool st = e.stability == Stability::asymptotically_stable;
      os << "<circle cx=\"" << px(e.theta) << "\" cy=\"" << py(e.x[0]) << "\" r=\"4\" stroke=\"black\" fill=\""
         << (st ? "black" : "white") << "\"/>\n";
    }
  }
  os << "<rect x=\"" << m << "\" y=\"" << m << "\" width=\"" << W - 2 * m << "\" height=\"" << H - 2 * m
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  os << "<text x=\"" << W / 2 << "\" y=\"" << H - 15 << "\" font-size=\"12\">theta</text>\n";
  os << "<text x=\"10\" y=\"" << H / 2 << "\" font-size=\"12\">x</text>\n";
  os << "<text x=\"" << m << "\" y=\"" << H - m + 15 << "\" font-size=\"10\">" << b.theta_lo << "</text>\n";
  os << "<text x=\"" << W - m - 30 << "\" y=\"" << H - m + 15 << "\" font-size=\"10\">" << b.theta_hi << "</text>\n";
  os << "<text x=\"5\" y=\"" << H - m << "\" font-size=\"10\">" << b.x_lo << "</text>\n";
  os << "<text x=\"5\" y=\"" << m + 5 << "\" font-size=\"10\">" << b.x_hi << "</text>\n";
  os << "</svg>\n";
}

}  // namespace pllranges
