#include "pllranges/report.hpp"

#include <cmath>

namespace pllranges::report {

Json number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

Json vector(const Eigen::VectorXd& v) {
  Json arr = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(number(v[i]));
  return arr;
}

Json realization(const FilterRealization& fr) {
  Json A = Json::array();
  for (Eigen::Index i = 0; i < fr.A.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < fr.A.cols(); ++j) row.push_back(number(fr.A(i, j)));
    A.push_back(row);
  }
  Json out;
  out["order"] = fr.order();
  out["A"] = A;
  out["b"] = vector(fr.b);
  out["c"] = vector(fr.c);
  out["h"] = number(fr.h);
  return out;
}

Json loop(const PllModel& model) {
  Json out;
  out["pd_kind"] = std::string(pd_kind_name(model.pd().kind()));
  out["pd_period"] = number(model.pd().period());
  out["pd_amplitude_max"] = number(model.pd().amplitude_max());
  out["pd_odd"] = model.pd().odd();
  out["num"] = model.tf().num();
  out["den"] = model.tf().den();
  out["dc_gain"] = number(model.dc_gain());
  out["L"] = number(model.gain());
  out["omega_delta_free"] = number(model.omega());
  out["realization"] = realization(model.filter());
  return out;
}

Json equilibrium(const Equilibrium& eq) {
  Json out;
  out["branch"] = eq.branch;
  out["theta_eq"] = number(eq.theta);
  out["x_eq"] = vector(eq.x);
  out["stability"] = std::string(stability_name(eq.stability));
  out["residual"] = number(eq.residual);
  return out;
}

Json intervals(const IntervalUnion& set) {
  Json arr = Json::array();
  for (const auto& iv : set.intervals()) {
    Json j;
    j["lo"] = number(iv.lo);
    j["hi"] = number(iv.hi);
    j["lo_closed"] = iv.lo_closed;
    j["hi_closed"] = iv.hi_closed;
    arr.push_back(j);
  }
  return arr;
}

Json hold_in(const HoldInResult& res, const HoldInFrequency& freq) {
  Json out;
  out["omega_max"] = number(res.omega_max);
  out["samples"] = res.samples;
  out["intervals"] = intervals(res.set);
  out["reaches_omega_max"] = res.reaches_omega_max;
  Json b = Json::array();
  for (const auto& r : res.boundaries) {
    Json j;
    j["omega"] = number(r.omega);
    j["bracket_width"] = number(r.width);
    j["member_below"] = r.member_below;
    b.push_back(j);
  }
  out["boundaries"] = b;
  Json f;
  f["defined"] = freq.defined;
  if (freq.defined) f["omega_h"] = number(freq.value);
  f["truncated_by_branch_jump"] = freq.truncated;
  out["hold_in_frequency"] = f;
  return out;
}

Json slips(const SlipReport& rep) {
  Json out;
  out["count"] = rep.count;
  out["verdict_limsup"] = rep.limsup;
  out["verdict_sup"] = rep.sup;
  out["sup_deviation"] = number(rep.sup_deviation);
  out["limsup_estimate"] = number(rep.limsup_estimate);
  out["threshold"] = number(rep.threshold);
  out["limsup_rule"] = "max over trailing window";
  return out;
}

Json lock(const LockVerdict& v) {
  Json out;
  out["state"] = std::string(lock_state_name(v.state));
  if (v.equilibrium) {
    out["equilibrium"] = equilibrium(*v.equilibrium);
    out["cycles"] = v.cycles;
  }
  out["window_max_rate"] = number(v.max_rate);
  out["window_max_distance"] = number(v.distance);
  return out;
}

Json integrator(const IntegratorConfig& cfg) {
  Json out;
  out["method"] = std::string(method_name(cfg.method));
  out["rel_tol"] = number(cfg.rel_tol);
  out["abs_tol"] = number(cfg.abs_tol);
  out["max_step"] = number(cfg.effective_max_step());
  out["min_step"] = number(cfg.effective_min_step());
  out["horizon"] = number(cfg.horizon);
  return out;
}

Json pull_in(const PullInResult& res, const StateBox& box) {
  Json out;
  out["label"] = "ESTIMATE";
  out["caveat"] = "finite initial-state grid; hidden attractors can be missed";
  out["omega_max"] = number(res.omega_max);
  Json jb;
  jb["lo"] = box.lo;
  jb["hi"] = box.hi;
  jb["relative_to_equilibrium"] = box.relative;
  out["state_box"] = jb;
  out["intervals"] = intervals(res.estimate);
  Json ev = Json::array();
  for (const auto& e : res.evidence) {
    Json j;
    j["omega"] = number(e.omega);
    j["member"] = e.member;
    j["inconclusive"] = e.inconclusive;
    j["no_stable_equilibrium"] = e.short_circuit;
    j["simulations"] = e.simulations;
    j["locked"] = e.locked;
    j["not_locked"] = e.not_locked;
    j["undecided"] = e.undecided;
    j["failures"] = e.failures;
    ev.push_back(j);
  }
  out["evidence"] = ev;
  return out;
}

Json lock_in(const LockInResult& res) {
  Json out;
  out["omega_l"] = number(res.omega_l);
  out["bracket"] = Json::array({number(res.lo), number(res.hi)});
  out["unbounded"] = res.unbounded;
  out["zero_only"] = res.zero_only;
  out["monotone_check"] = res.monotone;
  Json pr = Json::array();
  for (const auto& p : res.probes) {
    Json j;
    j["omega"] = number(p.omega);
    j["pass"] = p.pass;
    j["state"] = std::string(lock_state_name(p.state));
    j["slips"] = p.slips;
    j["sup_deviation"] = number(p.sup_deviation);
    pr.push_back(j);
  }
  out["probes"] = pr;
  return out;
}

Json band(const BandResult& res) {
  Json out;
  out["half_width"] = number(res.half_width);
  out["checked"] = res.checked;
  Json v = Json::array();
  for (const auto& b : res.violations) {
    Json j;
    j["omega"] = number(b.omega);
    j["x"] = number(b.x);
    j["theta"] = number(b.theta);
    j["state"] = std::string(lock_state_name(b.state));
    j["slips"] = b.slips;
    v.push_back(j);
  }
  out["violations"] = v;
  return out;
}

}  // namespace pllranges::report
