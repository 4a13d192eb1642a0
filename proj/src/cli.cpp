#include "pllranges/cli.hpp"

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <ostream>

#include "pllranges/config.hpp"
#include "pllranges/error.hpp"
#include "pllranges/portrait.hpp"
#include "pllranges/ranges.hpp"
#include "pllranges/report.hpp"

namespace pllranges {

namespace {

namespace fs = std::filesystem;
using report::Json;

struct Common {
  std::string config;
  std::string out;
  int jobs = 0;
  std::string method;
  std::optional<double> rel_tol;
  std::optional<double> abs_tol;
  std::optional<double> max_step;
  std::optional<double> min_step;
  std::optional<double> horizon;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--config", c.config, "Loop description (JSON)")->required();
  sub->add_option("--out", c.out, "Directory for the report and artifacts");
  sub->add_option("--jobs", c.jobs, "Worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);
  sub->add_option("--method", c.method, "Integrator: dopri5 or rk4")
      ->check(CLI::IsMember({"dopri5", "rk4"}));
  sub->add_option("--rtol", c.rel_tol, "Relative tolerance");
  sub->add_option("--atol", c.abs_tol, "Absolute tolerance");
  sub->add_option("--max-step", c.max_step, "Largest step (fixed step for rk4)");
  sub->add_option("--min-step", c.min_step, "Smallest adaptive step before failure");
  sub->add_option("--horizon", c.horizon, "Simulation horizon in seconds");
}

IntegratorConfig integrator_from(const Common& c, IntegratorConfig cfg) {
  if (!c.method.empty()) cfg.method = c.method == "rk4" ? Method::rk4 : Method::dopri5;
  auto positive = [](const std::optional<double>& v, const char* flag) {
    if (v && !(*v > 0.0)) throw ConfigError(flag, "must be positive");
    return v.has_value();
  };
  if (positive(c.rel_tol, "--rtol")) cfg.rel_tol = *c.rel_tol;
  if (positive(c.abs_tol, "--atol")) cfg.abs_tol = *c.abs_tol;
  if (positive(c.max_step, "--max-step")) cfg.max_step = *c.max_step;
  if (positive(c.min_step, "--min-step")) cfg.min_step = *c.min_step;
  if (positive(c.horizon, "--horizon")) cfg.horizon = *c.horizon;
  try {
    cfg.validate();
  } catch (const Error& e) {
    throw ConfigError("integrator", e.what());
  }
  return cfg;
}

// Writes a text artifact into the output directory.
void write_artifact(const Common& c, const std::string& name, const std::string& body) {
  if (c.out.empty()) return;
  std::error_code ec;
  fs::create_directories(c.out, ec);
  std::ofstream f(fs::path(c.out) / name, std::ios::binary);
  if (!f) throw ConfigError("--out", "cannot write to '" + c.out + "'");
  f << body;
}

void emit(const Common& c, const std::string& command, const Json& rep, std::ostream& out) {
  const std::string text = rep.dump(2) + "\n";
  out << text;
  write_artifact(c, command + ".json", text);
}

Json header(const std::string& command, const PllModel& model) {
  Json rep;
  rep["command"] = command;
  rep["loop"] = report::loop(model);
  return rep;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Phase-locked loop range analysis in the signal's phase space", "pllranges"};
  app.require_subcommand(1);

  Common c;
  std::optional<double> omega;

  auto* eq_cmd = app.add_subcommand("equilibria", "Equilibria on one period with stability");
  add_common(eq_cmd, c);
  eq_cmd->add_option("--omega", omega, "Override loop.omega_delta_free");

  double omega_max = 0.0;
  int grid = 2048;
  bool signed_sweep = false;
  auto* hold_cmd = app.add_subcommand("holdin", "Hold-in set and hold-in frequency");
  add_common(hold_cmd, c);
  hold_cmd->add_option("--omega-max", omega_max, "Upper end of the sweep");
  hold_cmd->add_option("--grid", grid, "Uniform sweep points")->check(CLI::Range(64, 1 << 24));
  hold_cmd->add_flag("--signed", signed_sweep, "Sweep negative frequencies as well");

  int omega_grid = 16, init_grid = 9, phases = 16;
  std::vector<double> xreal;
  bool relative = false;
  auto* pull_cmd = app.add_subcommand("pullin", "Pull-in set ESTIMATE over an initial-state grid");
  add_common(pull_cmd, c);
  pull_cmd->add_option("--omega-max", omega_max, "Upper end of the sweep");
  pull_cmd->add_option("--omega-grid", omega_grid, "Frequency grid points")->check(CLI::Range(2, 100000));
  pull_cmd->add_option("--init-grid", init_grid, "Initial points per filter dimension")
      ->check(CLI::Range(8, 1000));
  pull_cmd->add_option("--phases", phases, "Initial phases per period")->check(CLI::Range(8, 100000));
  pull_cmd->add_option("--xreal", xreal, "Filter-state bounds lo,hi for every component")
      ->delimiter(',')
      ->expected(2);
  pull_cmd->add_flag("--relative", relative, "Bounds are offsets from the stable equilibrium");

  double hint = 0.0;
  bool half_period = false;
  std::optional<double> band_at;
  bool no_verify = false;
  auto* lock_cmd = app.add_subcommand("lockin", "Lock-in frequency by the symmetric step procedure");
  add_common(lock_cmd, c);
  lock_cmd->add_option("--omega-hint", hint, "Starting frequency of the search");
  lock_cmd->add_flag("--half-period", half_period, "Count a slip at half a period instead of one");
  lock_cmd->add_option("--band", band_at, "Also compute the band approximation at this frequency");
  lock_cmd->add_flag("--no-verify", no_verify, "Skip the simulation check of the band");

  std::vector<double> x0;
  double theta0 = 0.0;
  auto* sim_cmd = app.add_subcommand("simulate", "Integrate one trajectory");
  add_common(sim_cmd, c);
  sim_cmd->add_option("--omega", omega, "Override loop.omega_delta_free");
  sim_cmd->add_option("--x0", x0, "Initial filter state")->delimiter(',');
  sim_cmd->add_option("--theta0", theta0, "Initial phase error");

  std::vector<int> raster{200, 200};
  bool no_domain = false;
  auto* por_cmd = app.add_subcommand("portrait", "Separatrices, lock-in domains and locus (first-order filters)");
  add_common(por_cmd, c);
  por_cmd->add_option("--omega", omega, "Override loop.omega_delta_free");
  por_cmd->add_option("--raster", raster, "Raster size NX,NTHETA")->delimiter(',')->expected(2);
  por_cmd->add_flag("--no-domain", no_domain, "Skip the raster computation");

  int trajectories = 10;
  std::uint64_t seed = 1;
  auto* lyap_cmd = app.add_subcommand("lyapunov-check",
                                      "Check the integrator-filter Lyapunov function along trajectories");
  add_common(lyap_cmd, c);
  lyap_cmd->add_option("--trajectories", trajectories, "Number of random initial states")
      ->check(CLI::Range(1, 100000));
  lyap_cmd->add_option("--seed", seed, "Random seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    const LoopSpec base_spec = load_config(c.config);
    const LoopSpec spec = omega ? base_spec.with_omega(*omega) : base_spec;
    const PllModel model = PllModel::build(spec);

    if (eq_cmd->parsed()) {
      Json rep = header("equilibria", model);
      rep["existence_bound"] = report::number(existence_bound(model));
      Json list = Json::array();
      for (const auto& e : find_equilibria(model)) list.push_back(report::equilibrium(e));
      rep["equilibria"] = list;
      emit(c, "equilibria", rep, out);
      return 0;
    }

    if (hold_cmd->parsed()) {
      HoldInOptions opts;
      opts.omega_max = omega_max;
      opts.grid = grid;
      opts.signed_sweep = signed_sweep;
      opts.jobs = c.jobs;
      const HoldInResult res = hold_in_set(spec, opts);
      const HoldInFrequency freq =
          signed_sweep ? HoldInFrequency{} : hold_in_frequency(spec, res, grid);
      Json rep = header("holdin", model);
      rep["signed_sweep"] = signed_sweep;
      rep["hold_in"] = report::hold_in(res, freq);
      emit(c, "holdin", rep, out);
      return 0;
    }

    if (pull_cmd->parsed()) {
      PullInOptions opts;
      opts.omega_max = omega_max;
      opts.omega_grid = omega_grid;
      opts.points_per_dim = init_grid;
      opts.phases = phases;
      opts.jobs = c.jobs;
      opts.cfg = integrator_from(c, opts.cfg);
      StateBox box = default_box(model);
      if (!xreal.empty()) {
        box.lo.assign(static_cast<std::size_t>(model.order()), xreal[0]);
        box.hi.assign(static_cast<std::size_t>(model.order()), xreal[1]);
        box.relative = relative;
      }
      try {
        box.validate(model.order());
      } catch (const Error& e) {
        throw ConfigError("--xreal", e.what());
      }
      const PullInResult res = pull_in_estimate(spec, box, opts);
      Json rep = header("pullin", model);
      rep["integrator"] = report::integrator(opts.cfg);
      rep["pull_in"] = report::pull_in(res, box);
      emit(c, "pullin", rep, out);
      return 0;
    }

    if (lock_cmd->parsed()) {
      LockInOptions opts;
      opts.omega_hint = hint;
      opts.cfg = integrator_from(c, opts.cfg);
      if (half_period) opts.slip.threshold_periods = 0.5;
      const LockInResult res = lock_in_frequency(spec, opts);
      Json rep = header("lockin", model);
      rep["integrator"] = report::integrator(opts.cfg);
      rep["slip_threshold_periods"] = opts.slip.threshold_periods;
      rep["lock_in"] = report::lock_in(res);
      if (band_at) {
        BandOptions bo;
        bo.cfg = opts.cfg;
        bo.slip = opts.slip;
        bo.verify = !no_verify;
        bo.jobs = c.jobs;
        rep["band"] = report::band(lock_in_band(spec, *band_at, bo));
        rep["band"]["omega_tilde"] = *band_at;
      }
      emit(c, "lockin", rep, out);
      return 0;
    }

    if (sim_cmd->parsed()) {
      const IntegratorConfig cfg = integrator_from(c, IntegratorConfig{});
      Eigen::VectorXd init = Eigen::VectorXd::Zero(model.dimension());
      if (!x0.empty()) {
        if (static_cast<int>(x0.size()) != model.order())
          throw ConfigError("--x0", "state dimension: expected " + std::to_string(model.order()) +
                                        " values");
        for (int i = 0; i < model.order(); ++i) init[i] = x0[static_cast<std::size_t>(i)];
      }
      init[model.order()] = theta0;
      const Trajectory traj = integrate(model, init, cfg);
      Json rep = header("simulate", model);
      rep["integrator"] = report::integrator(cfg);
      rep["initial_state"] = report::vector(init);
      rep["samples"] = traj.size();
      rep["final_state"] = report::vector(traj.state_vector(traj.size() - 1));
      rep["slips"] = report::slips(traj.slips);
      rep["lock"] = report::lock(traj.lock);
      if (!c.out.empty()) {
        std::ostringstream csv;
        csv << std::setprecision(17) << "t";
        for (int i = 1; i <= model.order(); ++i) csv << ",x_" << i;
        csv << ",theta_unwrapped,theta_wrapped,g\n";
        for (std::size_t k = 0; k < traj.size(); ++k) {
          const double* s = traj.state(k);
          csv << traj.t[k];
          for (int i = 0; i < model.order(); ++i) csv << ',' << s[i];
          csv << ',' << s[model.order()] << ',' << model.pd().wrap(s[model.order()]) << ','
              << model.filter_output(s) << '\n';
        }
        write_artifact(c, "trajectory.csv", csv.str());
      }
      emit(c, "simulate", rep, out);
      return 0;
    }

    if (por_cmd->parsed()) {
      Json rep = header("portrait", model);
      SeparatrixOptions so;
      const SeparatrixSet seps = trace_separatrices(model, so);
      const auto eqs = find_equilibria(model);
      const auto locus = zero_freq_diff_locus(model, 512);
      const RasterBox box = default_raster(model, raster[0], raster[1]);
      rep["separatrices"] = seps.curves.size();
      rep["notes"] = seps.notes;
      Json jb;
      jb["x"] = Json::array({box.x_lo, box.x_hi});
      jb["theta"] = Json::array({box.theta_lo, box.theta_hi});
      jb["nx"] = box.nx;
      jb["ntheta"] = box.ntheta;
      rep["raster_box"] = jb;
      Json el = Json::array();
      for (const auto& e : eqs) el.push_back(report::equilibrium(e));
      rep["equilibria"] = el;

      std::optional<SeparatrixSet> mirror;
      std::optional<UniformDomain> uni;
      std::optional<DomainRaster> single;
      const bool odd = model.pd().odd();
      if (odd && model.omega() != 0.0) mirror = trace_separatrices(model.with_omega(-model.omega()), so);
      if (!no_domain) {
        DomainOptions dopt;
        dopt.cfg = integrator_from(c, dopt.cfg);
        dopt.jobs = c.jobs;
        if (odd) {
          uni = uniform_domain_intersection(spec, model.omega(), box, dopt);
          rep["uniform_domain"] = {{"omega", std::abs(model.omega())},
                                   {"equilibria_inside", uni->equilibria_inside},
                                   {"band_half_width", uni->band_half_width}};
        } else {
          single = no_slip_domain(model, box, dopt);
          rep["domain_band_half_width"] = maximal_band(*single);
        }
      }

      std::ostringstream sep_csv, locus_csv;
      write_separatrices_csv(sep_csv, seps);
      write_artifact(c, "separatrices.csv", sep_csv.str());
      if (mirror) {
        std::ostringstream m;
        write_separatrices_csv(m, *mirror);
        write_artifact(c, "separatrices_mirror.csv", m.str());
      }
      write_locus_csv(locus_csv, locus);
      write_artifact(c, "locus.csv", locus_csv.str());
      auto raster_file = [&](const std::string& name, const DomainRaster& r) {
        std::ostringstream s;
        write_raster_csv(s, r);
        write_artifact(c, name, s.str());
      };
      if (uni) {
        const bool plus_first = model.omega() >= 0.0;
        raster_file("domain_plus.csv", plus_first ? uni->plus : uni->minus);
        raster_file("domain_minus.csv", plus_first ? uni->minus : uni->plus);
        raster_file("domain_intersection.csv", uni->intersection);
      }
      if (single) raster_file("domain.csv", *single);

      PortraitScene scene;
      scene.box = box;
      scene.period = model.pd().period();
      if (uni) {
        scene.shade_a = model.omega() >= 0.0 ? &uni->plus : &uni->minus;
        scene.shade_b = model.omega() >= 0.0 ? &uni->minus : &uni->plus;
      } else if (single) {
        scene.shade_a = &*single;
      }
      scene.separatrices = &seps;
      scene.separatrices_mirror = mirror ? &*mirror : nullptr;
      scene.equilibria = &eqs;
      scene.locus = &locus;
      std::ostringstream title;
      title << "omega = " << model.omega() << ", L = " << model.gain();
      scene.title = title.str();
      std::ostringstream svg;
      write_svg(svg, scene);
      write_artifact(c, "portrait.svg", svg.str());
      emit(c, "portrait", rep, out);
      return 0;
    }

    if (lyap_cmd->parsed()) {
      const IntegratorConfig cfg = integrator_from(c, IntegratorConfig{});
      const LyapunovReport lr = lyapunov_check(model, trajectories, seed, cfg);
      Json rep = header("lyapunov-check", model);
      rep["integrator"] = report::integrator(cfg);
      rep["trajectories"] = lr.trajectories;
      rep["violations"] = lr.violations;
      rep["worst_excess"] = report::number(lr.worst_increase);
      rep["pass"] = lr.pass;
      write_artifact(c, "lyapunov-check.json", rep.dump(2) + "\n");
      out << "V non-increasing: " << (lr.pass ? "PASS" : "FAIL") << " (" << lr.trajectories
          << " trajectories, " << lr.violations << " violations)\n";
      return lr.pass ? 0 : 1;
    }
  } catch (const ConfigError& e) {
    err << "config-error: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    err << "refused: " << errc_name(e.code()) << ": " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace pllranges
