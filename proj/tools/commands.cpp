#include "commands.hpp"

#include <cmath>
#include <filesystem>
#include <numeric>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "wolbopt/adjoint.hpp"
#include "wolbopt/analysis.hpp"
#include "wolbopt/config.hpp"
#include "wolbopt/errors.hpp"
#include "wolbopt/io.hpp"
#include "wolbopt/model.hpp"
#include "wolbopt/optimize.hpp"
#include "wolbopt/pde.hpp"

namespace wolbopt::cli {

namespace fs = std::filesystem;

namespace {

struct Options {
  std::string config;
  std::string out = "results";
  int nx = 0;
  int nt = 0;
  std::vector<std::string> overrides;
  std::string report = "all";
};

struct Context {
  ExperimentConfig cfg;
  fs::path out_dir;
  std::string header;
  std::ostream& out;
  std::ostream& err;
};

ExperimentConfig resolve_config(const Options& o) {
  std::vector<std::string> ov = o.overrides;
  if (o.nx > 0) ov.push_back("grid.nx=" + std::to_string(o.nx));
  if (o.nt > 0) ov.push_back("time.nt=" + std::to_string(o.nt));
  if (!o.config.empty()) return load_config(o.config, ov);
  ExperimentConfig cfg = default_config();
  for (const auto& a : ov) apply_override(cfg, a);
  check_config(cfg);
  return cfg;
}

// Small-denominator rational that reproduces v to 1e-12, if any.
std::string as_fraction(double v) {
  for (int q = 1; q <= 1000; ++q) {
    const double p = std::round(v * q);
    if (std::abs(p / q - v) < 1e-12) return std::to_string(static_cast<long>(p)) + "/" + std::to_string(q);
  }
  return "";
}

void write(const Context& ctx, const std::string& name, const std::string& text) {
  const fs::path p = ctx.out_dir / name;
  write_text(p, text);
  ctx.out << "wrote " << p.string() << "\n";
}

std::string json_with_header(nlohmann::ordered_json body, const Context& ctx) {
  nlohmann::ordered_json j;
  j["tool_version"] = kToolVersion;
  j["config_hash"] = ctx.cfg.hash();
  for (auto& [k, v] : body.items()) j[k] = v;
  return j.dump(2) + "\n";
}

int cmd_validate(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const auto report = validate_params(cfg.params);
  bool ok = report.passed();
  for (const auto& c : report.checks)
    ctx.out << (c.passed ? "[pass] " : "[FAIL] ") << c.name << ": " << c.detail << "\n";
  const Grid1D grid = cfg.grid();
  const auto cfl = cfl_check(grid, cfg.T / cfg.nt, cfg.params);
  ctx.out << (cfl.passed ? "[pass] " : "[FAIL] ") << "cfl: 2 D dt / dx^2 = " << format_number(cfl.ratio)
          << " (margin " << format_number(cfl.margin) << ")\n";
  ok = ok && cfl.passed;
  if (report.passed()) {
    const Model model(cfg.params);
    const auto& t = model.thresholds();
    const auto frac = as_fraction(t.theta);
    ctx.out << "theta = " << format_number(t.theta) << (frac.empty() ? "" : " = " + frac) << "\n";
    ctx.out << "theta_c = " << format_number(t.theta_c) << "\n";
    ctx.out << "G(theta) = " << format_number(t.G_of_theta) << "\n";
    ctx.out << "G(theta_c) = " << format_number(t.G_of_theta_c) << "\n";
  } else {
    ctx.err << "assumption failure:";
    for (const auto& n : report.failures()) ctx.err << " " << n;
    ctx.err << "\n";
  }
  ctx.out << (ok ? "validate: ok" : "validate: FAILED") << "\n";
  return ok ? kOk : kAssumption;
}

std::vector<double> parse_numbers(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || item.find_first_not_of(" \t", used) != std::string::npos || !std::isfinite(v))
      throw InputError(what + ": '" + item + "' is not a number");
    out.push_back(v);
  }
  return out;
}

SpatialField parse_release(const std::string& spec, const Grid1D& grid, const Model& model) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos)
    throw InputError("release '" + spec + "' must be constant:V, csv:PATH or bump:ALPHA,CENTER");
  const std::string kind = spec.substr(0, colon);
  const std::string arg = spec.substr(colon + 1);
  if (kind == "constant") {
    const auto v = parse_numbers(arg, "constant release");
    if (v.size() != 1) throw InputError("constant release needs one value");
    return constant_field(grid, v[0]);
  }
  if (kind == "csv") return read_profile_csv(arg, grid);
  if (kind == "bump") {
    const auto v = parse_numbers(arg, "bump release");
    if (v.size() != 2) throw InputError("bump release needs ALPHA,CENTER");
    const auto w = subsolution_profile(v[0], grid, v[1], model);
    SpatialField u(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) u[i] = model.G(w[i]);
    return u;
  }
  throw InputError("unknown release kind '" + kind + "'");
}

std::vector<std::size_t> snapshot_steps(const std::vector<double>& times, const Trajectory& tr) {
  std::vector<std::size_t> steps;
  const double T = tr.times.back();
  for (double t : times) {
    if (!(t >= 0.0 && t <= T + 1e-12)) throw InputError("snapshot time outside [0, T]");
    steps.push_back(static_cast<std::size_t>(std::llround(t / tr.dt)));
  }
  return steps;
}

int cmd_simulate(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const Model model(cfg.params);
  const Grid1D grid = cfg.grid();
  const SpatialField u0 = parse_release(cfg.simulate.release, grid, model);
  const auto tr = solve_forward(u0, grid, model, cfg.T, cfg.nt);
  const double J = objective_JT(tr, grid);
  write(ctx, "trajectory.csv", trajectory_csv(grid, tr, snapshot_steps(cfg.simulate.snapshots, tr), ctx.header));
  write(ctx, "release.csv", profile_csv(grid, u0, "u0", ctx.header));
  nlohmann::ordered_json j;
  j["release"] = cfg.simulate.release;
  j["J_T"] = J;
  j["budget_used"] = grid.integrate(u0);
  write(ctx, "simulate_summary.json", json_with_header(j, ctx));
  ctx.out << "J_T = " << format_number(J) << "\n";
  return kOk;
}

void emit_result(Context& ctx, const std::string& tag, const Grid1D& grid, const OptimResult& r) {
  write(ctx, "u_star_" + tag + ".csv", profile_csv(grid, r.u_star, "u", ctx.header));
  write(ctx, "summary_" + tag + ".json", summary_json(r, ctx.cfg.hash()));
  write(ctx, "history_" + tag + ".csv", history_csv(r.history, ctx.header));
  ctx.out << tag << ": J = " << format_number(r.J_value) << ", lambda = " << format_number(r.lambda)
          << ", residual = " << format_number(r.residual) << ", iterations = " << r.iterations
          << ", init = " << r.init_label << (r.converged ? "" : " (not converged)") << "\n";
}

SpatialField constant_start(const ExperimentConfig& cfg, const Grid1D& grid) {
  return constant_field(grid, std::min(cfg.budget.M, cfg.budget.C / grid.budget_measure()));
}

int cmd_optimize(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const Model model(cfg.params);
  const Grid1D grid = cfg.grid();
  const auto& m = cfg.optimize.method;
  try {
    if (m == "uzawa" || m == "both") {
      const auto r = uzawa(constant_start(cfg, grid), cfg.budget, grid, model, cfg.T, cfg.nt,
                           cfg.optimize.options, "constant");
      emit_result(ctx, "uzawa", grid, r);
    }
    if (m == "multistart" || m == "both") {
      const auto ms = multistart(cfg.budget, grid, model, cfg.T, cfg.nt,
                                 default_starts(cfg.budget, grid, model), cfg.optimize.options,
                                 cfg.optimize.parallel);
      emit_result(ctx, "multistart", grid, ms.best);
      std::ostringstream os;
      os << ctx.header << "init_label,J,residual,iterations,converged\n";
      for (const auto& r : ms.all)
        os << r.init_label << "," << format_number(r.J_value) << "," << format_number(r.residual)
           << "," << r.iterations << "," << (r.converged ? 1 : 0) << "\n";
      write(ctx, "multistart_runs.csv", os.str());
    }
  } catch (const OptimizationDivergence& e) {
    write(ctx, "history_diverged.csv", history_csv(e.history(), ctx.header));
    throw;
  }
  return kOk;
}

int cmd_table3(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const Model model(cfg.params);
  const Grid1D grid = cfg.grid();
  const Grid1D ms_grid = cfg.grid(cfg.table3.multistart_layout);
  const std::vector<std::pair<double, double>> rows = {{0.02, 1.2}, {0.03, 1.2}, {0.04, 0.5},
                                                       {0.04, 0.8}, {0.08, 0.5}, {0.08, 0.8}};
  std::ostringstream os;
  os << ctx.header << "M,C,J_multistart,J_uzawa,J_T_M,J_T_C_over_L,best_init\n";
  for (const auto& [M, C] : rows) {
    const ReleaseBudget b{C, M};
    const auto ms = multistart(b, ms_grid, model, cfg.T, cfg.nt, default_starts(b, ms_grid, model),
                               cfg.optimize.options, cfg.optimize.parallel);
    ExperimentConfig row_cfg = cfg;
    row_cfg.budget = b;
    const auto uz = uzawa(constant_start(row_cfg, grid), b, grid, model, cfg.T, cfg.nt,
                          cfg.optimize.options, "constant");
    const double level = C / grid.L();
    std::string jm, jc;
    if (level > M) jm = format_number(evaluate_JT(constant_field(grid, M), grid, model, cfg.T, cfg.nt));
    else jc = format_number(evaluate_JT(constant_field(grid, level), grid, model, cfg.T, cfg.nt));
    os << format_number(M) << "," << format_number(C) << "," << format_number(ms.best.J_value) << ","
       << format_number(uz.J_value) << "," << jm << "," << jc << "," << ms.best.init_label << "\n";
    ctx.out << "M = " << format_number(M) << ", C = " << format_number(C)
            << ": multistart " << format_number(ms.best.J_value) << " (" << ms.best.init_label
            << "), uzawa " << format_number(uz.J_value) << (uz.converged ? "" : " (not converged)")
            << (jm.empty() ? "" : ", J_T(M) " + jm) << (jc.empty() ? "" : ", J_T(C/L) " + jc) << "\n";
  }
  write(ctx, "table3.csv", os.str());
  return kOk;
}

SpatialField gaussian(const Grid1D& grid, double amplitude, double center, double width) {
  SpatialField v(grid.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double z = (grid.x(i) - center) / width;
    v[i] = amplitude * std::exp(-z * z);
  }
  return v;
}

int cmd_asymptotics(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const auto& a = cfg.asymptotics;
  const Model model(cfg.params);
  const Grid1D grid = cfg.grid();
  const auto u = gaussian(grid, a.control_amplitude, a.control_center, a.control_width);
  const auto p0 = gaussian(grid, a.init_amplitude, a.init_center, a.init_width);
  const auto rows = asymptotic_sweep(a.eps, u, p0, grid, model, cfg.T, cfg.nt, a.init);
  write(ctx, "asymptotics.csv", asymptotics_csv(rows, ctx.header));
  for (const auto& r : rows)
    ctx.out << "eps = " << format_number(r.epsilon) << ": |p_eps(T) - p0(T)| = " << format_number(r.p_error_L2)
            << ", |J_eps - J0| = " << format_number(r.J_error) << "\n";
  return kOk;
}

int cmd_analyze(Context& ctx, const std::string& which) {
  const auto& cfg = ctx.cfg;
  const Model model(cfg.params);
  const Grid1D grid = cfg.grid();
  const double level = cfg.analyze.level > 0.0 ? cfg.analyze.level : cfg.budget.C / cfg.L;
  const bool all = which == "all";

  if (all || which == "constant") {
    const auto ode = constant_ode(level, model, cfg.T);
    std::ostringstream os;
    os << ctx.header << "t,p_bar\n";
    for (std::size_t k = 0; k < ode.p.size(); k += 40)
      os << format_number(ode.times[k]) << "," << format_number(ode.p[k]) << "\n";
    write(ctx, "constant_ode.csv", os.str());
    const double J_ode = 0.5 * cfg.L * (1.0 - ode.p.back()) * (1.0 - ode.p.back());
    const double J_pde = evaluate_JT(constant_field(grid, level), grid, model, cfg.T, cfg.nt);
    ctx.out << "constant level " << format_number(level) << ": J (ODE) = " << format_number(J_ode)
            << ", J (PDE) = " << format_number(J_pde) << "\n";
  }
  if (all || which == "spectral") {
    const auto variant = cfg.analyze.spectral == "discrete" ? SpectralVariant::discrete
                                                            : SpectralVariant::continuous;
    const auto rep = spectral_second_order(level, grid, model, cfg.T, cfg.analyze.modes, variant, cfg.nt);
    write(ctx, "spectral.csv", spectral_csv(rep, ctx.header));
    int negative = 0;
    for (const auto& m : rep.modes) negative += m.delta <= 0.0;
    ctx.out << "spectral: K_T = " << format_number(rep.K_T) << ", delta_1 = " << format_number(rep.modes.front().delta)
            << ", nonpositive delta_n: " << negative << " of " << rep.modes.size() << "\n";
  }
  if (all || which == "subsolution") {
    std::vector<SubsolutionReport> sweep;
    for (double a : cfg.analyze.alpha_sweep) {
      SubsolutionReport r;
      r.alpha = a;
      r.R_alpha = subsolution_radius(a, model);
      r.C_alpha = subsolution_cost(a, model);
      sweep.push_back(r);
    }
    write(ctx, "subsolution_sweep.csv", subsolution_sweep_csv(sweep, ctx.header));
    const double center = cfg.analyze.center > 0.0 ? cfg.analyze.center : 0.5 * cfg.L;
    const auto rep = subsolution_report(cfg.analyze.alpha, grid, center, model);
    write(ctx, "subsolution_profile.csv", profile_csv(grid, rep.profile, "w_alpha", ctx.header));
    ctx.out << "subsolution alpha = " << format_number(rep.alpha) << ": R_alpha = " << format_number(rep.R_alpha)
            << ", C_alpha = " << format_number(rep.C_alpha) << "\n";
  }
  if (all || which == "nonoptimality") {
    const auto rep = check_nonoptimality(cfg.budget, grid, model, cfg.T);
    nlohmann::ordered_json j;
    for (const auto& c : rep.checks) {
      j["checks"][c.name] = c.passed;
      ctx.out << (c.passed ? "[pass] " : "[FAIL] ") << c.name << ": " << c.detail << "\n";
    }
    if (rep.alpha_used) j["alpha_used"] = *rep.alpha_used;
    j["J_constant"] = rep.J_constant;
    if (rep.J_bump_bound) j["J_bump_bound"] = *rep.J_bump_bound;
    j["finite_T_certificate"] = rep.finite_T_certificate;
    j["verdict"] = rep.verdict();
    write(ctx, "nonoptimality.json", json_with_header(j, ctx));
    ctx.out << "non-optimality certificate: " << (rep.verdict() ? "holds" : "not established") << "\n";
  }
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Optimal spatial release planning for Wolbachia population replacement", "wolbopt"};
  app.require_subcommand(1);
  app.fallthrough();
  Options o;
  app.add_option("--config", o.config, "INI configuration file");
  app.add_option("--out", o.out, "output directory")->capture_default_str();
  app.add_option("--nx", o.nx, "number of space steps");
  app.add_option("--nt", o.nt, "number of time steps");
  app.add_option("--override", o.overrides, "section.key=value (repeatable)")->take_all();
  app.set_version_flag("--version", std::string(kToolVersion));

  auto* validate = app.add_subcommand("validate", "check parameters, CFL and thresholds");
  auto* simulate = app.add_subcommand("simulate", "forward solve for the configured release");
  auto* optimize = app.add_subcommand("optimize", "Uzawa and multistart projected gradient");
  auto* table3 = app.add_subcommand("table3", "constant and optimized rows of the reference table");
  auto* asymptotics = app.add_subcommand("asymptotics", "epsilon sweep of the two-compartment model");
  auto* analyze = app.add_subcommand("analyze", "constant, spectral, subsolution and non-optimality reports");
  analyze->add_option("report", o.report, "constant | spectral | subsolution | nonoptimality | all")
      ->check(CLI::IsMember({"constant", "spectral", "subsolution", "nonoptimality", "all"}));

  std::vector<std::string> storage = args;
  storage.insert(storage.begin(), "wolbopt");
  std::vector<char*> argv;
  for (auto& s : storage) argv.push_back(s.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInput;
  }

  try {
    Context ctx{resolve_config(o), fs::path(o.out), "", out, err};
    ctx.header = header_line(ctx.cfg.hash());
    if (*validate) return cmd_validate(ctx);
    if (*simulate) return cmd_simulate(ctx);
    if (*optimize) return cmd_optimize(ctx);
    if (*table3) return cmd_table3(ctx);
    if (*asymptotics) return cmd_asymptotics(ctx);
    if (*analyze) return cmd_analyze(ctx, o.report);
  } catch (const InputError& e) {
    err << "input error: " << e.what() << "\n";
    return kInput;
  } catch (const DomainError& e) {
    err << "input error: " << e.what() << "\n";
    return kInput;
  } catch (const DivergenceError& e) {
    err << "divergence: " << e.what() << "\n";
    return kDivergence;
  } catch (const Error& e) {
    err << "assumption failure: " << e.what() << "\n";
    return kAssumption;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kInput;
  }
  return kInput;
}

}  // namespace wolbopt::cli
