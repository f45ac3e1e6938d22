#include "wolbopt/pde.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "wolbopt/errors.hpp"
#include "wolbopt/kernels.hpp"

namespace wolbopt {

CflReport cfl_check(const Grid1D& grid, double dt, const ModelParams& params) {
  CflReport r;
  r.ratio = 2.0 * params.D * dt / (grid.dx() * grid.dx());
  r.margin = 1.0 - r.ratio;
  // Tolerate the rounding of dt = dx^2 / (2D) itself.
  r.passed = r.ratio <= 1.0 + 1e-12;
  return r;
}

void require_cfl(const Grid1D& grid, double T, int nt, const ModelParams& params) {
  if (nt < 1 || !(T > 0.0)) throw InputError("time grid needs T > 0 and nt >= 1");
  const auto r = cfl_check(grid, T / nt, params);
  if (!r.passed)
    throw ConfigurationError("CFL condition violated: 2 D dt / dx^2 = " + std::to_string(r.ratio) +
                             " > 1; increase nt or decrease nx");
}

namespace {

void check_finite(const SpatialField& v, std::size_t step, const char* what) {
  for (double x : v)
    if (!std::isfinite(x))
      throw DivergenceError(std::string(what) + " produced a non-finite value at step " +
                            std::to_string(step));
}

template <class Stepper>
Trajectory integrate(const SpatialField& p0, const Grid1D& grid, const Model& model, double T,
                     int nt, Stepper step) {
  require_cfl(grid, T, nt, model.params());
  check_finite(p0, 0, "initial state");
  Trajectory tr;
  tr.dt = T / nt;
  tr.times.resize(nt + 1);
  tr.fields.resize(nt + 1);
  tr.fields[0] = p0;
  tr.times[0] = 0.0;
  const auto s = kernels::view(grid.laplacian());
  const double coef = model.params().D / (grid.dx() * grid.dx());
  for (int k = 0; k < nt; ++k) {
    tr.fields[k + 1].resize(p0.size());
    step(s, coef, tr.dt, tr.fields[k].data(), tr.fields[k + 1].data());
    check_finite(tr.fields[k + 1], k + 1, "forward solve");
    tr.times[k + 1] = (k + 1 == nt) ? T : (k + 1) * tr.dt;
  }
  return tr;
}

}  // namespace

Trajectory solve_forward_from(const SpatialField& p0, const Grid1D& grid, const Model& model,
                              double T, int nt) {
  if (p0.size() != grid.size()) throw InputError("initial field size does not match the grid");
  return integrate(p0, grid, model, T, nt,
                   [&](const kernels::StencilView& s, double coef, double dt, const double* y,
                       double* out) {
                     kernels::omp::euler_step(s, coef, dt, y, out,
                                              [&](std::size_t, double p) { return model.f(p); });
                   });
}

Trajectory solve_forward_serial(const SpatialField& p0, const Grid1D& grid, const Model& model,
                                double T, int nt) {
  if (p0.size() != grid.size()) throw InputError("initial field size does not match the grid");
  return integrate(p0, grid, model, T, nt,
                   [&](const kernels::StencilView& s, double coef, double dt, const double* y,
                       double* out) {
                     kernels::serial::euler_step(s, coef, dt, y, out,
                                                 [&](std::size_t, double p) { return model.f(p); });
                   });
}

Trajectory solve_forward(const SpatialField& u0, const Grid1D& grid, const Model& model, double T,
                         int nt) {
  if (u0.size() != grid.size()) throw InputError("release field size does not match the grid");
  SpatialField p0(u0.size());
  for (std::size_t i = 0; i < u0.size(); ++i) {
    if (!std::isfinite(u0[i])) throw InputError("release field must be finite");
    if (u0[i] < 0.0) throw DomainError("release field must be nonnegative");
    p0[i] = model.G_inverse(u0[i]);
  }
  return solve_forward_from(p0, grid, model, T, nt);
}

double objective_JT(const SpatialField& pT, const Grid1D& grid) {
  SpatialField r(pT.size());
  for (std::size_t i = 0; i < pT.size(); ++i) r[i] = (1.0 - pT[i]) * (1.0 - pT[i]);
  return 0.5 * grid.integrate_objective(r);
}

double objective_JT(const Trajectory& traj, const Grid1D& grid) {
  return objective_JT(traj.final(), grid);
}

double evaluate_JT(const SpatialField& u0, const Grid1D& grid, const Model& model, double T,
                   int nt) {
  return objective_JT(solve_forward(u0, grid, model, T, nt), grid);
}

ControlSchedule ControlSchedule::constant(SpatialField u) {
  ControlSchedule c;
  c.fields.push_back(std::move(u));
  return c;
}

const SpatialField& ControlSchedule::at(std::size_t step) const {
  if (fields.empty()) throw InputError("empty control schedule");
  return fields.size() == 1 ? fields.front() : fields.at(step);
}

FullModelState FullModelResult::final_state(double epsilon) const {
  return {n_in.final(), n_un.final(), epsilon};
}

double infected_equilibrium(double epsilon, const ModelParams& p) {
  return p.K * (1.0 - epsilon * p.delta * p.d_un / (p.F_un * (1.0 - p.s_f)));
}

double uninfected_equilibrium(double epsilon, const ModelParams& p) {
  return p.K * (1.0 - epsilon * p.d_un / p.F_un);
}

FullModelResult solve_full_model(const ControlSchedule& u, const FullModelState& init,
                                 const Grid1D& grid, const ModelParams& p, double T, int nt) {
  const double eps = init.epsilon;
  if (!(eps > 0.0)) throw InputError("epsilon must be positive");
  const std::size_t n = grid.size();
  if (init.n_in.size() != n || init.n_un.size() != n)
    throw InputError("initial densities do not match the grid");
  for (std::size_t i = 0; i < n; ++i)
    if (!(init.n_in[i] >= 0.0) || !(init.n_un[i] >= 0.0))
      throw InputError("initial densities must be nonnegative");
  require_cfl(grid, T, nt, p);

  const double dt = T / nt;
  const double rate = p.F_un / eps;
  FullModelResult res;
  res.reaction_substeps = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(dt * rate / 0.2)));
  const double h = dt / static_cast<double>(res.reaction_substeps);
  const double death_in = p.delta * p.d_un;

  for (Trajectory* tr : {&res.n_in, &res.n_un}) {
    tr->dt = dt;
    tr->times.resize(nt + 1);
    tr->fields.resize(nt + 1);
  }
  res.n_in.fields[0] = init.n_in;
  res.n_un.fields[0] = init.n_un;
  res.n_in.times[0] = res.n_un.times[0] = 0.0;

  const auto s = kernels::view(grid.laplacian());
  const double coef = p.D / (grid.dx() * grid.dx());
  auto none = [](std::size_t, double) { return 0.0; };
  SpatialField a(n), b(n);
  for (int k = 0; k < nt; ++k) {
    const SpatialField& uk = u.at(static_cast<std::size_t>(k));
    if (uk.size() != n) throw InputError("control field does not match the grid");
    kernels::omp::euler_step(s, coef, dt, res.n_in.fields[k].data(), a.data(), none);
    kernels::omp::euler_step(s, coef, dt, res.n_un.fields[k].data(), b.data(), none);
    for (std::size_t sub = 0; sub < res.reaction_substeps; ++sub) {
      for (std::size_t i = 0; i < n; ++i) {
        const double ni = a[i], nu = b[i];
        const double N = ni + nu;
        const double logistic = 1.0 - N / p.K;
        const double ri = (1.0 - p.s_f) * rate * ni * logistic - death_in * ni + uk[i];
        const double frac = N > 0.0 ? ni / N : 0.0;
        const double ru = rate * nu * (1.0 - p.s_h * frac) * logistic - p.d_un * nu;
        double ni_next = ni + h * ri;
        double nu_next = nu + h * ru;
        if (ni_next < 0.0) {
          ni_next = 0.0;
          ++res.floored_values;
        }
        if (nu_next < 0.0) {
          nu_next = 0.0;
          ++res.floored_values;
        }
        a[i] = ni_next;
        b[i] = nu_next;
      }
    }
    check_finite(a, k + 1, "full model (reduce dt or epsilon stiffness)");
    check_finite(b, k + 1, "full model (reduce dt or epsilon stiffness)");
    res.n_in.fields[k + 1] = a;
    res.n_un.fields[k + 1] = b;
    const double t = (k + 1 == nt) ? T : (k + 1) * dt;
    res.n_in.times[k + 1] = res.n_un.times[k + 1] = t;
  }
  return res;
}

double objective_JTeps(const FullModelState& s, const Grid1D& grid, const ModelParams& p) {
  const double target = infected_equilibrium(s.epsilon, p);
  SpatialField a(s.n_in.size()), b(s.n_in.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    a[i] = s.n_un[i] * s.n_un[i];
    const double gap = std::max(target - s.n_in[i], 0.0);
    b[i] = gap * gap;
  }
  return 0.5 * grid.integrate_objective(a) + 0.5 * grid.integrate_objective(b);
}

Trajectory solve_reduced_with_source(const SpatialField& p_init, const SpatialField& u,
                                     const Grid1D& grid, const Model& model, double T, int nt) {
  if (p_init.size() != grid.size() || u.size() != grid.size())
    throw InputError("field size does not match the grid");
  return integrate(p_init, grid, model, T, nt,
                   [&](const kernels::StencilView& s, double coef, double dt, const double* y,
                       double* out) {
                     kernels::omp::euler_step(s, coef, dt, y, out, [&](std::size_t i, double p) {
                       return model.f(p) + u[i] * model.g(p);
                     });
                   });
}

FullModelState well_prepared_state(const SpatialField& p_init, double epsilon,
                                   const ModelParams& params) {
  FullModelState s;
  s.epsilon = epsilon;
  s.n_in.resize(p_init.size());
  s.n_un.resize(p_init.size());
  for (std::size_t i = 0; i < p_init.size(); ++i) {
    s.n_in[i] = params.K * p_init[i];
    s.n_un[i] = params.K * (1.0 - p_init[i]);
  }
  return s;
}

std::vector<AsymptoticRow> asymptotic_sweep(const std::vector<double>& eps_list,
                                            const SpatialField& u, const SpatialField& p_init,
                                            const Grid1D& grid, const Model& model, double T,
                                            int nt, AsymptoticInit init) {
  const auto& p = model.params();
  const bool free_start = init == AsymptoticInit::wolbachia_free;
  const SpatialField start = free_start ? SpatialField(grid.size(), 0.0) : p_init;
  const auto reduced = solve_reduced_with_source(start, u, grid, model, T, nt);
  const SpatialField& p0 = reduced.final();
  SpatialField gap(p0.size());
  for (std::size_t i = 0; i < gap.size(); ++i) gap[i] = (1.0 - p0[i]) * (1.0 - p0[i]);
  const double J_limit = p.K * p.K * grid.integrate_objective(gap);

  std::vector<AsymptoticRow> rows;
  for (double eps : eps_list) {
    FullModelState s0 = well_prepared_state(start, eps, p);
    if (free_start) std::fill(s0.n_un.begin(), s0.n_un.end(), uninfected_equilibrium(eps, p));
    const auto full = solve_full_model(ControlSchedule::constant(u), s0, grid, p, T, nt);
    const auto fin = full.final_state(eps);
    SpatialField err(p0.size());
    for (std::size_t i = 0; i < err.size(); ++i) {
      const double N = fin.n_in[i] + fin.n_un[i];
      const double pe = N > 0.0 ? fin.n_in[i] / N : 0.0;
      err[i] = (pe - p0[i]) * (pe - p0[i]);
    }
    AsymptoticRow r;
    r.epsilon = eps;
    r.p_error_L2 = std::sqrt(grid.integrate_objective(err));
    r.J_eps = objective_JTeps(fin, grid, p);
    r.J_limit = J_limit;
    r.J_error = std::abs(r.J_eps - J_limit);
    r.substeps = full.reaction_substeps;
    r.floored_values = full.floored_values;
    rows.push_back(r);
  }
  return rows;
}

}  // namespace wolbopt
