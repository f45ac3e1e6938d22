#include "wolbopt/adjoint.hpp"

#include <cmath>
#include <numbers>

#include "wolbopt/analysis.hpp"
#include "wolbopt/errors.hpp"
#include "wolbopt/kernels.hpp"

namespace wolbopt {

Trajectory solve_adjoint(const Trajectory& forward, const Grid1D& grid, const Model& model) {
  const std::size_t nt = forward.steps();
  if (nt == 0) throw InputError("adjoint needs a forward trajectory with at least one step");
  const double T = forward.times.back();
  require_cfl(grid, T, static_cast<int>(nt), model.params());

  Trajectory q;
  q.dt = forward.dt;
  q.times = forward.times;
  q.fields.resize(nt + 1);
  const std::size_t n = grid.size();
  q.fields[nt].resize(n);
  for (std::size_t i = 0; i < n; ++i) q.fields[nt][i] = forward.final()[i] - 1.0;

  const auto s = kernels::view(grid.adjoint_laplacian());
  const double coef = model.params().D / (grid.dx() * grid.dx());
  SpatialField fp(n);
  for (std::size_t k = nt; k-- > 0;) {
    const SpatialField& pk = forward.fields[k];
    for (std::size_t i = 0; i < n; ++i) fp[i] = model.f_prime(pk[i]);
    q.fields[k].resize(n);
    kernels::omp::euler_step(s, coef, q.dt, q.fields[k + 1].data(), q.fields[k].data(),
                             [&](std::size_t i, double y) { return fp[i] * y; });
    for (double v : q.fields[k])
      if (!std::isfinite(v))
        throw DivergenceError("adjoint solve produced a non-finite value at step " + std::to_string(k));
  }
  return q;
}

GradientField gradient(const SpatialField& u0, const Grid1D& grid, const Model& model, double T,
                       int nt) {
  GradientField out;
  out.forward = solve_forward(u0, grid, model, T, nt);
  out.J = objective_JT(out.forward, grid);
  out.adjoint = solve_adjoint(out.forward, grid, model);
  const auto wJ = grid.objective_weights();
  const auto wB = grid.budget_weights();
  const SpatialField& q0 = out.adjoint.initial();
  const SpatialField& p0 = out.forward.initial();
  out.psi.resize(u0.size());
  for (std::size_t i = 0; i < u0.size(); ++i)
    out.psi[i] = (wJ[i] / wB[i]) * q0[i] * model.g(p0[i]);
  return out;
}

double directional_derivative(const GradientField& grad, const SpatialField& h, const Grid1D& grid) {
  SpatialField prod(h.size());
  for (std::size_t i = 0; i < h.size(); ++i) prod[i] = grad.psi[i] * h[i];
  return grid.integrate(prod);
}

Trajectory solve_linearized(const SpatialField& u0, const SpatialField& h, const Trajectory& forward,
                            const Grid1D& grid, const Model& model) {
  const std::size_t nt = forward.steps();
  const std::size_t n = grid.size();
  if (u0.size() != n || h.size() != n) throw InputError("field size does not match the grid");
  require_cfl(grid, forward.times.back(), static_cast<int>(nt), model.params());

  Trajectory v;
  v.dt = forward.dt;
  v.times = forward.times;
  v.fields.resize(nt + 1);
  v.fields[0].resize(n);
  for (std::size_t i = 0; i < n; ++i) v.fields[0][i] = model.g(forward.initial()[i]) * h[i];

  const auto s = kernels::view(grid.laplacian());
  const double coef = model.params().D / (grid.dx() * grid.dx());
  SpatialField fp(n);
  for (std::size_t k = 0; k < nt; ++k) {
    for (std::size_t i = 0; i < n; ++i) fp[i] = model.f_prime(forward.fields[k][i]);
    v.fields[k + 1].resize(n);
    kernels::omp::euler_step(s, coef, v.dt, v.fields[k].data(), v.fields[k + 1].data(),
                             [&](std::size_t i, double y) { return fp[i] * y; });
  }
  return v;
}

double second_derivative(const GradientField& grad, const SpatialField& u0, const SpatialField& h,
                         const Grid1D& grid, const Model& model) {
  const Trajectory& p = grad.forward;
  const Trajectory& q = grad.adjoint;
  const auto v = solve_linearized(u0, h, p, grid, model);
  const std::size_t nt = p.steps();
  const std::size_t n = grid.size();

  SpatialField buf(n);
  for (std::size_t i = 0; i < n; ++i) buf[i] = v.final()[i] * v.final()[i];
  double total = grid.integrate_objective(buf);

  double interior = 0.0;
  for (std::size_t k = 0; k < nt; ++k) {
    for (std::size_t i = 0; i < n; ++i)
      buf[i] = model.f_second(p.fields[k][i]) * q.fields[k + 1][i] * v.fields[k][i] * v.fields[k][i];
    interior += grid.integrate_objective(buf);
  }
  total += p.dt * interior;

  for (std::size_t i = 0; i < n; ++i) {
    const double pi0 = p.initial()[i];
    buf[i] = q.initial()[i] * model.g_prime(pi0) * model.g(pi0) * h[i] * h[i];
  }
  total += grid.integrate_objective(buf);
  return total;
}

double second_derivative(const SpatialField& u0, const SpatialField& h, const Grid1D& grid,
                         const Model& model, double T, int nt) {
  const auto grad = gradient(u0, grid, model, T, nt);
  return second_derivative(grad, u0, h, grid, model);
}

SpatialField neumann_mode(int n, const Grid1D& grid) {
  if (n < 1) throw InputError("mode index starts at 1");
  SpatialField w(grid.size());
  const double k = std::numbers::pi * (n - 1) / grid.L();
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = std::cos(k * grid.x(i));
  SpatialField sq(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) sq[i] = w[i] * w[i];
  const double norm = std::sqrt(grid.integrate_objective(sq));
  if (!(norm > 0.0)) throw DomainError("mode " + std::to_string(n) + " vanishes on this grid");
  for (double& x : w) x /= norm;
  return w;
}

namespace {

SpectralReport spectral_continuous(double c, const Grid1D& grid, const Model& model, double T,
                                   int n_modes) {
  const auto ode = constant_ode(c, model, T);
  const std::size_t m = ode.p.size();
  std::vector<double> E(m, 0.0), fpp(m);
  for (std::size_t j = 1; j < m; ++j) {
    const double h = ode.times[j] - ode.times[j - 1];
    E[j] = E[j - 1] + 0.5 * h * (model.f_prime(ode.p[j - 1]) + model.f_prime(ode.p[j]));
  }
  for (std::size_t j = 0; j < m; ++j) fpp[j] = model.f_second(ode.p[j]);
  const double ET = E.back();
  const double pT = ode.p.back();
  std::vector<double> qbar(m);
  for (std::size_t j = 0; j < m; ++j) qbar[j] = (pT - 1.0) * std::exp(ET - E[j]);
  const double g0 = model.G_inverse_prime(c);
  const double curv = model.G_inverse_second(c);

  SpectralReport r;
  r.c = c;
  r.variant = SpectralVariant::continuous;
  r.K_T = (pT - 1.0) * curv * std::exp(ET);
  const double D = model.params().D;
  for (int n = 1; n <= n_modes; ++n) {
    const double k = std::numbers::pi * (n - 1) / grid.L();
    const double lam = D * k * k;
    double integral = 0.0, prev = 0.0;
    double vT = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      const double v = g0 * std::exp(-lam * ode.times[j] + E[j]);
      const double term = fpp[j] * qbar[j] * v * v;
      if (j > 0) integral += 0.5 * (ode.times[j] - ode.times[j - 1]) * (prev + term);
      prev = term;
      vT = v;
    }
    r.modes.push_back({n, lam, vT * vT + integral + qbar[0] * curv});
  }
  return r;
}

SpectralReport spectral_discrete(double c, const Grid1D& grid, const Model& model, double T,
                                 int n_modes, int nt) {
  if (grid.layout() != GridLayout::vertex)
    throw InputError("discrete spectral report requires the vertex grid layout");
  require_cfl(grid, T, nt, model.params());
  const double dt = T / nt;
  std::vector<double> p(nt + 1), q(nt + 1);
  p[0] = model.G_inverse(c);
  for (int k = 0; k < nt; ++k) p[k + 1] = p[k] + dt * model.f(p[k]);
  q[nt] = p[nt] - 1.0;
  for (int k = nt; k-- > 0;) q[k] = q[k + 1] * (1.0 + dt * model.f_prime(p[k]));
  const double curv = model.G_inverse_second(c);

  SpectralReport r;
  r.c = c;
  r.variant = SpectralVariant::discrete;
  r.K_T = q[0] * curv;
  const double D = model.params().D;
  const double dx = grid.dx();
  const int available = std::min<int>(n_modes, static_cast<int>(grid.size()));
  for (int n = 1; n <= available; ++n) {
    const double lam = 2.0 * D / (dx * dx) * (1.0 - std::cos(std::numbers::pi * (n - 1) / grid.nx()));
    double v = model.g(p[0]);
    double interior = 0.0;
    for (int k = 0; k < nt; ++k) {
      interior += model.f_second(p[k]) * q[k + 1] * v * v;
      v = v * (1.0 - dt * lam + dt * model.f_prime(p[k]));
    }
    r.modes.push_back({n, lam, v * v + dt * interior + q[0] * curv});
  }
  return r;
}

}  // namespace

SpectralReport spectral_second_order(double c, const Grid1D& grid, const Model& model, double T,
                                     int n_modes, SpectralVariant variant, int nt) {
  if (!(c > 0.0 && c < model.G_max()))
    throw DomainError("spectral report needs 0 < c < G(1-)");
  if (n_modes < 1) throw InputError("spectral report needs at least one mode");
  return variant == SpectralVariant::continuous ? spectral_continuous(c, grid, model, T, n_modes)
                                                : spectral_discrete(c, grid, model, T, n_modes, nt);
}

}  // namespace wolbopt
