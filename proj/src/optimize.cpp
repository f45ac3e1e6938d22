#include "wolbopt/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numeric>

#include "wolbopt/analysis.hpp"
#include "wolbopt/errors.hpp"
#include "wolbopt/pde.hpp"

namespace wolbopt {

namespace {

SpatialField clip(const SpatialField& v, double shift, double M) {
  SpatialField u(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) u[i] = std::clamp(v[i] - shift, 0.0, M);
  return u;
}

double weighted_sq_dist(const SpatialField& a, const SpatialField& b, const Grid1D& grid) {
  SpatialField d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = (a[i] - b[i]) * (a[i] - b[i]);
  return grid.integrate(d);
}

double max_abs_diff(const SpatialField& a, const SpatialField& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

void check_budget(const ReleaseBudget& b) {
  if (!(b.C > 0.0 && b.M > 0.0 && std::isfinite(b.C) && std::isfinite(b.M)))
    throw InputError("budget needs C > 0 and M > 0");
}

}  // namespace

SpatialField project(const SpatialField& v, const ReleaseBudget& budget, const Grid1D& grid) {
  for (double x : v)
    if (!std::isfinite(x)) throw InputError("cannot project a non-finite field");
  SpatialField u = clip(v, 0.0, budget.M);
  if (grid.integrate(u) <= budget.C) return u;

  double lo = 0.0;
  double hi = *std::max_element(v.begin(), v.end());
  for (int it = 0; it < 200 && hi - lo > 1e-17 * std::max(1.0, std::abs(hi)); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (grid.integrate(clip(v, mid, budget.M)) > budget.C) lo = mid;
    else hi = mid;
  }
  // Exact shift on the active pattern found by bisection.
  const auto w = grid.budget_weights();
  double free_w = 0.0, free_v = 0.0, capped = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double y = v[i] - hi;
    if (y >= budget.M) capped += w[i] * budget.M;
    else if (y > 0.0) {
      free_w += w[i];
      free_v += w[i] * v[i];
    }
  }
  SpatialField best = clip(v, hi, budget.M);
  if (free_w > 0.0) {
    const double mu = (free_v + capped - budget.C) / free_w;
    SpatialField cand = clip(v, mu, budget.M);
    const double ic = grid.integrate(cand);
    if (ic <= budget.C + 1e-12 * budget.C &&
        std::abs(ic - budget.C) <= std::abs(grid.integrate(best) - budget.C))
      best = std::move(cand);
  }
  return best;
}

bool is_feasible(const SpatialField& u, const ReleaseBudget& budget, const Grid1D& grid,
                 double tol) {
  for (double x : u)
    if (!(x >= -1e-10 && x <= budget.M + 1e-10)) return false;
  return grid.integrate(u) <= budget.C + tol;
}

KktResidual kkt_residual(const SpatialField& u, double lambda, const SpatialField& psi,
                         const ReleaseBudget& budget, const Grid1D& grid) {
  KktResidual r;
  r.Lambda.resize(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    r.Lambda[i] = std::min(u[i], std::max(u[i] - budget.M, psi[i] + lambda));
    r.sup_norm = std::max(r.sup_norm, std::abs(r.Lambda[i]));
  }
  r.slackness = lambda * (grid.integrate(u) - budget.C);
  return r;
}

KktResidual kkt_residual(const SpatialField& u, double lambda, const ReleaseBudget& budget,
                         const Grid1D& grid, const Model& model, double T, int nt) {
  const auto g = gradient(u, grid, model, T, nt);
  return kkt_residual(u, lambda, g.psi, budget, grid);
}

double recover_multiplier(const SpatialField& u, const SpatialField& psi,
                          const ReleaseBudget& budget, const Grid1D& grid) {
  const double slack = budget.C - grid.integrate(u);
  if (slack > 1e-9 * budget.C) return 0.0;
  const auto w = grid.budget_weights();
  double wsum = 0.0, acc = 0.0;
  double upper_cap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (u[i] > 0.0 && u[i] < budget.M) {
      wsum += w[i];
      acc += w[i] * (-psi[i]);
    } else if (u[i] >= budget.M) {
      upper_cap = std::min(upper_cap, -psi[i]);
    }
  }
  if (wsum > 0.0) return std::max(0.0, acc / wsum);
  if (std::isfinite(upper_cap)) return std::max(0.0, upper_cap);
  return 0.0;
}

namespace {

struct Certified {
  SpatialField u;
  double J = 0.0;
  double lambda = 0.0;
  KktResidual kkt;
  SpatialField psi;
};

Certified certify(const SpatialField& v, const ReleaseBudget& budget, const Grid1D& grid,
                  const Model& model, double T, int nt) {
  Certified c;
  c.u = project(v, budget, grid);
  const auto g = gradient(c.u, grid, model, T, nt);
  c.J = g.J;
  c.psi = g.psi;
  c.lambda = recover_multiplier(c.u, g.psi, budget, grid);
  c.kkt = kkt_residual(c.u, c.lambda, g.psi, budget, grid);
  return c;
}

void finish(OptimResult& r, const Certified& c, double tol) {
  r.u_star = c.u;
  r.J_value = c.J;
  r.lambda = c.lambda;
  r.residual = c.kkt.sup_norm;
  r.slackness = c.kkt.slackness;
  r.converged = c.kkt.sup_norm <= tol && std::abs(c.kkt.slackness) <= tol;
}

void require_finite(double J) {
  if (!std::isfinite(J)) throw DivergenceError("objective became non-finite during optimization");
}

}  // namespace

namespace {

OptimResult pg_impl(OptimResult& r, const SpatialField& u_init, const ReleaseBudget& budget,
                    const Grid1D& grid, const Model& model, double T, int nt,
                    const OptimOptions& opts, const std::string& label) {
  r.init_label = label;
  r.method = "projected_gradient";

  SpatialField u = project(u_init, budget, grid);
  double tau = opts.tau0;
  Certified best;
  bool have_best = false;
  int evals = 0;
  while (true) {
    const auto g = gradient(u, grid, model, T, nt);
    ++evals;
    require_finite(g.J);
    Certified c;
    c.u = u;
    c.J = g.J;
    c.psi = g.psi;
    c.lambda = recover_multiplier(u, g.psi, budget, grid);
    c.kkt = kkt_residual(u, c.lambda, g.psi, budget, grid);
    r.history.push_back({evals, c.J, c.kkt.sup_norm});
    if (!have_best || c.J < best.J) {
      best = c;
      have_best = true;
    }
    if (c.kkt.sup_norm <= opts.tol || evals >= opts.max_iter) break;

    SpatialField trial(u.size());
    SpatialField next;
    double J_next = 0.0;
    bool accepted = false;
    for (int bt = 0; bt < 60; ++bt) {
      for (std::size_t i = 0; i < u.size(); ++i) trial[i] = u[i] - tau * g.psi[i];
      next = project(trial, budget, grid);
      J_next = evaluate_JT(next, grid, model, T, nt);
      require_finite(J_next);
      if (J_next <= g.J - opts.armijo / tau * weighted_sq_dist(next, u, grid)) {
        accepted = true;
        break;
      }
      tau *= 0.5;
    }
    if (!accepted || max_abs_diff(next, u) < 1e-15) break;
    u = std::move(next);
    tau *= 2.0;
  }
  r.iterations = evals;
  finish(r, best, opts.tol);
  return r;
}

OptimResult uzawa_impl(OptimResult& r, const SpatialField& u_init, const ReleaseBudget& budget,
                       const Grid1D& grid, const Model& model, double T, int nt,
                       const OptimOptions& opts, const std::string& label) {
  r.init_label = label;
  r.method = "uzawa";

  SpatialField u = clip(u_init, 0.0, budget.M);
  double lambda = 0.0;
  double rho = opts.rho;
  double prev_violation = std::numeric_limits<double>::infinity();
  int evals = 0;
  Certified best;
  bool have_best = false;

  auto lagrangian = [&](double J, double integral) {
    const double m = std::max(0.0, lambda + rho * (integral - budget.C));
    return J + (m * m - lambda * lambda) / (2.0 * rho);
  };

  while (evals < opts.max_iter) {
    double tau = opts.tau0;
    const int inner_cap = std::max(1, opts.max_iter - evals);
    for (int inner = 0; inner < inner_cap; ++inner) {
      const auto g = gradient(u, grid, model, T, nt);
      ++evals;
      require_finite(g.J);
      const double integral = grid.integrate(u);
      const double mu = std::max(0.0, lambda + rho * (integral - budget.C));
      SpatialField dir(u.size());
      double box_res = 0.0;
      for (std::size_t i = 0; i < u.size(); ++i) {
        dir[i] = g.psi[i] + mu;
        box_res = std::max(box_res, std::abs(std::min(u[i], std::max(u[i] - budget.M, dir[i]))));
      }
      if (box_res <= 0.1 * opts.tol || evals >= opts.max_iter) break;

      const double L0 = lagrangian(g.J, integral);
      SpatialField next;
      bool accepted = false;
      for (int bt = 0; bt < 60; ++bt) {
        SpatialField trial(u.size());
        for (std::size_t i = 0; i < u.size(); ++i) trial[i] = u[i] - tau * dir[i];
        next = clip(trial, 0.0, budget.M);
        const double J_next = evaluate_JT(next, grid, model, T, nt);
        require_finite(J_next);
        const double L1 = lagrangian(J_next, grid.integrate(next));
        if (L1 <= L0 - opts.armijo / tau * weighted_sq_dist(next, u, grid)) {
          accepted = true;
          break;
        }
        tau *= 0.5;
      }
      if (!accepted || max_abs_diff(next, u) < 1e-15) break;
      u = std::move(next);
      tau *= 2.0;
    }

    const double violation = grid.integrate(u) - budget.C;
    const Certified c = certify(u, budget, grid, model, T, nt);
    ++evals;
    r.history.push_back({evals, c.J, c.kkt.sup_norm});
    const bool ok = c.kkt.sup_norm <= opts.tol && std::abs(c.kkt.slackness) <= opts.tol;
    if (!have_best || ok || c.J < best.J) {
      best = c;
      have_best = true;
    }
    if (ok) break;

    lambda = std::max(0.0, lambda + rho * violation);
    if (std::abs(violation) > 1e-12 && std::abs(violation) > 0.25 * std::abs(prev_violation))
      rho = std::min(10.0 * rho, opts.rho_max);
    prev_violation = violation;
  }
  r.iterations = evals;
  finish(r, best, opts.tol);
  return r;
}

template <class Impl>
OptimResult guarded(Impl impl, const SpatialField& u_init, const ReleaseBudget& budget,
                    const Grid1D& grid, const Model& model, double T, int nt,
                    const OptimOptions& opts, const std::string& label) {
  check_budget(budget);
  if (u_init.size() != grid.size()) throw InputError("initial release does not match the grid");
  OptimResult r;
  try {
    return impl(r, u_init, budget, grid, model, T, nt, opts, label);
  } catch (const OptimizationDivergence&) {
    throw;
  } catch (const DivergenceError& e) {
    throw OptimizationDivergence(e.what(), r.history);
  }
}

}  // namespace

OptimResult projected_gradient(const SpatialField& u_init, const ReleaseBudget& budget,
                               const Grid1D& grid, const Model& model, double T, int nt,
                               const OptimOptions& opts, const std::string& label) {
  return guarded(pg_impl, u_init, budget, grid, model, T, nt, opts, label);
}

OptimResult uzawa(const SpatialField& u_init, const ReleaseBudget& budget, const Grid1D& grid,
                  const Model& model, double T, int nt, const OptimOptions& opts,
                  const std::string& label) {
  return guarded(uzawa_impl, u_init, budget, grid, model, T, nt, opts, label);
}

namespace {

SpatialField plateau(const Grid1D& grid, double a, double b, double M) {
  SpatialField u(grid.size(), 0.0);
  for (std::size_t i = 0; i < u.size(); ++i)
    if (grid.x(i) >= a - 1e-12 && grid.x(i) <= b + 1e-12) u[i] = M;
  return u;
}

}  // namespace

std::vector<LabeledStart> default_starts(const ReleaseBudget& budget, const Grid1D& grid,
                                         const Model& model) {
  check_budget(budget);
  const double level = budget.C / grid.budget_measure();
  std::vector<LabeledStart> s;
  s.push_back({"constant_C_over_L", project(constant_field(grid, level), budget, grid)});
  s.push_back({"constant_min_M", constant_field(grid, std::min(budget.M, level))});

  const auto& thr = model.thresholds();
  const double alpha = std::min(model.G_inverse(std::min(budget.M, model.G_max())),
                                0.5 * (thr.theta_c + 1.0));
  if (alpha > thr.theta_c) {
    try {
      const auto prof = subsolution_profile(alpha, grid, 0.5 * grid.L(), model);
      SpatialField u(prof.size());
      for (std::size_t i = 0; i < u.size(); ++i) u[i] = model.G(prof[i]);
      s.push_back({"subsolution_bump", project(u, budget, grid)});
    } catch (const Error&) {
    }
  }

  const double width = std::min(grid.L(), budget.C / budget.M);
  const double mid = 0.5 * grid.L();
  s.push_back({"center_bump", project(plateau(grid, mid - 0.5 * width, mid + 0.5 * width, budget.M),
                                      budget, grid)});
  s.push_back({"edge_bump", project(plateau(grid, 0.0, width, budget.M), budget, grid)});
  return s;
}

MultistartResult multistart(const ReleaseBudget& budget, const Grid1D& grid, const Model& model,
                            double T, int nt, const std::vector<LabeledStart>& starts,
                            const OptimOptions& opts, bool parallel) {
  if (starts.empty()) throw InputError("multistart needs at least one start");
  MultistartResult out;
  out.all.resize(starts.size());
  std::vector<std::exception_ptr> errors(starts.size());
  const long n = static_cast<long>(starts.size());
#pragma omp parallel for schedule(dynamic) if (parallel)
  for (long i = 0; i < n; ++i) {
    try {
      out.all[i] = projected_gradient(starts[i].u, budget, grid, model, T, nt, opts, starts[i].label);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  std::vector<std::size_t> order(out.all.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (out.all[a].J_value != out.all[b].J_value) return out.all[a].J_value < out.all[b].J_value;
    return out.all[a].init_label < out.all[b].init_label;
  });
  out.best = out.all[order.front()];
  return out;
}

bool budget_saturation_check(const OptimResult& result, const ReleaseBudget& budget,
                             const Grid1D& grid) {
  const double target = std::min(budget.C, budget.M * grid.budget_measure());
  return std::abs(grid.integrate(result.u_star) - target) <= 1e-3 * target;
}

}  // namespace wolbopt
