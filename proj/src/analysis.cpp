#include "wolbopt/analysis.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/toms748_solve.hpp>
#include <cmath>
#include <cstdint>
#include <string>

#include "wolbopt/errors.hpp"

namespace wolbopt {

ConstantTrajectory constant_ode(double c, const Model& model, double T, int steps) {
  if (!(c >= 0.0)) throw DomainError("constant release level must be nonnegative");
  if (!(T > 0.0) || steps < 1) throw InputError("constant ODE needs T > 0 and steps >= 1");
  ConstantTrajectory out;
  out.times.resize(steps + 1);
  out.p.resize(steps + 1);
  const double h = T / steps;
  double p = model.G_inverse(c);
  out.times[0] = 0.0;
  out.p[0] = p;
  for (int k = 0; k < steps; ++k) {
    const double k1 = model.f(p);
    const double k2 = model.f(p + 0.5 * h * k1);
    const double k3 = model.f(p + 0.5 * h * k2);
    const double k4 = model.f(p + h * k3);
    p += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    out.times[k + 1] = (k + 1 == steps) ? T : (k + 1) * h;
    out.p[k + 1] = p;
  }
  return out;
}

double constant_objective(double c, const Model& model, double T, double L) {
  const double pT = constant_ode(c, model, T).p.back();
  return 0.5 * L * (1.0 - pT) * (1.0 - pT);
}

namespace {

using boost::math::quadrature::gauss;
using boost::math::quadrature::gauss_kronrod;

void require_alpha(double alpha, const Model& model) {
  if (!(alpha > model.thresholds().theta_c && alpha < 1.0))
    throw DomainError("subsolution peak alpha must lie in (theta_c, 1)");
}

// F(alpha) - F(alpha - s^2), computed without cancellation.
double energy_gap(double alpha, double s, const Model& model) {
  const double s2 = s * s;
  if (s2 < 1e-7) {
    const double f = model.f(alpha), fp = model.f_prime(alpha), fpp = model.f_second(alpha);
    return f * s2 - 0.5 * fp * s2 * s2 + fpp * s2 * s2 * s2 / 6.0;
  }
  return gauss<double, 30>::integrate([&](double w) { return model.f(w); }, alpha - s2, alpha);
}

// dr/ds along the profile in the variable w = alpha - s^2.
double radial_density(double alpha, double s, const Model& model) {
  if (s == 0.0) return 2.0 / std::sqrt(2.0 * model.f(alpha));
  return 2.0 * s / std::sqrt(2.0 * energy_gap(alpha, s, model));
}

template <class Weight>
double profile_integral(double alpha, double s_end, const Model& model, Weight weight, double tol) {
  if (s_end <= 0.0) return 0.0;
  auto integrand = [&](double s) { return weight(alpha - s * s) * radial_density(alpha, s, model); };
  return gauss_kronrod<double, 31>::integrate(integrand, 0.0, s_end, 8, tol);
}

}  // namespace

double subsolution_radius(double alpha, const Model& model, double tol) {
  require_alpha(alpha, model);
  return profile_integral(alpha, std::sqrt(alpha), model, [](double) { return 1.0; }, tol);
}

double subsolution_cost(double alpha, const Model& model, double tol) {
  require_alpha(alpha, model);
  return profile_integral(
      alpha, std::sqrt(alpha), model, [&](double w) { return 2.0 * model.G(std::max(w, 0.0)); }, tol);
}

double subsolution_distance(double alpha, double v, const Model& model) {
  require_alpha(alpha, model);
  if (!(v >= 0.0 && v <= alpha)) throw DomainError("profile level must lie in [0, alpha]");
  return profile_integral(alpha, std::sqrt(alpha - v), model, [](double) { return 1.0; }, 1e-11);
}

double subsolution_value(double alpha, double r, const Model& model) {
  require_alpha(alpha, model);
  r = std::abs(r);
  if (r == 0.0) return alpha;
  const double s_max = std::sqrt(alpha);
  const double R = profile_integral(alpha, s_max, model, [](double) { return 1.0; }, 1e-11);
  if (r >= R) return 0.0;
  auto phi = [&](double s) {
    return profile_integral(alpha, s, model, [](double) { return 1.0; }, 1e-11) - r;
  };
  std::uintmax_t iters = 200;
  auto tol = boost::math::tools::eps_tolerance<double>(50);
  auto [a, b] = boost::math::tools::toms748_solve(phi, 0.0, s_max, -r, R - r, tol, iters);
  const double s = 0.5 * (a + b);
  return std::max(0.0, alpha - s * s);
}

SpatialField subsolution_profile(double alpha, const Grid1D& grid, double center, const Model& model) {
  const double R = subsolution_radius(alpha, model);
  if (!(R < center && R < grid.L() - center))
    throw GeometryError("subsolution support radius " + std::to_string(R) +
                        " does not fit inside the domain around the chosen center");
  SpatialField w(grid.size(), 0.0);
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = subsolution_value(alpha, grid.x(i) - center, model);
  return w;
}

SubsolutionReport subsolution_report(double alpha, const Grid1D& grid, double center,
                                     const Model& model) {
  SubsolutionReport r;
  r.alpha = alpha;
  r.center = center;
  r.R_alpha = subsolution_radius(alpha, model);
  r.C_alpha = subsolution_cost(alpha, model);
  r.profile = subsolution_profile(alpha, grid, center, model);
  return r;
}

bool NonOptimalityReport::verdict() const {
  return !checks.empty() &&
         std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

NonOptimalityReport check_nonoptimality(const ReleaseBudget& budget, const Grid1D& grid,
                                        const Model& model, double T) {
  const auto& thr = model.thresholds();
  const double L = grid.L();
  NonOptimalityReport r;
  r.checks.push_back({"G_thetac_lt_M", thr.G_of_theta_c < budget.M,
                      "G(theta_c) = " + std::to_string(thr.G_of_theta_c) +
                          ", M = " + std::to_string(budget.M)});
  r.checks.push_back({"C_lt_LG_theta", budget.C < L * thr.G_of_theta,
                      "C = " + std::to_string(budget.C) +
                          ", L G(theta) = " + std::to_string(L * thr.G_of_theta)});

  const double top = budget.M < model.G_max() ? model.G_inverse(budget.M) : 1.0 - ReleaseMap::kGuard;
  const double hi = std::min(top, 1.0 - 1e-6);
  bool found = false;
  if (hi > thr.theta_c) {
    const int n = 100;
    for (int k = 1; k <= n && !found; ++k) {
      const double alpha = thr.theta_c + (hi - thr.theta_c) * k / n;
      const double R = subsolution_radius(alpha, model, 1e-10);
      if (!(R < 0.5 * L)) continue;
      const double Ca = subsolution_cost(alpha, model, 1e-10);
      if (Ca <= budget.C) {
        found = true;
        r.alpha_used = alpha;
        r.R_alpha = R;
        r.C_alpha = Ca;
      }
    }
  }
  r.checks.push_back({"exists_alpha", found,
                      found ? "alpha = " + std::to_string(*r.alpha_used) +
                                  ", R_alpha = " + std::to_string(*r.R_alpha) +
                                  ", C_alpha = " + std::to_string(*r.C_alpha)
                            : "no alpha in (theta_c, G^-1(M)] with R_alpha < L/2 and C_alpha <= C"});

  r.J_constant = constant_objective(budget.C / L, model, T, L);
  if (found) {
    const double a = *r.alpha_used;
    const double inside = profile_integral(
        a, std::sqrt(a), model, [](double w) { return (1.0 - w) * (1.0 - w); }, 1e-10);
    r.J_bump_bound = 0.5 * ((L - 2.0 * *r.R_alpha) + 2.0 * inside);
    r.finite_T_certificate = r.J_constant > *r.J_bump_bound;
  }
  return r;
}

}  // namespace wolbopt
