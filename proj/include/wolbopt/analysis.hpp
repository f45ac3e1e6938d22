#pragma once

#include <optional>
#include <vector>

#include "wolbopt/grid.hpp"
#include "wolbopt/model.hpp"
#include "wolbopt/optimize.hpp"

namespace wolbopt {

struct ConstantTrajectory {
  std::vector<double> times;
  std::vector<double> p;
};

// RK4 for p' = f(p), p(0+) = G^-1(c).
ConstantTrajectory constant_ode(double c, const Model& model, double T, int steps = 4000);
// (L/2) (1 - pbar(T))^2
double constant_objective(double c, const Model& model, double T, double L);

// Bump half-width and cost of the stationary subsolution with peak alpha.
double subsolution_radius(double alpha, const Model& model, double tol = 1e-12);
double subsolution_cost(double alpha, const Model& model, double tol = 1e-12);
// Distance from the peak at which the radial profile reaches level v.
double subsolution_distance(double alpha, double v, const Model& model);
// Peak-to-level inversion: profile value at distance r (0 beyond the radius).
double subsolution_value(double alpha, double r, const Model& model);

// w_alpha on the grid centred at `center`; GeometryError if the support leaves the domain.
SpatialField subsolution_profile(double alpha, const Grid1D& grid, double center, const Model& model);

struct SubsolutionReport {
  double alpha = 0.0;
  double R_alpha = 0.0;
  double C_alpha = 0.0;
  double center = 0.0;
  SpatialField profile;
};

SubsolutionReport subsolution_report(double alpha, const Grid1D& grid, double center,
                                     const Model& model);

struct NonOptimalityReport {
  std::vector<Check> checks;  // G_thetac_lt_M, C_lt_LG_theta, exists_alpha
  std::optional<double> alpha_used;
  std::optional<double> R_alpha;
  std::optional<double> C_alpha;
  // Finite-horizon comparison: (L/2)(1 - pbar(T))^2 against (1/2) int (1 - w_alpha)^2.
  double J_constant = 0.0;
  std::optional<double> J_bump_bound;
  bool finite_T_certificate = false;

  bool verdict() const;
};

NonOptimalityReport check_nonoptimality(const ReleaseBudget& budget, const Grid1D& grid,
                                        const Model& model, double T);

}  // namespace wolbopt
