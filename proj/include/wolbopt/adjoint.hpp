#pragma once

#include <cstddef>
#include <vector>

#include "wolbopt/grid.hpp"
#include "wolbopt/model.hpp"
#include "wolbopt/pde.hpp"

namespace wolbopt {

// Switching function psi with dJ(u0).h = integrate(psi * h) in the budget
// inner product of the grid. Forward and adjoint trajectories are kept.
struct GradientField {
  SpatialField psi;
  double J = 0.0;
  Trajectory forward;
  Trajectory adjoint;
};

// Backward recurrence q^k = q^{k+1} + dt (D Lap* q^{k+1} + f'(p^k) q^{k+1}),
// q^N = p^N - 1: the exact transpose of the forward Euler scheme.
Trajectory solve_adjoint(const Trajectory& forward, const Grid1D& grid, const Model& model);

GradientField gradient(const SpatialField& u0, const Grid1D& grid, const Model& model, double T,
                       int nt);

double directional_derivative(const GradientField& grad, const SpatialField& h, const Grid1D& grid);

// Tangent recurrence with pdot^0 = g(G^-1(u0)) h.
Trajectory solve_linearized(const SpatialField& u0, const SpatialField& h, const Trajectory& forward,
                            const Grid1D& grid, const Model& model);

// d2J(u0)(h,h) = |pdot(T)|^2 + dt sum_k <q^{k+1}, f''(p^k) (pdot^k)^2>
//              + <q^0, (G^-1)''(u0) h^2>
double second_derivative(const SpatialField& u0, const SpatialField& h, const Grid1D& grid,
                         const Model& model, double T, int nt);
double second_derivative(const GradientField& grad, const SpatialField& u0, const SpatialField& h,
                         const Grid1D& grid, const Model& model);

struct SpectralMode {
  int n = 0;
  double lambda = 0.0;
  double delta = 0.0;
};

// continuous: Neumann eigenvalues D (pi (n-1) / L)^2, constant-state ODEs by
//   RK4 with T/4000 steps and trapezoid time integrals.
// discrete: eigenpairs of the grid Laplacian and the Euler recurrences on the
//   solver time grid; equals second_derivative on grid modes (vertex layout).
enum class SpectralVariant { continuous, discrete };

struct SpectralReport {
  std::vector<SpectralMode> modes;
  double K_T = 0.0;
  double c = 0.0;
  SpectralVariant variant = SpectralVariant::continuous;
};

SpectralReport spectral_second_order(double c, const Grid1D& grid, const Model& model, double T,
                                     int n_modes, SpectralVariant variant = SpectralVariant::continuous,
                                     int nt = 200);

// Unit-norm Neumann mode n >= 1 sampled on the grid, normalized in the
// objective inner product of the grid.
SpatialField neumann_mode(int n, const Grid1D& grid);

}  // namespace wolbopt
