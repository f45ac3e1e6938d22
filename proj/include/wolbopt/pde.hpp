#pragma once

#include <cstddef>
#include <vector>

#include "wolbopt/grid.hpp"
#include "wolbopt/model.hpp"

namespace wolbopt {

struct CflReport {
  bool passed = false;
  double ratio = 0.0;   // 2 D dt / dx^2
  double margin = 0.0;  // 1 - ratio
};

CflReport cfl_check(const Grid1D& grid, double dt, const ModelParams& params);
// Throws ConfigurationError when the CFL condition fails.
void require_cfl(const Grid1D& grid, double T, int nt, const ModelParams& params);

// Explicit Euler for p' = D Lap p + f(p) starting at p(0+) = G^-1(u0).
Trajectory solve_forward(const SpatialField& u0, const Grid1D& grid, const Model& model, double T,
                         int nt);
// Same scheme from a given initial proportion.
Trajectory solve_forward_from(const SpatialField& p0, const Grid1D& grid, const Model& model,
                              double T, int nt);
// Reference implementation using the serial kernel only.
Trajectory solve_forward_serial(const SpatialField& p0, const Grid1D& grid, const Model& model,
                                double T, int nt);

double objective_JT(const Trajectory& traj, const Grid1D& grid);
double objective_JT(const SpatialField& pT, const Grid1D& grid);
// Convenience: J_T(u0) with a forward solve.
double evaluate_JT(const SpatialField& u0, const Grid1D& grid, const Model& model, double T, int nt);

struct FullModelState {
  SpatialField n_in;
  SpatialField n_un;
  double epsilon = 0.0;
};

// Release rate per outer time step; a single field means constant in time.
struct ControlSchedule {
  std::vector<SpatialField> fields;

  static ControlSchedule constant(SpatialField u);
  const SpatialField& at(std::size_t step) const;
};

struct FullModelResult {
  Trajectory n_in;
  Trajectory n_un;
  std::size_t reaction_substeps = 1;
  std::size_t floored_values = 0;

  FullModelState final_state(double epsilon) const;
};

double infected_equilibrium(double epsilon, const ModelParams& params);
double uninfected_equilibrium(double epsilon, const ModelParams& params);

// Lie splitting: diffusion with explicit Euler on the outer step, reaction
// sub-stepped so that h F_un / eps <= 0.2; negative densities floored at 0.
FullModelResult solve_full_model(const ControlSchedule& u, const FullModelState& init,
                                 const Grid1D& grid, const ModelParams& params, double T, int nt);

double objective_JTeps(const FullModelState& final_state, const Grid1D& grid,
                       const ModelParams& params);

// Reduced equation with a time-distributed source: p' = D Lap p + f(p) + u g(p).
Trajectory solve_reduced_with_source(const SpatialField& p_init, const SpatialField& u,
                                     const Grid1D& grid, const Model& model, double T, int nt);

// n_in = K p_init, n_un = K (1 - p_init).
FullModelState well_prepared_state(const SpatialField& p_init, double epsilon,
                                   const ModelParams& params);

// well_prepared: n_in = K p_init, n_un = K (1 - p_init).
// wolbachia_free: n_in = 0, n_un = K (1 - eps d_un / F_un), reduced p_init = 0.
enum class AsymptoticInit { well_prepared, wolbachia_free };

struct AsymptoticRow {
  double epsilon = 0.0;
  double p_error_L2 = 0.0;
  double J_error = 0.0;
  double J_eps = 0.0;
  double J_limit = 0.0;
  std::size_t substeps = 0;
  std::size_t floored_values = 0;
};

std::vector<AsymptoticRow> asymptotic_sweep(const std::vector<double>& eps_list,
                                            const SpatialField& u, const SpatialField& p_init,
                                            const Grid1D& grid, const Model& model, double T,
                                            int nt,
                                            AsymptoticInit init = AsymptoticInit::well_prepared);

}  // namespace wolbopt
