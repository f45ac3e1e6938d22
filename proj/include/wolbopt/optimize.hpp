#pragma once

#include <string>
#include <vector>

#include "wolbopt/adjoint.hpp"
#include "wolbopt/errors.hpp"
#include "wolbopt/grid.hpp"
#include "wolbopt/model.hpp"

namespace wolbopt {

struct ReleaseBudget {
  double C = 0.0;
  double M = 0.0;
};

// L2 projection onto {0 <= u <= M, integral(u) <= C} in the budget inner product.
SpatialField project(const SpatialField& v, const ReleaseBudget& budget, const Grid1D& grid);
bool is_feasible(const SpatialField& u, const ReleaseBudget& budget, const Grid1D& grid,
                 double tol = 1e-8);

struct KktResidual {
  SpatialField Lambda;
  double sup_norm = 0.0;
  double slackness = 0.0;
};

// Lambda = min{u, max{u - M, psi + lambda}}, slackness = lambda (integral(u) - C).
KktResidual kkt_residual(const SpatialField& u, double lambda, const SpatialField& psi,
                         const ReleaseBudget& budget, const Grid1D& grid);
KktResidual kkt_residual(const SpatialField& u, double lambda, const ReleaseBudget& budget,
                         const Grid1D& grid, const Model& model, double T, int nt);

// Multiplier that best satisfies the KKT conditions at a feasible u.
double recover_multiplier(const SpatialField& u, const SpatialField& psi,
                          const ReleaseBudget& budget, const Grid1D& grid);

struct HistoryEntry {
  int iteration = 0;
  double J = 0.0;
  double residual = 0.0;
};

// Divergence inside an optimizer, carrying the iteration log up to the failure.
class OptimizationDivergence : public DivergenceError {
 public:
  OptimizationDivergence(const std::string& what, std::vector<HistoryEntry> history)
      : DivergenceError(what), history_(std::move(history)) {}
  const std::vector<HistoryEntry>& history() const { return history_; }

 private:
  std::vector<HistoryEntry> history_;
};

struct OptimResult {
  SpatialField u_star;
  double J_value = 0.0;
  double lambda = 0.0;
  double residual = 0.0;
  double slackness = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<HistoryEntry> history;
  std::string init_label;
  std::string method;
};

struct OptimOptions {
  double tau0 = 1.0;       // initial Armijo trial step
  double rho = 10.0;       // initial dual step / penalty
  double rho_max = 1e6;    // penalty cap
  int max_iter = 5000;     // gradient evaluations
  double tol = 1e-6;       // sup-norm of Lambda
  double armijo = 1e-4;
};

// Method of multipliers: projected-gradient minimization over the box of the
// augmented Lagrangian J + (max(0, lambda + rho g)^2 - lambda^2) / (2 rho),
// g = integral(u) - C, then lambda <- max(0, lambda + rho g). rho grows by 10
// when the budget violation does not shrink by a factor 4. Each outer step is
// certified on project(u) with the recovered multiplier.
OptimResult uzawa(const SpatialField& u_init, const ReleaseBudget& budget, const Grid1D& grid,
                  const Model& model, double T, int nt, const OptimOptions& opts = {},
                  const std::string& label = "uzawa");

// Projected gradient on V_{C,M} with Armijo backtracking; lambda recovered from psi.
OptimResult projected_gradient(const SpatialField& u_init, const ReleaseBudget& budget,
                               const Grid1D& grid, const Model& model, double T, int nt,
                               const OptimOptions& opts = {}, const std::string& label = "pg");

struct LabeledStart {
  std::string label;
  SpatialField u;
};

std::vector<LabeledStart> default_starts(const ReleaseBudget& budget, const Grid1D& grid,
                                         const Model& model);

struct MultistartResult {
  OptimResult best;
  std::vector<OptimResult> all;
};

// Starts run concurrently when parallel is set; the reduction is deterministic
// (smallest J, ties broken by label).
MultistartResult multistart(const ReleaseBudget& budget, const Grid1D& grid, const Model& model,
                            double T, int nt, const std::vector<LabeledStart>& starts,
                            const OptimOptions& opts = {}, bool parallel = true);

bool budget_saturation_check(const OptimResult& result, const ReleaseBudget& budget,
                             const Grid1D& grid);

}  // namespace wolbopt
