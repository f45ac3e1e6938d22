#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace wolbopt {

using SpatialField = std::vector<double>;

// vertex: nx+1 nodes at i*L/nx, mirrored ghost nodes, trapezoid weights.
// padded: nx unknowns at the interior points of a (nx+2)-point mesh with
//   dx = L/(nx+1), copied ghost nodes; the objective integrates the padded
//   mesh by the trapezoid rule and the budget sums dx * u over unknowns.
enum class GridLayout { vertex, padded };

GridLayout parse_layout(const std::string& name);
std::string layout_name(GridLayout layout);

// Unscaled tridiagonal operator; multiply by 1/dx^2.
struct Stencil {
  std::vector<double> lower;
  std::vector<double> diag;
  std::vector<double> upper;
};

class Grid1D {
 public:
  Grid1D(double L, int nx, GridLayout layout = GridLayout::vertex);

  double L() const { return L_; }
  int nx() const { return nx_; }
  double dx() const { return dx_; }
  std::size_t size() const { return x_.size(); }
  GridLayout layout() const { return layout_; }

  double x(std::size_t i) const { return x_[i]; }
  const std::vector<double>& nodes() const { return x_; }

  std::span<const double> objective_weights() const { return wJ_; }
  std::span<const double> budget_weights() const { return wB_; }

  // Forward Neumann Laplacian and its transpose in the objective inner product.
  const Stencil& laplacian() const { return lap_; }
  const Stencil& adjoint_laplacian() const { return adj_; }

  double integrate(std::span<const double> v) const;            // budget weights
  double integrate_objective(std::span<const double> v) const;  // objective weights
  double budget_measure() const;                                // integral of 1

 private:
  double L_;
  int nx_;
  GridLayout layout_;
  double dx_;
  std::vector<double> x_, wJ_, wB_;
  Stencil lap_, adj_;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<SpatialField> fields;
  double dt = 0.0;

  const SpatialField& initial() const { return fields.front(); }
  const SpatialField& final() const { return fields.back(); }
  std::size_t steps() const { return fields.empty() ? 0 : fields.size() - 1; }
};

SpatialField constant_field(const Grid1D& grid, double value);
SpatialField mirror(const SpatialField& v);

}  // namespace wolbopt
