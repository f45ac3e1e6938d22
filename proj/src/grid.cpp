#include "wolbopt/grid.hpp"

#include <cmath>

#include "wolbopt/errors.hpp"

namespace wolbopt {

GridLayout parse_layout(const std::string& name) {
  if (name == "vertex") return GridLayout::vertex;
  if (name == "padded") return GridLayout::padded;
  throw InputError("unknown grid layout '" + name + "' (expected vertex or padded)");
}

std::string layout_name(GridLayout layout) {
  return layout == GridLayout::vertex ? "vertex" : "padded";
}

Grid1D::Grid1D(double L, int nx, GridLayout layout) : L_(L), nx_(nx), layout_(layout) {
  if (!(std::isfinite(L) && L > 0.0)) throw InputError("grid length L must be positive");
  if (nx < 2) throw InputError("grid needs nx >= 2");

  std::size_t n = 0;
  if (layout == GridLayout::vertex) {
    n = static_cast<std::size_t>(nx) + 1;
    dx_ = L / nx;
    x_.resize(n);
    for (std::size_t i = 0; i < n; ++i) x_[i] = static_cast<double>(i) * dx_;
    x_.back() = L;
    wJ_.assign(n, dx_);
    wJ_.front() = wJ_.back() = 0.5 * dx_;
    wB_ = wJ_;
    lap_.lower.assign(n, 1.0);
    lap_.diag.assign(n, -2.0);
    lap_.upper.assign(n, 1.0);
    lap_.lower[0] = 0.0;
    lap_.upper[0] = 2.0;
    lap_.upper[n - 1] = 0.0;
    lap_.lower[n - 1] = 2.0;
  } else {
    n = static_cast<std::size_t>(nx);
    dx_ = L / (nx + 1);
    x_.resize(n);
    for (std::size_t i = 0; i < n; ++i) x_[i] = static_cast<double>(i + 1) * dx_;
    wJ_.assign(n, dx_);
    wJ_.front() = wJ_.back() = 1.5 * dx_;
    wB_.assign(n, dx_);
    lap_.lower.assign(n, 1.0);
    lap_.diag.assign(n, -2.0);
    lap_.upper.assign(n, 1.0);
    lap_.lower[0] = 0.0;
    lap_.diag[0] = -1.0;
    lap_.upper[n - 1] = 0.0;
    lap_.diag[n - 1] = -1.0;
  }

  // Transpose with respect to <a,b> = sum wJ a b.
  adj_.diag = lap_.diag;
  adj_.lower.assign(n, 0.0);
  adj_.upper.assign(n, 0.0);
  for (std::size_t i = 1; i < n; ++i) adj_.lower[i] = lap_.upper[i - 1] * (wJ_[i - 1] / wJ_[i]);
  for (std::size_t i = 0; i + 1 < n; ++i) adj_.upper[i] = lap_.lower[i + 1] * (wJ_[i + 1] / wJ_[i]);
}

double Grid1D::integrate(std::span<const double> v) const {
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) s += wB_[i] * v[i];
  return s;
}

double Grid1D::integrate_objective(std::span<const double> v) const {
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) s += wJ_[i] * v[i];
  return s;
}

double Grid1D::budget_measure() const {
  double s = 0.0;
  for (double w : wB_) s += w;
  return s;
}

SpatialField constant_field(const Grid1D& grid, double value) {
  return SpatialField(grid.size(), value);
}

SpatialField mirror(const SpatialField& v) { return SpatialField(v.rbegin(), v.rend()); }

}  // namespace wolbopt
