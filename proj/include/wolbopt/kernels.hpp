#pragma once

#include <cstddef>

#include "wolbopt/grid.hpp"

// One explicit Euler step of  y' = coef * S y + r(i, y_i)  for a tridiagonal
// stencil S. The serial version is the reference; the OpenMP version computes
// every node with identical arithmetic, so both agree bitwise.
namespace wolbopt::kernels {

inline constexpr std::size_t parallel_threshold = 2048;

struct StencilView {
  const double* lower;
  const double* diag;
  const double* upper;
  std::size_t n;
};

inline StencilView view(const Stencil& s) {
  return {s.lower.data(), s.diag.data(), s.upper.data(), s.diag.size()};
}

template <class Reaction>
inline double node_update(const StencilView& s, double coef, double dt, const double* y,
                          std::size_t i, Reaction& r) {
  double lap = s.diag[i] * y[i];
  if (i > 0) lap = s.lower[i] * y[i - 1] + lap;
  if (i + 1 < s.n) lap = lap + s.upper[i] * y[i + 1];
  return y[i] + dt * (coef * lap + r(i, y[i]));
}

namespace serial {

template <class Reaction>
void euler_step(const StencilView& s, double coef, double dt, const double* y, double* out,
                Reaction r) {
  for (std::size_t i = 0; i < s.n; ++i) out[i] = node_update(s, coef, dt, y, i, r);
}

}  // namespace serial

namespace omp {

template <class Reaction>
void euler_step(const StencilView& s, double coef, double dt, const double* y, double* out,
                Reaction r, std::size_t threshold = parallel_threshold) {
  const auto n = static_cast<long>(s.n);
#pragma omp parallel for schedule(static) if (s.n >= threshold)
  for (long i = 0; i < n; ++i) out[i] = node_update(s, coef, dt, y, static_cast<std::size_t>(i), r);
}

}  // namespace omp

}  // namespace wolbopt::kernels
