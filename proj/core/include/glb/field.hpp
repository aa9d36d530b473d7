#pragma once

#include <complex>
#include <string>
#include <vector>

#include "glb/grid.hpp"

namespace glb {

using cplx = std::complex<double>;

/// Complex-valued radial samples on a shared grid.
struct RadialField {
  GridPtr grid;
  std::vector<cplx> values;
  std::string label;

  RadialField() = default;
  explicit RadialField(GridPtr g, std::string label = "")
      : grid(std::move(g)), values(grid->size(), cplx{0.0, 0.0}), label(std::move(label)) {}

  int size() const { return static_cast<int>(values.size()); }
  bool finite() const;
};

struct ScalarField {
  GridPtr grid;
  std::vector<double> values;

  ScalarField() = default;
  explicit ScalarField(GridPtr g) : grid(std::move(g)), values(grid->size(), 0.0) {}
};

// Pointwise arithmetic; grids must match.
RadialField operator+(const RadialField& a, const RadialField& b);
RadialField operator-(const RadialField& a, const RadialField& b);
RadialField operator*(cplx s, const RadialField& f);

/// <f | g> = Re \int conj(f) g r^{D-1} dr.
double inner(const RadialField& f, const RadialField& g);

double norm_L2(const RadialField& f);
double norm_Linf(const RadialField& f);

/// Second-order first derivative; one-sided three-point stencils at both ends.
RadialField d_r(const RadialField& f);

/// Radial Laplacian d_r^2 + (D-1)/r d_r in conservative flux form.
/// Zero flux at r = 0 (even extension), decay-matched Robin flux
/// u' = -(D-2) u / r at r_max.
RadialField laplacian(const RadialField& f);

/// Localized energy norm squared: \int_{r1}^{r2} (|f'|^2 + |f|^2/r^2) r^{D-1} dr.
/// r2 = infinity is clamped to r_max.  Additive over adjacent windows.
double norm_E(const RadialField& f, double r1, double r2);

/// Modified energy density |f'|^2 + |f|^2/r^2 sampled on the nodes.
ScalarField e_tilde(const RadialField& f);

/// Quadrature of a nodewise density restricted to [r1, r2]; cells straddling
/// the window edges contribute their clipped volume.
double quad_window(const RadialGrid& g, const std::vector<double>& density, double r1, double r2);

/// Tridiagonal matrix acting on nodal values (sub/diag/super).
struct Tridiag {
  std::vector<double> lo, di, up;  // lo[0] and up[M-1] unused
  int size() const { return static_cast<int>(di.size()); }
};

/// The discrete Laplacian as a tridiagonal matrix, self-adjoint with
/// respect to the grid quadrature weights.
Tridiag laplacian_matrix(const RadialGrid& g);

std::vector<cplx> apply(const Tridiag& A, const std::vector<cplx>& x);

/// Solves (alpha I + beta A) x = rhs by the Thomas algorithm.
std::vector<cplx> solve_shifted(const Tridiag& A, cplx alpha, cplx beta,
                                const std::vector<cplx>& rhs);

}  // namespace glb
