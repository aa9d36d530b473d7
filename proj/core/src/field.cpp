#include "glb/field.hpp"

#include <algorithm>
#include <cmath>

#include "glb/errors.hpp"

namespace glb {

namespace {

void check_same_grid(const RadialField& a, const RadialField& b, const char* who) {
  if (a.grid.get() != b.grid.get() &&
      (a.grid->dimension != b.grid->dimension || a.grid->nodes != b.grid->nodes))
    throw DimensionError(std::string(who) + ": fields live on different grids");
}

}  // namespace

bool RadialField::finite() const {
  for (const auto& v : values)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
  return true;
}

RadialField operator+(const RadialField& a, const RadialField& b) {
  check_same_grid(a, b, "operator+");
  RadialField out = a;
  for (int i = 0; i < out.size(); ++i) out.values[i] += b.values[i];
  return out;
}

RadialField operator-(const RadialField& a, const RadialField& b) {
  check_same_grid(a, b, "operator-");
  RadialField out = a;
  for (int i = 0; i < out.size(); ++i) out.values[i] -= b.values[i];
  return out;
}

RadialField operator*(cplx s, const RadialField& f) {
  RadialField out = f;
  for (auto& v : out.values) v *= s;
  return out;
}

double inner(const RadialField& f, const RadialField& g) {
  check_same_grid(f, g, "inner");
  const auto& w = f.grid->quad_weights;
  double s = 0.0;
  for (int i = 0; i < f.size(); ++i)
    s += w[i] * (std::conj(f.values[i]) * g.values[i]).real();
  return s;
}

double norm_L2(const RadialField& f) {
  const auto& w = f.grid->quad_weights;
  double s = 0.0;
  for (int i = 0; i < f.size(); ++i) s += w[i] * std::norm(f.values[i]);
  return std::sqrt(s);
}

double norm_Linf(const RadialField& f) {
  double m = 0.0;
  for (const auto& v : f.values) m = std::max(m, std::abs(v));
  return m;
}

RadialField d_r(const RadialField& f) {
  const auto& r = f.grid->nodes;
  const int M = f.size();
  if (M < 3) throw DimensionError("d_r: need at least 3 nodes");
  RadialField out(f.grid, f.label);

  auto three_point = [&](int i0, int i1, int i2, double x) {
    // derivative at x of the quadratic through nodes i0,i1,i2
    const double x0 = r[i0], x1 = r[i1], x2 = r[i2];
    const cplx f0 = f.values[i0], f1 = f.values[i1], f2 = f.values[i2];
    const double d0 = (2 * x - x1 - x2) / ((x0 - x1) * (x0 - x2));
    const double d1 = (2 * x - x0 - x2) / ((x1 - x0) * (x1 - x2));
    const double d2 = (2 * x - x0 - x1) / ((x2 - x0) * (x2 - x1));
    return d0 * f0 + d1 * f1 + d2 * f2;
  };

  out.values[0] = three_point(0, 1, 2, r[0]);
  for (int i = 1; i < M - 1; ++i) out.values[i] = three_point(i - 1, i, i + 1, r[i]);
  out.values[M - 1] = three_point(M - 3, M - 2, M - 1, r[M - 1]);
  return out;
}

Tridiag laplacian_matrix(const RadialGrid& g) {
  const int M = g.size();
  const int D = g.dimension;
  const auto& r = g.nodes;
  const auto& x = g.faces;
  const auto& V = g.quad_weights;

  Tridiag A;
  A.lo.assign(M, 0.0);
  A.di.assign(M, 0.0);
  A.up.assign(M, 0.0);

  // interior faces x_1 .. x_{M-1}
  for (int i = 0; i < M - 1; ++i) {
    const double flux = std::pow(x[i + 1], D - 1) / (r[i + 1] - r[i]);
    A.di[i] -= flux / V[i];
    A.up[i] += flux / V[i];
    A.di[i + 1] -= flux / V[i + 1];
    A.lo[i + 1] += flux / V[i + 1];
  }
  // inner face x_0 = 0 carries no flux (even extension).
  // outer face: decay-matched Robin, u'(r_max) = -(D-2) u / r_max, exact on
  // the harmonic tail r^{-(D-2)}.
  A.di[M - 1] -= (D - 2) * std::pow(g.r_max, D - 2) / V[M - 1];
  return A;
}

RadialField laplacian(const RadialField& f) {
  if (f.size() < 3) throw DimensionError("laplacian: need at least 3 nodes");
  RadialField out(f.grid, f.label);
  const Tridiag A = laplacian_matrix(*f.grid);
  out.values = apply(A, f.values);
  return out;
}

std::vector<cplx> apply(const Tridiag& A, const std::vector<cplx>& xv) {
  const int M = A.size();
  std::vector<cplx> y(M);
  for (int i = 0; i < M; ++i) {
    cplx s = A.di[i] * xv[i];
    if (i > 0) s += A.lo[i] * xv[i - 1];
    if (i < M - 1) s += A.up[i] * xv[i + 1];
    y[i] = s;
  }
  return y;
}

std::vector<cplx> solve_shifted(const Tridiag& A, cplx alpha, cplx beta,
                                const std::vector<cplx>& rhs) {
  const int M = A.size();
  std::vector<cplx> c(M), d(M), x(M);
  cplx b0 = alpha + beta * A.di[0];
  c[0] = beta * A.up[0] / b0;
  d[0] = rhs[0] / b0;
  for (int i = 1; i < M; ++i) {
    const cplx lo = beta * A.lo[i];
    const cplx bi = alpha + beta * A.di[i] - lo * c[i - 1];
    c[i] = beta * A.up[i] / bi;
    d[i] = (rhs[i] - lo * d[i - 1]) / bi;
  }
  x[M - 1] = d[M - 1];
  for (int i = M - 2; i >= 0; --i) x[i] = d[i] - c[i] * x[i + 1];
  return x;
}

ScalarField e_tilde(const RadialField& f) {
  const RadialField df = d_r(f);
  ScalarField out(f.grid);
  const auto& r = f.grid->nodes;
  for (int i = 0; i < f.size(); ++i)
    out.values[i] = std::norm(df.values[i]) + std::norm(f.values[i]) / (r[i] * r[i]);
  return out;
}

double quad_window(const RadialGrid& g, const std::vector<double>& density, double r1,
                   double r2) {
  const int D = g.dimension;
  const auto& x = g.faces;
  double s = 0.0;
  for (int i = 0; i < g.size(); ++i) {
    const double a = std::max(x[i], r1);
    const double b = std::min(x[i + 1], r2);
    if (b > a) s += density[i] * (std::pow(b, D) - std::pow(a, D)) / D;
  }
  return s;
}

double norm_E(const RadialField& f, double r1, double r2) {
  if (std::isinf(r2)) r2 = f.grid->r_max;
  if (!(r1 >= 0.0) || !(r1 < r2)) throw ConfigError("norm_E: need 0 <= r1 < r2");
  const ScalarField dens = e_tilde(f);
  return quad_window(*f.grid, dens.values, r1, r2);
}

}  // namespace glb
