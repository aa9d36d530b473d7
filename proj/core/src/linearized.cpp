#include "glb/linearized.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>

#include "glb/dynamics.hpp"
#include "glb/errors.hpp"

namespace glb {

namespace {

// potential values V^{+/-} at scale lambda
std::vector<double> potential(LSign sign, const RadialGrid& g, double lambda) {
  const int D = g.dimension;
  const double p = static_cast<double>(D + 2) / (D - 2);
  std::vector<double> V(g.size());
  for (int i = 0; i < g.size(); ++i) {
    const double Wp = std::pow(w_profile(D, g.nodes[i] / lambda), p - 1.0);
    V[i] = -(sign == LSign::plus ? p : 1.0) * Wp / (lambda * lambda);
  }
  return V;
}

// Symmetrized tridiagonal of -Lap + V in L^2(r^{D-1}dr):
// S = Dw^{1/2} (-A + V) Dw^{-1/2}, symmetric because w_i A_{i,i+1} = w_{i+1} A_{i+1,i}.
struct SymTridiag {
  std::vector<double> diag, off;  // off has size M-1
};

SymTridiag sym_operator(const RadialGrid& g, const std::vector<double>& V) {
  const Tridiag A = laplacian_matrix(g);
  const auto& w = g.quad_weights;
  const int M = g.size();
  SymTridiag S;
  S.diag.resize(M);
  S.off.resize(M - 1);
  for (int i = 0; i < M; ++i) S.diag[i] = -A.di[i] + V[i];
  for (int i = 0; i < M - 1; ++i) S.off[i] = -A.up[i] * std::sqrt(w[i] / w[i + 1]);
  return S;
}

void fix_sign(RadialField& y) {
  // deterministic sign: positive value at the innermost node (fall back to
  // the largest-magnitude sample)
  double v = y.values[0].real();
  if (std::abs(v) < 1e-14) {
    double best = 0.0;
    for (const auto& c : y.values)
      if (std::abs(c.real()) > std::abs(best)) best = c.real();
    v = best;
  }
  if (v < 0)
    for (auto& c : y.values) c = -c;
}

}  // namespace

RadialField apply_L(LSign sign, const RadialField& g, double lambda) {
  const std::vector<double> V = potential(sign, *g.grid, lambda);
  RadialField out = laplacian(g);
  for (int i = 0; i < g.size(); ++i)
    out.values[i] = -out.values[i] + V[i] * g.values[i];
  return out;
}

RadialField apply_L_script(const RadialField& g, const BubbleParams& params, cplx z) {
  const RadialField W = multi_bubble(params, g.grid);
  RadialField out = laplacian(g);
  const RadialField fp = f_prime(W, g);
  for (int i = 0; i < g.size(); ++i) out.values[i] = z * (out.values[i] + fp.values[i]);
  return out;
}

std::vector<SpectralResult> eigen_ground(LSign sign, int k, const GridPtr& grid) {
  if (k < 1) throw ConfigError("eigen_ground: need k >= 1");
  const int M = grid->size();
  const std::vector<double> V = potential(sign, *grid, 1.0);
  SymTridiag S = sym_operator(*grid, V);

  std::vector<double> evals(M);
  std::vector<double> evecs(static_cast<size_t>(M) * k);
  std::vector<lapack_int> isuppz(2 * std::max(1, k));
  lapack_int m_found = 0;
  const lapack_int info = LAPACKE_dstevr(
      LAPACK_COL_MAJOR, 'V', 'I', M, S.diag.data(), S.off.data(), 0.0, 0.0, 1, k,
      0.0, &m_found, evals.data(), evecs.data(), M, isuppz.data());
  if (info != 0 || m_found < k)
    throw SpectralError("eigen_ground: dstevr failed, info=" + std::to_string(info), 0.0);

  const auto& w = grid->quad_weights;
  std::vector<SpectralResult> out(k);
  for (int j = 0; j < k; ++j) {
    SpectralResult res;
    res.eigenvalue = evals[j];
    res.eigenfunction = RadialField(grid, sign == LSign::plus ? "L+ mode" : "L- mode");
    for (int i = 0; i < M; ++i)
      res.eigenfunction.values[i] = evecs[static_cast<size_t>(j) * M + i] / std::sqrt(w[i]);
    fix_sign(res.eigenfunction);
    // renormalize in the quadrature norm (unit up to rounding already)
    const double n = norm_L2(res.eigenfunction);
    for (auto& c : res.eigenfunction.values) c /= n;
    RadialField Ly = apply_L(sign, res.eigenfunction, 1.0);
    for (int i = 0; i < M; ++i) Ly.values[i] -= res.eigenvalue * res.eigenfunction.values[i];
    res.residual = norm_L2(Ly);
    out[j] = std::move(res);
  }
  return out;
}

Y1Y2Result solve_Y1Y2(const GridPtr& grid) {
  const int M = grid->size();
  const int D = grid->dimension;
  Y1Y2Result res;
  res.exploratory = D < 5;

  const SymTridiag Sp = sym_operator(*grid, potential(LSign::plus, *grid, 1.0));
  const SymTridiag Sm = sym_operator(*grid, potential(LSign::minus, *grid, 1.0));
  const auto& w = grid->quad_weights;

  // kernel directions in symmetrized coordinates
  std::vector<double> kw(M), klw(M);
  double nw = 0, nlw = 0;
  for (int i = 0; i < M; ++i) {
    const double sq = std::sqrt(w[i]);
    kw[i] = sq * w_profile(D, grid->nodes[i]);
    klw[i] = sq * lambda_w_profile(D, grid->nodes[i]);
    nw += kw[i] * kw[i];
    nlw += klw[i] * klw[i];
  }
  for (int i = 0; i < M; ++i) {
    kw[i] /= std::sqrt(nw);
    klw[i] /= std::sqrt(nlw);
  }
  // pairing the coupled system with the kernels forces Y1 perp W and
  // Y2 perp LambdaW (and nothing more), so each factor gets its own
  // single-direction projection
  auto project_dir = [&](std::vector<double>& v, const std::vector<double>& k) {
    double a = 0;
    for (int i = 0; i < M; ++i) a += k[i] * v[i];
    for (int i = 0; i < M; ++i) v[i] -= a * k[i];
  };
  auto tri_apply = [&](const SymTridiag& S, const std::vector<double>& x) {
    std::vector<double> y(M);
    for (int i = 0; i < M; ++i) {
      double s = S.diag[i] * x[i];
      if (i > 0) s += S.off[i - 1] * x[i - 1];
      if (i < M - 1) s += S.off[i] * x[i + 1];
      y[i] = s;
    }
    return y;
  };

  // dense C = Q_W Sm Q_{LambdaW} Sp Q_W, column by column
  std::vector<double> C(static_cast<size_t>(M) * M);
  std::vector<double> col(M);
  for (int j = 0; j < M; ++j) {
    std::fill(col.begin(), col.end(), 0.0);
    col[j] = 1.0;
    project_dir(col, kw);
    col = tri_apply(Sp, col);
    project_dir(col, klw);
    col = tri_apply(Sm, col);
    project_dir(col, kw);
    for (int i = 0; i < M; ++i) C[static_cast<size_t>(j) * M + i] = col[i];
  }

  std::vector<double> wr(M), wi(M), vr(static_cast<size_t>(M) * M);
  const lapack_int info = LAPACKE_dgeev(LAPACK_COL_MAJOR, 'N', 'V', M, C.data(), M,
                                        wr.data(), wi.data(), nullptr, 1, vr.data(), M);
  if (info != 0)
    throw SpectralError("solve_Y1Y2: dgeev failed, info=" + std::to_string(info), 0.0);

  int best = -1;
  for (int j = 0; j < M; ++j) {
    if (wr[j] < -1e-10 && std::abs(wi[j]) < 1e-8 * std::max(1.0, std::abs(wr[j]))) {
      if (best < 0 || wr[j] < wr[best]) best = j;
    }
  }
  if (best < 0) return res;  // reported as absent, not an error

  res.found = true;
  res.nu = std::sqrt(-wr[best]);
  res.Y1 = RadialField(grid, "Y1");
  for (int i = 0; i < M; ++i)
    res.Y1.values[i] = vr[static_cast<size_t>(best) * M + i] / std::sqrt(w[i]);
  fix_sign(res.Y1);
  const double n1 = norm_L2(res.Y1);
  for (auto& c : res.Y1.values) c /= n1;

  RadialField LpY1 = apply_L(LSign::plus, res.Y1, 1.0);
  // drop the (approximate-kernel) LambdaW component, matching the projected
  // product above
  {
    double a = 0, n2 = 0;
    for (int i = 0; i < M; ++i) {
      const double lw = lambda_w_profile(D, grid->nodes[i]);
      a += w[i] * lw * LpY1.values[i].real();
      n2 += w[i] * lw * lw;
    }
    for (int i = 0; i < M; ++i)
      LpY1.values[i] -= (a / n2) * lambda_w_profile(D, grid->nodes[i]);
  }
  res.Y2 = RadialField(grid, "Y2");
  for (int i = 0; i < M; ++i) res.Y2.values[i] = -LpY1.values[i] / res.nu;

  RadialField r1 = LpY1;
  for (int i = 0; i < M; ++i) r1.values[i] += res.nu * res.Y2.values[i];
  res.residual1 = norm_L2(r1);
  RadialField r2 = apply_L(LSign::minus, res.Y2, 1.0);
  for (int i = 0; i < M; ++i) r2.values[i] -= res.nu * res.Y1.values[i];
  res.residual2 = norm_L2(r2);
  return res;
}

double BumpSpec::eval(double r) const {
  if (r <= rho1 || r >= rho2) return 0.0;
  const double s = (2.0 * r - (rho1 + rho2)) / (rho2 - rho1);
  const double q = 1.0 - s * s;
  return q * q * q * q;
}

double BumpSpec::eval_deriv(double r) const {
  if (r <= rho1 || r >= rho2) return 0.0;
  const double s = (2.0 * r - (rho1 + rho2)) / (rho2 - rho1);
  const double q = 1.0 - s * s;
  return 4.0 * q * q * q * (-2.0 * s) * 2.0 / (rho2 - rho1);
}

double TestProfiles::z1_at(double r) const {
  return bump_main.eval(r) - mix_coeff * bump_aux.eval(r);
}
double TestProfiles::z2_at(double r) const { return bump_main.eval(r); }

double TestProfiles::lambda_z1_at(double r) const {
  const double dz = bump_main.eval_deriv(r) - mix_coeff * bump_aux.eval_deriv(r);
  return r * dz + 0.5 * (dimension - 2) * z1_at(r);
}
double TestProfiles::lambda_z2_at(double r) const {
  return r * bump_main.eval_deriv(r) + 0.5 * (dimension - 2) * z2_at(r);
}

RadialField TestProfiles::z1_scaled(double lambda, const GridPtr& grid) const {
  RadialField out(grid, "Z1");
  const double amp = std::pow(lambda, -0.5 * (dimension - 2));
  for (int i = 0; i < out.size(); ++i)
    out.values[i] = amp * z1_at(grid->nodes[i] / lambda);
  return out;
}

RadialField TestProfiles::z2_scaled(double lambda, const GridPtr& grid) const {
  RadialField out(grid, "Z2");
  const double amp = std::pow(lambda, -0.5 * (dimension - 2));
  for (int i = 0; i < out.size(); ++i)
    out.values[i] = amp * z2_at(grid->nodes[i] / lambda);
  return out;
}

TestProfiles build_test_profiles(const GridPtr& grid) {
  const int D = grid->dimension;
  const double rstar = std::sqrt(static_cast<double>(D) * (D - 2));
  const auto Y = eigen_ground(LSign::plus, 1, grid)[0].eigenfunction;

  RadialField LW(grid, "LambdaW"), W(grid, "W");
  for (int i = 0; i < grid->size(); ++i) {
    LW.values[i] = lambda_w_profile(D, grid->nodes[i]);
    W.values[i] = w_profile(D, grid->nodes[i]);
  }

  // LambdaW changes sign at rstar: the main bump sits inside where it is
  // positive, the auxiliary bump outside where it is negative, so the mix
  // can only increase <Z1 | LambdaW>.
  const double shifts[] = {1.0, 0.85, 1.15, 0.7};
  std::string last_fail;
  for (double s : shifts) {
    TestProfiles tp;
    tp.dimension = D;
    tp.bump_main = {0.25 * rstar * s, 0.85 * rstar * s};
    tp.bump_aux = {1.25 * rstar * s, 2.2 * rstar * s};

    RadialField b(grid), baux(grid);
    for (int i = 0; i < grid->size(); ++i) {
      b.values[i] = tp.bump_main.eval(grid->nodes[i]);
      baux.values[i] = tp.bump_aux.eval(grid->nodes[i]);
    }
    const double bY = inner(b, Y);
    const double bauxY = inner(baux, Y);
    if (std::abs(bauxY) < 1e-14) {
      last_fail = "auxiliary bump orthogonal to Y";
      continue;
    }
    tp.mix_coeff = bY / bauxY;

    RadialField Z1 = b;
    for (int i = 0; i < grid->size(); ++i)
      Z1.values[i] -= tp.mix_coeff * baux.values[i];
    tp.Z1 = Z1;
    tp.Z2 = b;
    tp.rho1 = std::min(tp.bump_main.rho1, tp.bump_aux.rho1);
    tp.rho2 = std::max(tp.bump_main.rho2, tp.bump_aux.rho2);

    tp.pair_Z1_LambdaW = inner(Z1, LW);
    tp.pair_Z1_Y = inner(Z1, Y);
    tp.pair_Z2_W = inner(b, W);

    if (tp.pair_Z1_LambdaW > 0.0 && std::abs(tp.pair_Z1_Y) < 1e-8 && tp.pair_Z2_W > 0.0)
      return tp;
    last_fail = "certificates: <Z1|LW>=" + std::to_string(tp.pair_Z1_LambdaW) +
                " <Z1|Y>=" + std::to_string(tp.pair_Z1_Y) +
                " <Z2|W>=" + std::to_string(tp.pair_Z2_W);
  }
  throw SpectralError("build_test_profiles: " + last_fail, 0.0);
}

}  // namespace glb
