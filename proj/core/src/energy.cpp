#include "glb/energy.hpp"

#include <algorithm>
#include <cmath>

#include "glb/errors.hpp"

namespace glb {

EnergyReport energy(const RadialField& u, double r1, double r2) {
  if (std::isinf(r2)) r2 = u.grid->r_max;
  if (!(r1 >= 0.0) || !(r1 < r2)) throw ConfigError("energy: need 0 <= r1 < r2");
  const int D = u.grid->dimension;
  const double two_star = 2.0 * D / (D - 2);
  const RadialField du = d_r(u);

  std::vector<double> kin(u.size()), pot(u.size());
  for (int i = 0; i < u.size(); ++i) {
    kin[i] = 0.5 * std::norm(du.values[i]);
    pot[i] = std::pow(std::abs(u.values[i]), two_star) / two_star;
  }
  EnergyReport rep;
  rep.kinetic = quad_window(*u.grid, kin, r1, r2);
  rep.potential = quad_window(*u.grid, pot, r1, r2);
  rep.total = rep.kinetic - rep.potential;
  rep.r1 = r1;
  rep.r2 = r2;
  return rep;
}

double nonlinear_energy(const RadialField& u) {
  // The kinetic part goes through the Dirichlet form of the evolution
  // operator, so the dissipation ledger closes against this energy with no
  // spatial floor.  The Robin contribution equals the tail kinetic energy
  // of a decay-matched field, which also sharpens the truncation.
  const Tridiag A = laplacian_matrix(*u.grid);
  RadialField Au(u.grid);
  Au.values = apply(A, u.values);
  const double kinetic = -0.5 * inner(u, Au);

  const int D = u.grid->dimension;
  const double two_star = 2.0 * D / (D - 2);
  std::vector<double> pot(u.size());
  for (int i = 0; i < u.size(); ++i)
    pot[i] = std::pow(std::abs(u.values[i]), two_star) / two_star;
  return kinetic - quad(*u.grid, pot);
}

double chi_cutoff(double r) {
  if (r <= 1.0) return 1.0;
  if (r >= 2.0) return 0.0;
  const double x = r - 1.0;
  return 1.0 - x * x * x * (10.0 + x * (-15.0 + 6.0 * x));
}

PhiSpec PhiSpec::one() {
  return {[](double, double) { return 1.0; }, "one"};
}
PhiSpec PhiSpec::zero() {
  return {[](double, double) { return 0.0; }, "zero"};
}
PhiSpec PhiSpec::one_minus_chi(double R) {
  return {[R](double, double r) { return 1.0 - chi_cutoff(r / R); },
          "one_minus_chi(R=" + std::to_string(R) + ")"};
}

namespace {

double phi_dr(const PhiSpec& p, double t, double r) {
  const double h = 1e-6 * (std::abs(r) + 1.0);
  return (p.phi(t, r + h) - p.phi(t, r - h)) / (2.0 * h);
}

double phi_dt(const PhiSpec& p, double t, double r) {
  const double h = 1e-6 * (std::abs(t) + 1.0);
  return (p.phi(t + h, r) - p.phi(t - h, r)) / (2.0 * h);
}

}  // namespace

BalanceReport localized_energy_balance(const TrajectoryRecord& traj, const PhiSpec& phi,
                                       cplx z) {
  const auto& snaps = traj.snapshots;
  if (snaps.size() < 3)
    throw DiagnosticError("localized_energy_balance: need at least 3 snapshots");
  const GridPtr grid = snaps.front().u.grid;
  const int M = grid->size();
  const int D = grid->dimension;
  const double pm1 = 4.0 / (D - 2);
  const auto& r = grid->nodes;
  const int S = static_cast<int>(snaps.size());

  BalanceReport rep;
  rep.phi_spec = phi.label;
  rep.t1 = snaps.front().t;
  rep.t2 = snaps.back().t;

  // weighted e~ at the endpoints
  auto weighted_e = [&](const TrajectoryRecord::Snapshot& s) {
    ScalarField dens = e_tilde(s.u);
    for (int i = 0; i < M; ++i) {
      const double p = phi.phi(s.t, r[i]);
      dens.values[i] *= p * p;
    }
    return quad(*grid, dens.values);
  };
  rep.lhs = weighted_e(snaps.back()) - weighted_e(snaps.front());

  // per-snapshot spatial integrands of the five time integrals
  std::vector<double> I1(S), I2(S), I3(S), I4(S), I5(S);
  for (int k = 0; k < S; ++k) {
    const double t = snaps[k].t;
    const RadialField& u = snaps[k].u;
    // centered du/dt from neighbouring snapshots, one-sided at the ends
    const int ka = std::max(0, k - 1), kb = std::min(S - 1, k + 1);
    const double dt = snaps[kb].t - snaps[ka].t;
    RadialField ut(grid);
    for (int i = 0; i < M; ++i)
      ut.values[i] = (snaps[kb].u.values[i] - snaps[ka].u.values[i]) / dt;
    const RadialField ur = d_r(u);

    double s1 = 0, s2 = 0, s3 = 0, s4 = 0, s5 = 0;
    for (int i = 0; i < M; ++i) {
      const double w = grid->quad_weights[i];
      const double p = phi.phi(t, r[i]);
      const double pr = phi_dr(phi, t, r[i]);
      const double pt = phi_dt(phi, t, r[i]);
      const cplx uv = u.values[i], utv = ut.values[i];
      const double a = std::abs(uv);
      s1 += w * std::norm(utv) * p * p;
      s2 += w * (std::pow(a, pm1) * uv * std::conj(utv)).real() * p * p;
      s3 += w * (ur.values[i] * std::conj(utv)).real() * p * pr;
      s4 += w * (uv * std::conj(utv)).real() / (r[i] * r[i]) * p * p;
      s5 += w * (std::norm(ur.values[i]) + std::norm(uv) / (r[i] * r[i])) * p * pt;
    }
    I1[k] = -2.0 * z.real() * s1;
    I2[k] = 2.0 * s2;
    I3[k] = -4.0 * s3;
    I4[k] = 2.0 * s4;
    I5[k] = 2.0 * s5;
  }

  auto time_trapz = [&](const std::vector<double>& I) {
    double s = 0.0;
    for (int k = 0; k + 1 < S; ++k)
      s += 0.5 * (I[k] + I[k + 1]) * (snaps[k + 1].t - snaps[k].t);
    return s;
  };
  rep.term1 = time_trapz(I1);
  rep.term2 = time_trapz(I2);
  rep.term3 = time_trapz(I3);
  rep.term4 = time_trapz(I4);
  rep.term5 = time_trapz(I5);
  rep.rhs = rep.term1 + rep.term2 + rep.term3 + rep.term4 + rep.term5;
  rep.residual = rep.lhs - rep.rhs;
  return rep;
}

namespace {

// Fritsch-Carlson monotone cubic interpolation of |v| samples.
double monotone_cubic_abs(const RadialField& v, double R) {
  const auto& r = v.grid->nodes;
  const int M = v.size();
  int i = static_cast<int>(std::lower_bound(r.begin(), r.end(), R) - r.begin());
  if (i <= 0) return std::abs(v.values.front());
  if (i >= M) return std::abs(v.values.back());
  const int i0 = i - 1;
  const double h = r[i] - r[i0];
  const double y0 = std::abs(v.values[i0]), y1 = std::abs(v.values[i]);
  const double d = (y1 - y0) / h;
  auto slope_at = [&](int j) {
    if (j <= 0 || j >= M - 1) return d;
    const double hm = r[j] - r[j - 1], hp = r[j + 1] - r[j];
    const double dm = (std::abs(v.values[j]) - std::abs(v.values[j - 1])) / hm;
    const double dp = (std::abs(v.values[j + 1]) - std::abs(v.values[j])) / hp;
    if (dm * dp <= 0.0) return 0.0;
    return 2.0 * dm * dp / (dm + dp);  // harmonic mean keeps monotonicity
  };
  double m0 = slope_at(i0), m1 = slope_at(i);
  if (d == 0.0) m0 = m1 = 0.0;
  const double s = (R - r[i0]) / h;
  const double s2 = s * s, s3 = s2 * s;
  return (2 * s3 - 3 * s2 + 1) * y0 + (s3 - 2 * s2 + s) * h * m0 +
         (-2 * s3 + 3 * s2) * y1 + (s3 - s2) * h * m1;
}

}  // namespace

std::pair<double, double> radial_sobolev_check(const RadialField& v, double R) {
  if (!(R > v.grid->r_min() && R < v.grid->r_max))
    throw ConfigError("radial_sobolev_check: R outside grid interior");
  const int D = v.grid->dimension;
  const double lhs = monotone_cubic_abs(v, R);
  const double rhs =
      std::sqrt(2.0) * std::pow(R, -0.5 * (D - 2)) * std::sqrt(norm_E(v, R, v.grid->r_max));
  return {lhs, rhs};
}

std::pair<double, double> coercivity_probe(const RadialField& v, double R) {
  return {energy(v, R, v.grid->r_max).total, norm_E(v, R, v.grid->r_max)};
}

}  // namespace glb
