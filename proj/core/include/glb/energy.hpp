#pragma once

#include <functional>
#include <string>

#include "glb/field.hpp"
#include "glb/record.hpp"

namespace glb {

/// Localized nonlinear energy split into its two parts,
/// E = 1/2 int |u'|^2 - 1/2* int |u|^{2*} over the window.
struct EnergyReport {
  double kinetic = 0.0;
  double potential = 0.0;
  double total = 0.0;
  double r1 = 0.0, r2 = 0.0;
};

EnergyReport energy(const RadialField& u, double r1, double r2);

/// Global nonlinear energy E(u).
double nonlinear_energy(const RadialField& u);

/// Smooth cutoff: 1 for r <= 1, 0 for r >= 2 (quintic transition).
double chi_cutoff(double r);

/// Space-time weight phi(t, r) plus a label for reports.
struct PhiSpec {
  std::function<double(double t, double r)> phi;
  std::string label;

  static PhiSpec one();
  static PhiSpec zero();
  static PhiSpec one_minus_chi(double R);  // phi = 1 - chi(r/R)
};

/// Both sides of the five-term localized energy identity evaluated on the
/// stored snapshots (trapezoid in time, centered differences for du/dt).
struct BalanceReport {
  double term1 = 0.0;  // -2 Re z  int |du/dt|^2 phi^2
  double term2 = 0.0;  // +2 Re    int |u|^{p-1} u conj(du/dt) phi^2
  double term3 = 0.0;  // -4 Re    int du/dr conj(du/dt) phi dphi/dr
  double term4 = 0.0;  // +2 Re    int u conj(du/dt) / r^2 phi^2
  double term5 = 0.0;  // +2       int e~(u) phi dphi/dt
  double lhs = 0.0;    // weighted-energy difference between endpoints
  double rhs = 0.0;
  double residual = 0.0;
  std::string phi_spec;
  double t1 = 0.0, t2 = 0.0;
};

BalanceReport localized_energy_balance(const TrajectoryRecord& traj, const PhiSpec& phi,
                                       cplx z);

/// Radial Sobolev embedding probe: returns (|v(R)|, sqrt(2) R^{-(D-2)/2} ||v||_{E(R)}).
/// |v(R)| is monotone-cubic interpolated when R is not a node.
std::pair<double, double> radial_sobolev_check(const RadialField& v, double R);

/// Tail energy pair (E(v; R, inf), ||v||^2_{E(R)}) for empirical coercivity
/// ratio studies; no pass/fail attached.
std::pair<double, double> coercivity_probe(const RadialField& v, double R);

}  // namespace glb
