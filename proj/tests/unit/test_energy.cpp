#include <cmath>
#include <random>

#include "doctest.h"
#include "glb/dynamics.hpp"
#include "glb/energy.hpp"
#include "glb/errors.hpp"
#include "glb/ground_state.hpp"

using namespace glb;

TEST_SUITE_BEGIN("energy");

TEST_CASE("energy of the ground state, D = 4") {
  // E(W) = (1/D) int |W'|^2 r^{D-1} dr = 4/3 (per unit sphere measure)
  const GridPtr g = make_grid(4, 1e-3, 1e3, 4096, Stretch::geometric);
  const RadialField W = bubble(0.0, 1.0, g);
  const EnergyReport rep = energy(W, 0.0, g->r_max);
  CHECK(rep.kinetic == doctest::Approx(8.0 / 3.0).epsilon(2e-4));
  CHECK(rep.potential == doctest::Approx(4.0 / 3.0).epsilon(2e-4));
  CHECK(rep.total == doctest::Approx(4.0 / 3.0).epsilon(5e-4));
  // the global form carries a tail correction and lands closer
  CHECK(nonlinear_energy(W) == doctest::Approx(4.0 / 3.0).epsilon(1e-5));
}

TEST_CASE("windowed energies add up") {
  const GridPtr g = make_grid(4, 1e-3, 1e2, 1024, Stretch::geometric);
  const RadialField W = bubble(0.2, 1.5, g);
  const double full = energy(W, 0.0, g->r_max).total;
  const double split = energy(W, 0.0, 2.0).total + energy(W, 2.0, g->r_max).total;
  CHECK(split == doctest::Approx(full).epsilon(1e-12));
}

TEST_CASE("cutoff endpoints and monotonicity") {
  CHECK(chi_cutoff(0.5) == 1.0);
  CHECK(chi_cutoff(1.0) == 1.0);
  CHECK(chi_cutoff(2.0) == 0.0);
  CHECK(chi_cutoff(3.0) == 0.0);
  CHECK(chi_cutoff(1.5) == doctest::Approx(0.5));
  double prev = 1.0;
  for (double r = 1.0; r <= 2.0; r += 0.01) {
    CHECK(chi_cutoff(r) <= prev + 1e-12);
    prev = chi_cutoff(r);
  }
}

TEST_CASE("balance vanishes for phi = 0 and needs enough snapshots") {
  const GridPtr g = make_grid(4, 1e-3, 50.0, 512, Stretch::geometric);
  FlowState s;
  s.u = bubble(0.0, 1.0, g);
  for (auto& v : s.u.values) v *= 1.05;
  FlowConfig cfg;
  cfg.dt = 1e-3;
  cfg.t_end = 0.01;
  Observers obs;
  obs.cadence = 2;
  obs.snapshot_every = 1;
  const TrajectoryRecord rec = evolve(std::move(s), cfg, obs);
  REQUIRE(rec.snapshots.size() >= 3);

  const BalanceReport zero = localized_energy_balance(rec, PhiSpec::zero(), cfg.z());
  CHECK(zero.lhs == 0.0);
  CHECK(zero.rhs == 0.0);

  TrajectoryRecord tiny = rec;
  tiny.snapshots.resize(2);
  CHECK_THROWS_AS(localized_energy_balance(tiny, PhiSpec::one(), cfg.z()), DiagnosticError);
}

TEST_CASE("global balance closes for phi = 1") {
  const GridPtr g = make_grid(4, 1e-3, 50.0, 1024, Stretch::geometric);
  FlowState s;
  s.u = bubble(0.0, 1.0, g);
  for (auto& v : s.u.values) v *= 1.1;
  FlowConfig cfg;
  cfg.dt = 1e-4;
  cfg.t_end = 0.02;
  cfg.z_phase = 0.3;
  Observers obs;
  obs.cadence = 10;
  obs.snapshot_every = 1;
  const TrajectoryRecord rec = evolve(std::move(s), cfg, obs);
  const BalanceReport rep = localized_energy_balance(rec, PhiSpec::one(), cfg.z());
  CHECK(rep.term3 == 0.0);  // dphi/dr = 0
  CHECK(rep.term5 == 0.0);  // dphi/dt = 0
  double scale = std::abs(rep.lhs);
  for (double t : {rep.term1, rep.term2, rep.term4}) scale = std::max(scale, std::abs(t));
  CHECK(std::abs(rep.residual) < 1e-3 * scale);
}

TEST_CASE("radial Sobolev holds on smooth fields") {
  const GridPtr g = make_grid(4, 1e-3, 20.0, 1024, Stretch::geometric);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> amp(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    RadialField v(g);
    for (int m = 0; m < 4; ++m) {
      const double c = 0.5 + 4.0 * std::abs(amp(rng)), a = amp(rng), b = amp(rng);
      for (int i = 0; i < v.size(); ++i) {
        const double r = g->nodes[i];
        const double env = r * std::exp(-(r - c) * (r - c));
        v.values[i] += cplx{a * env, b * env};
      }
    }
    for (double R : {0.5, 1.0, 3.0}) {
      const auto [lhs, rhs] = radial_sobolev_check(v, R);
      CHECK(lhs <= rhs * (1.0 + 1e-9));
    }
  }
  const RadialField W = bubble(0.0, 1.0, g);
  for (double R : {0.5, 1.0, 2.0}) {
    const auto [lhs, rhs] = radial_sobolev_check(W, R);
    CHECK(lhs <= rhs);
  }
}

TEST_SUITE_END();
