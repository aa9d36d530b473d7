#include "glb/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "glb/energy.hpp"
#include "glb/errors.hpp"

namespace glb {

void FlowConfig::validate() const {
  const double half_pi = std::acos(0.0);
  if (!(z_phase > -half_pi && z_phase < half_pi))
    throw ConfigError("FlowConfig: arg z must lie in (-pi/2, pi/2)");
  if (!(dt > 0.0)) throw ConfigError("FlowConfig: dt must be positive");
  if (!(dt_safety > 0.0 && dt_safety <= 1.0))
    throw ConfigError("FlowConfig: dt_safety must lie in (0,1]");
}

RadialField f_nl(const RadialField& u) {
  const double q = 4.0 / (u.grid->dimension - 2);
  RadialField out(u.grid, u.label);
  for (int i = 0; i < u.size(); ++i) {
    const double a = std::abs(u.values[i]);
    out.values[i] = (a == 0.0) ? cplx{0.0, 0.0} : std::pow(a, q) * u.values[i];
  }
  return out;
}

RadialField f_prime(const RadialField& u, const RadialField& g) {
  const double q = 4.0 / (u.grid->dimension - 2);
  RadialField out(u.grid, g.label);
  for (int i = 0; i < u.size(); ++i) {
    const cplx uv = u.values[i];
    const double a = std::abs(uv);
    if (a == 0.0) {
      out.values[i] = 0.0;
      continue;
    }
    const cplx gv = g.values[i];
    out.values[i] = std::pow(a, q) * (gv + q * uv * (std::conj(uv) * gv).real() / (a * a));
  }
  return out;
}

RadialField tension(const RadialField& u) {
  RadialField out = laplacian(u);
  const RadialField nl = f_nl(u);
  for (int i = 0; i < u.size(); ++i) out.values[i] += nl.values[i];
  return out;
}

FlowState step(const FlowState& state, const FlowConfig& cfg) {
  cfg.validate();
  if (!state.u.finite())
    throw BlowupError("step: non-finite state", state);

  const cplx z = cfg.z();
  const double dt = cfg.dt;
  const Tridiag A = laplacian_matrix(*state.u.grid);
  const int M = state.u.size();

  std::vector<cplx> nl(M, cplx{0.0, 0.0});
  if (cfg.nonlinearity) nl = f_nl(state.u).values;

  std::vector<cplx> rhs(M);
  cplx alpha, beta;

  const bool have_ab2 = cfg.scheme == Scheme::imex_cn_ab2 && state.prev_nl &&
                        state.prev_dt == dt;
  if (cfg.scheme == Scheme::imex_cn_ab2 && have_ab2) {
    // Crank-Nicolson on z Lap, AB2 on the nonlinearity.
    const std::vector<cplx> Au = apply(A, state.u.values);
    for (int i = 0; i < M; ++i)
      rhs[i] = state.u.values[i] + 0.5 * dt * z * Au[i] +
               dt * z * (1.5 * nl[i] - 0.5 * (*state.prev_nl)[i]);
    alpha = 1.0;
    beta = -0.5 * dt * z;
  } else {
    // Backward-Euler / forward-Euler bootstrap (also the imex_be_fe scheme).
    for (int i = 0; i < M; ++i) rhs[i] = state.u.values[i] + dt * z * nl[i];
    alpha = 1.0;
    beta = -dt * z;
  }

  FlowState next;
  next.u = RadialField(state.u.grid, state.u.label);
  next.u.values = solve_shifted(A, alpha, beta, rhs);
  next.t = state.t + dt;
  next.step_count = state.step_count + 1;

  double diff2 = 0.0;
  const auto& w = state.u.grid->quad_weights;
  for (int i = 0; i < M; ++i) diff2 += w[i] * std::norm(next.u.values[i] - state.u.values[i]);
  next.dissipation_accum = state.dissipation_accum + diff2 / dt;

  if (!next.u.finite()) {
    FlowState last = state;
    last.prev_nl.reset();
    throw BlowupError("step: non-finite values produced", last);
  }
  next.prev_nl = std::move(nl);
  next.prev_dt = dt;
  return next;
}

double min_indicator_scale(const RadialField& u, double threshold) {
  const int D = u.grid->dimension;
  const auto& r = u.grid->nodes;
  const int M = u.size();
  std::vector<double> ind(M);
  for (int i = 0; i < M; ++i)
    ind[i] = std::pow(r[i], 0.5 * (D - 2)) * std::abs(u.values[i]);
  // indicator of a pure bubble peaks at r = lambda sqrt(D(D-2)) with value
  // (rstar/2)^{(D-2)/2}
  const double rstar = std::sqrt(static_cast<double>(D) * (D - 2));
  const double peak = std::pow(0.5 * rstar, 0.5 * (D - 2));
  double best = std::numeric_limits<double>::infinity();
  for (int i = 1; i + 1 < M; ++i) {
    if (ind[i] >= ind[i - 1] && ind[i] > ind[i + 1] && ind[i] > threshold * peak)
      best = std::min(best, r[i] / rstar);
  }
  return best;
}

TrajectoryRecord evolve(FlowState state, const FlowConfig& cfg0, const Observers& obs,
                        FlowState* final_state) {
  FlowConfig cfg = cfg0;
  cfg.validate();
  TrajectoryRecord rec;

  std::function<double(const RadialField&)> scale_fn = obs.scale_estimate;
  if (!scale_fn)
    scale_fn = [](const RadialField& u) { return min_indicator_scale(u); };

  auto record_tick = [&](const FlowState& s, bool force_snapshot) {
    rec.times.push_back(s.t);
    rec.energy_series.push_back(nonlinear_energy(s.u));
    rec.norm_E_series.push_back(std::sqrt(norm_E(s.u, 0.0, s.u.grid->r_max)));
    rec.tension_l2_series.push_back(norm_L2(tension(s.u)));
    rec.linf_series.push_back(norm_Linf(s.u));
    rec.dissipation_series.push_back(s.dissipation_accum);
    if (rec.times.size() >= 2) {
      // difference-quotient estimate at the tick spacing
      rec.dtu_l2_series.push_back(std::sqrt(
          std::max(0.0, (rec.dissipation_series.end()[-1] - rec.dissipation_series.end()[-2]) /
                            std::max(rec.times.end()[-1] - rec.times.end()[-2], 1e-300))));
    } else {
      rec.dtu_l2_series.push_back(0.0);
    }
    const bool want_snapshot =
        force_snapshot ||
        (obs.snapshot_every > 0 && (rec.ticks() - 1) % obs.snapshot_every == 0);
    if (want_snapshot) rec.snapshots.push_back({s.t, s.u});
    if (obs.on_tick) obs.on_tick(s);
  };

  record_tick(state, true);
  if (cfg.t_end <= state.t) return rec;

  try {
    // the termination slack is relative to dt so that rounding residue from
    // accumulating t never triggers a microscopic extra step (which would
    // break bitwise resume)
    while (cfg.t_end - state.t > 1e-9 * cfg0.dt) {
      if (cfg.adapt) {
        const double lmin = scale_fn(state.u);
        if (std::isfinite(lmin)) {
          const double dt_cap = cfg.dt_safety * lmin * lmin;
          cfg.dt = std::min(cfg0.dt, dt_cap);
        }
      }
      // clip only a genuinely partial final step; a remainder equal to dt up
      // to rounding must keep dt bitwise intact or resumed runs diverge
      const double remaining = cfg.t_end - state.t;
      if (remaining < cfg.dt * (1.0 - 1e-9)) cfg.dt = remaining;
      state = step(state, cfg);

      if (state.step_count % obs.cadence == 0) {
        record_tick(state, false);
        const double linf = rec.linf_series.back();
        if (linf > cfg.linf_ceiling) {
          rec.blowup = true;
          rec.blowup_time = state.t;
          rec.blowup_reason = "linf ceiling exceeded";
          break;
        }
        const double lmin = scale_fn(state.u);
        if (lmin < 4.0 * state.u.grid->r_min()) {
          rec.blowup = true;
          rec.blowup_time = state.t;
          rec.blowup_reason = "bubble core below grid resolution";
          break;
        }
      }
    }
  } catch (const BlowupError& b) {
    rec.blowup = true;
    rec.blowup_time = b.last_good.t;
    rec.blowup_reason = b.what();
    record_tick(b.last_good, true);
  }
  if (!rec.blowup && rec.times.back() != state.t) record_tick(state, true);
  if (!rec.blowup && (rec.snapshots.empty() || rec.snapshots.back().t != state.t))
    rec.snapshots.push_back({state.t, state.u});
  if (final_state) *final_state = state;
  return rec;
}

}  // namespace glb
