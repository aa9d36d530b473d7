#pragma once

#include <functional>
#include <optional>

#include "glb/field.hpp"
#include "glb/record.hpp"

namespace glb {

enum class Scheme { imex_cn_ab2, imex_be_fe };

/// Parameters of the flow du/dt = z (Lap u + f(u)), |z| = 1, Re z > 0.
struct FlowConfig {
  double z_phase = 0.0;  // arg z, must lie in (-pi/2, pi/2)
  double dt = 1e-4;
  double t_end = 1.0;
  Scheme scheme = Scheme::imex_cn_ab2;
  bool adapt = false;
  double dt_safety = 0.5;

  bool nonlinearity = true;    // disabled for the linear-flow oracle
  double linf_ceiling = 1e6;   // blow-up stop threshold

  cplx z() const { return std::polar(1.0, z_phase); }
  void validate() const;
};

struct FlowState {
  double t = 0.0;
  RadialField u;
  long step_count = 0;
  double dissipation_accum = 0.0;
  // AB2 memory: nonlinearity of the previous accepted step.
  std::optional<std::vector<cplx>> prev_nl;
  double prev_dt = 0.0;
};

/// Pointwise |u|^{4/(D-2)} u.
RadialField f_nl(const RadialField& u);

/// R-linear derivative of f at u applied to g:
/// |u|^{4/(D-2)} (g + 4/(D-2) u Re(u^{-1} g)); zero where u = 0.
RadialField f_prime(const RadialField& u, const RadialField& g);

/// T(u) = Lap u + f(u); vanishes on stationary solutions.
RadialField tension(const RadialField& u);

/// One IMEX step: implicit treatment of z Lap, explicit nonlinearity
/// (AB2 extrapolated for the CN scheme, bootstrapped with BE-FE).
/// Throws BlowupError when the update produces non-finite values.
FlowState step(const FlowState& state, const FlowConfig& cfg);

class BlowupError : public std::runtime_error {
public:
  BlowupError(std::string what, FlowState last_good)
      : std::runtime_error(std::move(what)), last_good(std::move(last_good)) {}
  FlowState last_good;
};

struct Observers {
  int cadence = 100;                 // steps between diagnostic rows
  int snapshot_every = 0;            // ticks between stored snapshots, 0 = only endpoints
  std::function<void(const FlowState&)> on_tick;
  // Smallest resolved bubble scale, used for adaptive dt and the blow-up
  // stop condition; defaults to an indicator-peak estimate.
  std::function<double(const RadialField&)> scale_estimate;
};

/// Runs step() until t_end or blow-up; records diagnostics every cadence
/// steps (plus the initial and final states).  When final_state is given it
/// receives the full stepper state (including the AB2 memory) for resume.
TrajectoryRecord evolve(FlowState state, const FlowConfig& cfg, const Observers& obs,
                        FlowState* final_state = nullptr);

/// Smallest local-maximum scale of the indicator r^{(D-2)/2}|u|;
/// returns +inf when no peak clears the threshold.
double min_indicator_scale(const RadialField& u, double threshold = 0.25);

}  // namespace glb
