#pragma once

#include <optional>
#include <vector>

#include "glb/field.hpp"
#include "glb/ground_state.hpp"
#include "glb/linearized.hpp"
#include "glb/record.hpp"

namespace glb {

/// Top-scale convention for the proximity functions: sqrt(T+ - t) near a
/// finite-time blow-up, sqrt(t) for global flows.
struct Regime {
  enum Kind { blowup, global_flow } kind = global_flow;
  double T_plus = 0.0;
  double t = 0.0;

  static Regime make_blowup(double T_plus, double t) { return {blowup, T_plus, t}; }
  static Regime make_global(double t) { return {global_flow, 0.0, t}; }
  double top_scale() const;
};

struct DecompositionResult {
  BubbleParams params;
  RadialField g;
  std::vector<double> ortho_residuals;  // <i e^{i th_j} Z1_{l_j} | g>, <e^{i th_j} Z2_{l_j} | g>
  double g_norm = 0.0;                  // ||g||_E
  double ratio_sum = 0.0;               // sum (l_j/l_{j+1})^{(D-2)/2}
  bool converged = false;
  int iterations = 0;
};

struct ProximityValue {
  double value = 0.0;
  BubbleParams argmin_params;
  double rho = 0.0;        // window is (rho, infinity); 0 = full line
  double top_scale = 0.0;  // lambda_{N+1}
  int K = 0;               // 0 for the global d
  int starts_used = 0;     // best-of-multi-start upper bound on the infimum
};

/// Newton solve of the 2N orthogonality conditions over (theta_j, log lambda_j).
/// bg is an optional background subtracted before fitting.
DecompositionResult fit_decomposition(const RadialField& u, int N, const BubbleParams& guess,
                                      const TestProfiles& profiles,
                                      const RadialField* bg = nullptr,
                                      double ortho_tol = 1e-8);

/// Multi-bubble proximity d (K = 0, full line); best-of-multi-start local
/// minimization, reported as an upper bound on the infimum.
ProximityValue proximity_d(const RadialField& u, int N, const TestProfiles& profiles,
                           const Regime& regime, const RadialField* bg = nullptr);

/// Localized proximity d_K over the window (rho, infinity) with lambda_K = rho,
/// fitting only the N - K exterior bubbles.
ProximityValue proximity_dK(const RadialField& u, int K, int N, double rho,
                            const TestProfiles& profiles, const Regime& regime,
                            const RadialField* bg = nullptr);

/// Localized distance delta_R: minimizes over the bubble count M <= M_max
/// with the convention lambda_{M+1} = R.
struct DeltaRResult {
  double value = 0.0;
  int best_M = 0;
  BubbleParams params;
};
DeltaRResult delta_R(const RadialField& u, double R, int M_max, const TestProfiles& profiles);

/// Candidate (theta, lambda) pairs from local maxima of the scale-invariant
/// indicator r^{(D-2)/2}|u(r)|; sorted by scale, up to N_max entries.
BubbleParams detect_bubbles(const RadialField& u, int N_max);

/// Continuation fit along a trajectory; each snapshot seeded from the
/// previous one.
struct ModulationSeries {
  std::vector<double> times;
  std::vector<DecompositionResult> fits;
  std::vector<double> d;           // proximity objective at the fitted params
  std::vector<double> dlam_ratio;  // max_j |lambda_j'| lambda_j / d
  int failure_index = -1;          // first snapshot where the fit was lost, -1 = none
};
ModulationSeries track_modulation(const TrajectoryRecord& traj, int N,
                                  const TestProfiles& profiles, const Regime::Kind kind,
                                  double T_plus = 0.0);

}  // namespace glb
