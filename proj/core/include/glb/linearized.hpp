#pragma once

#include <optional>
#include <vector>

#include "glb/field.hpp"
#include "glb/ground_state.hpp"

namespace glb {

enum class LSign { plus, minus };

/// One eigenpair of a discretized self-adjoint operator in L^2(r^{D-1}dr).
struct SpectralResult {
  double eigenvalue = 0.0;
  RadialField eigenfunction;  // real-valued, unit L^2(r^{D-1}dr) norm
  double residual = 0.0;      // ||L y - mu y||_{L^2}
};

/// L^{+/-} at scale lambda applied to g:
///   L^+ = -Lap - p W^{p-1},  L^- = -Lap - W^{p-1},  p = (D+2)/(D-2),
/// with the potential rescaled as lambda^{-2} V(r/lambda).
RadialField apply_L(LSign sign, const RadialField& g, double lambda);

/// Linearization of the full flow around a multi-bubble configuration:
/// z (Lap g + f'(W(theta, lambda)) g).
RadialField apply_L_script(const RadialField& g, const BubbleParams& params, cplx z);

/// Lowest-k eigenpairs of L^{+/-} (scale 1) on the given grid.
std::vector<SpectralResult> eigen_ground(LSign sign, int k, const GridPtr& grid);

/// Generalized eigenpair of the composed problem L^- L^+ Y1 = -nu^2 Y1 on
/// the complement of the kernels; exploratory for D < 5.
struct Y1Y2Result {
  bool found = false;
  double nu = 0.0;
  RadialField Y1, Y2;
  double residual1 = 0.0;  // ||L+ Y1 + nu Y2||
  double residual2 = 0.0;  // ||L- Y2 - nu Y1||
  bool exploratory = false;  // set for D in {3,4}
};

Y1Y2Result solve_Y1Y2(const GridPtr& grid);

/// Compactly supported test profiles with their pairing certificates.
struct BumpSpec {
  double rho1 = 0.0, rho2 = 0.0;  // support interval
  double eval(double r) const;    // (1-s^2)^4 on the mapped support
  double eval_deriv(double r) const;
};

struct TestProfiles {
  int dimension = 3;
  RadialField Z1, Z2;
  BumpSpec bump_main, bump_aux;  // Z2 = bump_main; Z1 = bump_main - c * bump_aux
  double mix_coeff = 0.0;        // c = <b|Y> / <b_aux|Y>
  double pair_Z1_LambdaW = 0.0;  // > 0 required
  double pair_Z1_Y = 0.0;        // ~ 0 required
  double pair_Z2_W = 0.0;        // > 0 required
  double rho1 = 0.0, rho2 = 0.0;  // support hull of both profiles

  /// Z_k rescaled with the H^1-invariant scaling, sampled on a grid.
  RadialField z1_scaled(double lambda, const GridPtr& grid) const;
  RadialField z2_scaled(double lambda, const GridPtr& grid) const;
  double z1_at(double r) const;
  double z2_at(double r) const;
  /// Lambda applied to the rescaled profiles (closed form).
  double lambda_z1_at(double r) const;
  double lambda_z2_at(double r) const;
};

/// Builds Z1, Z2 from polynomial bumps and verifies the three certificates;
/// shifts supports and retries on failure.
TestProfiles build_test_profiles(const GridPtr& grid);

}  // namespace glb
