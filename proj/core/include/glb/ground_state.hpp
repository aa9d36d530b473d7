#pragma once

#include <vector>

#include "glb/field.hpp"

namespace glb {

/// Phase/scale parameters of an N-bubble configuration, ordered
/// lambda_1 <= ... <= lambda_N.
struct BubbleParams {
  std::vector<double> theta;   // radians, reduced to [0, 2pi)
  std::vector<double> lambda;  // > 0

  BubbleParams() = default;
  BubbleParams(std::vector<double> theta_in, std::vector<double> lambda_in);

  int count() const { return static_cast<int>(lambda.size()); }
};

/// Aubin-Talenti profile W(r) = (1 + r^2/(D(D-2)))^{-(D-2)/2}.
double w_profile(int D, double r);
/// W'(r), closed form.
double w_profile_deriv(int D, double r);
/// (Lambda W)(r) = r W'(r) + (D-2)/2 W(r), closed form.
double lambda_w_profile(int D, double r);

/// e^{i theta} lambda^{-(D-2)/2} W(r/lambda) sampled on the grid.
/// Warns on stderr when lambda is outside the grid's resolved range
/// [10 r_min, r_max/10].
RadialField bubble(double theta, double lambda, const GridPtr& grid);

/// Sum of bubbles; N = 0 gives the zero field.
RadialField multi_bubble(const BubbleParams& params, const GridPtr& grid);

/// Lambda = r d_r + (D-2)/2, the H^1-scaling generator.
RadialField apply_Lambda(const RadialField& f);
/// Underlined Lambda = r d_r + D/2, the L^2-scaling generator.
RadialField apply_Lambda_underline(const RadialField& f);

bool lambda_resolved(const RadialGrid& g, double lambda);

}  // namespace glb
