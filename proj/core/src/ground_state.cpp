#include "glb/ground_state.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numbers>
#include <numeric>

#include "glb/errors.hpp"

namespace glb {

namespace {

double wrap_angle(double t) {
  const double two_pi = 2.0 * std::numbers::pi;
  t = std::fmod(t, two_pi);
  return t < 0 ? t + two_pi : t;
}

}  // namespace

BubbleParams::BubbleParams(std::vector<double> theta_in, std::vector<double> lambda_in)
    : theta(std::move(theta_in)), lambda(std::move(lambda_in)) {
  if (theta.size() != lambda.size())
    throw ConfigError("BubbleParams: theta/lambda length mismatch");
  for (double l : lambda)
    if (!(l > 0.0)) throw ConfigError("BubbleParams: scales must be positive");
  // sort jointly by scale
  std::vector<int> idx(lambda.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](int a, int b) { return lambda[a] < lambda[b]; });
  std::vector<double> th(theta.size()), la(lambda.size());
  for (size_t k = 0; k < idx.size(); ++k) {
    th[k] = wrap_angle(theta[idx[k]]);
    la[k] = lambda[idx[k]];
  }
  theta = std::move(th);
  lambda = std::move(la);
}

double w_profile(int D, double r) {
  const double c = static_cast<double>(D) * (D - 2);
  return std::pow(1.0 + r * r / c, -0.5 * (D - 2));
}

double w_profile_deriv(int D, double r) {
  const double c = static_cast<double>(D) * (D - 2);
  return -(D - 2) * (r / c) * std::pow(1.0 + r * r / c, -0.5 * (D - 2) - 1.0);
}

double lambda_w_profile(int D, double r) {
  return r * w_profile_deriv(D, r) + 0.5 * (D - 2) * w_profile(D, r);
}

bool lambda_resolved(const RadialGrid& g, double lambda) {
  return g.r_min() <= lambda / 10.0 && 10.0 * lambda <= g.r_max;
}

RadialField bubble(double theta, double lambda, const GridPtr& grid) {
  if (!(lambda > 0.0)) throw ConfigError("bubble: lambda must be positive");
  if (!lambda_resolved(*grid, lambda))
    std::cerr << "[glb] warning: bubble scale " << lambda
              << " outside resolved range of grid [" << grid->r_min() << ", "
              << grid->r_max << "]\n";
  const int D = grid->dimension;
  const cplx phase = std::polar(1.0, theta);
  const double amp = std::pow(lambda, -0.5 * (D - 2));
  RadialField out(grid, "bubble");
  for (int i = 0; i < out.size(); ++i)
    out.values[i] = phase * amp * w_profile(D, grid->nodes[i] / lambda);
  return out;
}

RadialField multi_bubble(const BubbleParams& params, const GridPtr& grid) {
  RadialField out(grid, "multi_bubble");
  for (int j = 0; j < params.count(); ++j) {
    const RadialField b = bubble(params.theta[j], params.lambda[j], grid);
    for (int i = 0; i < out.size(); ++i) out.values[i] += b.values[i];
  }
  return out;
}

RadialField apply_Lambda(const RadialField& f) {
  const RadialField df = d_r(f);
  const int D = f.grid->dimension;
  RadialField out(f.grid, f.label);
  for (int i = 0; i < f.size(); ++i)
    out.values[i] = f.grid->nodes[i] * df.values[i] + 0.5 * (D - 2) * f.values[i];
  return out;
}

RadialField apply_Lambda_underline(const RadialField& f) {
  const RadialField df = d_r(f);
  const int D = f.grid->dimension;
  RadialField out(f.grid, f.label);
  for (int i = 0; i < f.size(); ++i)
    out.values[i] = f.grid->nodes[i] * df.values[i] + 0.5 * D * f.values[i];
  return out;
}

}  // namespace glb
