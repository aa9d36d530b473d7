#include "glb/grid.hpp"

#include <cmath>
#include <string>

#include "glb/errors.hpp"

namespace glb {

double RadialGrid::nodes_per_decade() const {
  const double decades = std::log10(r_max / nodes.front());
  return decades > 0 ? (size() - 1) / decades : static_cast<double>(size());
}

GridPtr make_grid(int D, double r_min, double r_max, int M, Stretch stretch) {
  if (D < 3)
    throw DimensionError("make_grid: dimension must be >= 3, got " + std::to_string(D));
  if (!(r_min > 0.0) || !(r_min < r_max))
    throw ConfigError("make_grid: need 0 < r_min < r_max");
  if (M < 16) throw ConfigError("make_grid: need M >= 16, got " + std::to_string(M));

  auto g = std::make_shared<RadialGrid>();
  g->dimension = D;
  g->r_max = r_max;
  g->stretch = stretch;
  g->nodes.resize(M);

  if (stretch == Stretch::uniform) {
    const double h = (r_max - r_min) / (M - 1);
    for (int i = 0; i < M; ++i) g->nodes[i] = r_min + i * h;
  } else {
    const double decades = std::log10(r_max / r_min);
    if ((M - 1) / decades < 8.0)
      throw ConfigError("make_grid: geometric stretch needs >= 8 nodes per decade");
    const double lq = std::log(r_max / r_min) / (M - 1);
    for (int i = 0; i < M; ++i) g->nodes[i] = r_min * std::exp(i * lq);
  }
  g->nodes.back() = r_max;  // kill rounding drift at the endpoint

  // Cell faces: the innermost cell reaches down to r = 0 so that the disk
  // volume is accounted for and the zero-flux regularity condition sits at
  // the coordinate origin.
  g->faces.resize(M + 1);
  g->faces[0] = 0.0;
  for (int i = 1; i < M; ++i) g->faces[i] = 0.5 * (g->nodes[i - 1] + g->nodes[i]);
  g->faces[M] = r_max;

  g->quad_weights.resize(M);
  for (int i = 0; i < M; ++i) {
    const double a = g->faces[i], b = g->faces[i + 1];
    g->quad_weights[i] = (std::pow(b, D) - std::pow(a, D)) / D;
  }
  return g;
}

double quad(const RadialGrid& g, const std::vector<double>& values) {
  double s = 0.0;
  for (int i = 0; i < g.size(); ++i) s += g.quad_weights[i] * values[i];
  return s;
}

}  // namespace glb
