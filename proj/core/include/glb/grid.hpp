#pragma once

#include <memory>
#include <vector>

namespace glb {

enum class Stretch { uniform, geometric };

/// Discretization of the radial half-line, truncated to [r_min, r_max].
///
/// Nodes are strictly increasing with r_1 > 0.  Quadrature weights w_i
/// approximate integrals against the measure r^{D-1} dr via exact cell
/// volumes between face radii (midpoints between nodes; the innermost cell
/// extends to r = 0, the outermost is trimmed at r_max).  With these
/// weights the flux-form Laplacian below is self-adjoint in the discrete
/// L^2(r^{D-1} dr) inner product.
struct RadialGrid {
  int dimension = 3;
  std::vector<double> nodes;         // r_i, strictly increasing, r_1 > 0
  std::vector<double> quad_weights;  // w_i > 0
  std::vector<double> faces;         // x_0 = 0, x_i = (r_i+r_{i+1})/2, x_M = r_max
  double r_max = 0.0;
  Stretch stretch = Stretch::uniform;

  int size() const { return static_cast<int>(nodes.size()); }
  double r_min() const { return nodes.front(); }
  double nodes_per_decade() const;
};

using GridPtr = std::shared_ptr<const RadialGrid>;

/// Builds a grid with M nodes spanning [r_min, r_max].
/// Geometric stretching requires at least 8 nodes per decade.
GridPtr make_grid(int D, double r_min, double r_max, int M, Stretch stretch);

/// Integral of the sampled values against r^{D-1} dr.
double quad(const RadialGrid& g, const std::vector<double>& values);

}  // namespace glb
