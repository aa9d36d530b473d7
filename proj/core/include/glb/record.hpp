#pragma once

#include <string>
#include <vector>

#include "glb/field.hpp"

namespace glb {

/// Time series and snapshots accumulated along one simulation.
struct TrajectoryRecord {
  std::vector<double> times;
  std::vector<double> energy_series;       // nonlinear energy E(u)
  std::vector<double> norm_E_series;       // ||u||_E^2 ... stored as the norm
  std::vector<double> tension_l2_series;   // ||T(u)||_{L^2}
  std::vector<double> dtu_l2_series;       // difference-quotient ||du/dt||_{L^2}
  std::vector<double> linf_series;
  std::vector<double> dissipation_series;  // running int ||du/dt||^2 dt

  struct Snapshot {
    double t;
    RadialField u;
  };
  std::vector<Snapshot> snapshots;

  bool blowup = false;
  double blowup_time = 0.0;
  std::string blowup_reason;

  int ticks() const { return static_cast<int>(times.size()); }
};

}  // namespace glb
