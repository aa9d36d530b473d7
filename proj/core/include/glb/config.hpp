#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "glb/dynamics.hpp"
#include "glb/grid.hpp"

namespace glb {

enum class ExperimentKind { simulate, decompose, spectrum, verify };

struct GridSpec {
  int D = 4;
  double r_min = 1e-3;
  double r_max = 1e2;
  int M = 2048;
  Stretch stretch = Stretch::geometric;

  GridPtr build() const { return make_grid(D, r_min, r_max, M, stretch); }
};

struct InitialSpec {
  enum Kind { bubbles, scaled_w, gaussian, file } kind = scaled_w;
  std::vector<double> theta, lambda;  // bubbles
  double delta = 0.0;                 // scaled ground state (1+delta) W
  double sigma = 1.0, amplitude = 1.0;  // gaussian
  std::filesystem::path path;         // file
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::simulate;
  GridSpec grid;
  FlowConfig flow;
  InitialSpec initial;
  int cadence = 100;        // steps between diagnostic rows
  int snapshot_every = 10;  // ticks between stored snapshots
  std::filesystem::path out_dir = "out";
  unsigned seed = 12345;
  int bubbles_N = 1;        // decompose: number of bubbles to fit
  int spectrum_k = 4;       // spectrum: eigenpairs per operator

  void validate() const;
};

/// Reads TOML (a flat subset: [section], key = value, arrays of scalars)
/// or JSON, keyed by extension with a content sniff fallback.
ExperimentConfig load_config(const std::filesystem::path& path);

/// Builds the configured initial data on the grid.
RadialField build_initial(const InitialSpec& spec, const GridPtr& grid);

/// JSON round-trip used by the run manifest.
std::string config_to_json_string(const ExperimentConfig& cfg);
ExperimentConfig config_from_json_string(const std::string& text);

/// Worker-thread cap from GLB_THREADS (default 1).
int worker_threads();

}  // namespace glb
