#pragma once

#include <filesystem>

#include "glb/config.hpp"

namespace glb {

/// Executes the configured experiment kind, writing all artifacts and a
/// run manifest into cfg.out_dir.  Returns the process exit status:
/// 0 success (including a blow-up stop, which is a science outcome),
/// 1 internal error, 2 validation error.
int run_experiment(const ExperimentConfig& cfg);

/// Continues a simulate run from the manifest's final stepper state,
/// appending to the series files.  Bitwise-reproduces an unbroken run at
/// shared times for fixed dt.
int resume_experiment(const std::filesystem::path& manifest_path);

}  // namespace glb
