#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "glb/energy.hpp"
#include "glb/field.hpp"
#include "glb/linearized.hpp"
#include "glb/modulation.hpp"
#include "glb/record.hpp"

namespace glb::io {

namespace fs = std::filesystem;

/// Field snapshot CSV: header `r,re_u,im_u`, 17 significant digits.
void write_snapshot(const fs::path& path, const RadialField& u);
RadialField read_snapshot(const fs::path& path, const GridPtr& grid);

/// Trajectory CSV: `t,E,norm_E,tension_l2,dtu_l2,linf,dissipation_accum`.
void write_trajectory(const fs::path& path, const TrajectoryRecord& rec,
                      bool append = false);

/// Modulation CSV:
/// `t,d,g_norm,theta_1..theta_N,lambda_1..lambda_N,ortho_max_resid,converged`.
void write_modulation(const fs::path& path, const ModulationSeries& series, int N);

/// Balance report JSON (term1..term5, lhs, rhs, residual, phi_spec, t1, t2).
void write_balance_report(const fs::path& path, const BalanceReport& rep);

/// Spectrum report JSON: {operator, D, grid, eigenvalues[], residuals[]}.
void write_spectrum_report(const fs::path& path, const std::string& op_name,
                           const RadialGrid& grid,
                           const std::vector<SpectralResult>& results);

/// FNV-1a checksum of a file, hex string.
std::string file_checksum(const fs::path& path);

std::string format_full(double v);  // 17 significant digits

}  // namespace glb::io
