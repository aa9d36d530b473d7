#include "glb/io.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "glb/errors.hpp"
#include "json.hpp"

namespace glb::io {

std::string format_full(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_snapshot(const fs::path& path, const RadialField& u) {
  std::ofstream out(path);
  if (!out) throw ConfigError("write_snapshot: cannot open " + path.string());
  out << "r,re_u,im_u\n";
  for (int i = 0; i < u.size(); ++i)
    out << format_full(u.grid->nodes[i]) << ',' << format_full(u.values[i].real()) << ','
        << format_full(u.values[i].imag()) << '\n';
}

RadialField read_snapshot(const fs::path& path, const GridPtr& grid) {
  std::ifstream in(path);
  if (!in) throw ConfigError("read_snapshot: cannot open " + path.string());
  std::string line;
  std::getline(in, line);  // header
  RadialField u(grid, path.stem().string());
  int i = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (i >= grid->size()) throw ConfigError("read_snapshot: more rows than grid nodes");
    double r, re, im;
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf", &r, &re, &im) != 3)
      throw ConfigError("read_snapshot: malformed row: " + line);
    if (std::abs(r - grid->nodes[i]) > 1e-12 * (1.0 + std::abs(r)))
      throw ConfigError("read_snapshot: node mismatch with grid at row " +
                        std::to_string(i));
    u.values[i++] = {re, im};
  }
  if (i != grid->size()) throw ConfigError("read_snapshot: fewer rows than grid nodes");
  return u;
}

void write_trajectory(const fs::path& path, const TrajectoryRecord& rec, bool append) {
  std::ofstream out(path, append ? std::ios::app : std::ios::out);
  if (!out) throw ConfigError("write_trajectory: cannot open " + path.string());
  if (!append) out << "t,E,norm_E,tension_l2,dtu_l2,linf,dissipation_accum\n";
  for (int k = 0; k < rec.ticks(); ++k)
    out << format_full(rec.times[k]) << ',' << format_full(rec.energy_series[k]) << ','
        << format_full(rec.norm_E_series[k]) << ','
        << format_full(rec.tension_l2_series[k]) << ','
        << format_full(rec.dtu_l2_series[k]) << ',' << format_full(rec.linf_series[k])
        << ',' << format_full(rec.dissipation_series[k]) << '\n';
}

void write_modulation(const fs::path& path, const ModulationSeries& series, int N) {
  std::ofstream out(path);
  if (!out) throw ConfigError("write_modulation: cannot open " + path.string());
  out << "t,d,g_norm";
  for (int j = 1; j <= N; ++j) out << ",theta_" << j;
  for (int j = 1; j <= N; ++j) out << ",lambda_" << j;
  out << ",ortho_max_resid,converged\n";
  for (size_t k = 0; k < series.times.size(); ++k) {
    const auto& fit = series.fits[k];
    out << format_full(series.times[k]) << ',' << format_full(series.d[k]) << ','
        << format_full(fit.g_norm);
    for (int j = 0; j < N; ++j) out << ',' << format_full(fit.params.theta[j]);
    for (int j = 0; j < N; ++j) out << ',' << format_full(fit.params.lambda[j]);
    double mr = 0.0;
    for (double v : fit.ortho_residuals) mr = std::max(mr, std::abs(v));
    out << ',' << format_full(mr) << ',' << (fit.converged ? 1 : 0) << '\n';
  }
}

void write_balance_report(const fs::path& path, const BalanceReport& rep) {
  nlohmann::json j{{"term1", rep.term1}, {"term2", rep.term2}, {"term3", rep.term3},
                   {"term4", rep.term4}, {"term5", rep.term5}, {"lhs", rep.lhs},
                   {"rhs", rep.rhs},     {"residual", rep.residual},
                   {"phi_spec", rep.phi_spec}, {"t1", rep.t1}, {"t2", rep.t2}};
  std::ofstream out(path);
  if (!out) throw ConfigError("write_balance_report: cannot open " + path.string());
  out << j.dump(2) << '\n';
}

void write_spectrum_report(const fs::path& path, const std::string& op_name,
                           const RadialGrid& grid,
                           const std::vector<SpectralResult>& results) {
  nlohmann::json j;
  j["operator"] = op_name;
  j["D"] = grid.dimension;
  j["grid"] = {{"M", grid.size()},
               {"r_min", grid.r_min()},
               {"r_max", grid.r_max},
               {"stretch", grid.stretch == Stretch::uniform ? "uniform" : "geometric"}};
  for (const auto& r : results) {
    j["eigenvalues"].push_back(r.eigenvalue);
    j["residuals"].push_back(r.residual);
  }
  std::ofstream out(path);
  if (!out) throw ConfigError("write_spectrum_report: cannot open " + path.string());
  out << j.dump(2) << '\n';
}

std::string file_checksum(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("file_checksum: cannot open " + path.string());
  uint64_t h = 1469598103934665603ULL;  // FNV-1a 64
  char buf[8192];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 1099511628211ULL;
    }
    if (!in) break;
  }
  char out[32];
  std::snprintf(out, sizeof(out), "%016" PRIx64, h);
  return out;
}

}  // namespace glb::io
