#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "glb/config.hpp"
#include "glb/errors.hpp"
#include "glb/ground_state.hpp"
#include "glb/io.hpp"

using namespace glb;
namespace fs = std::filesystem;

namespace {

fs::path tmp_dir() {
  const fs::path p = fs::temp_directory_path() / "glb_io_test";
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST_SUITE_BEGIN("io_config");

TEST_CASE("snapshot round-trip is exact") {
  const GridPtr g = make_grid(4, 1e-3, 1e2, 512, Stretch::geometric);
  const RadialField u = bubble(0.37, 1.7, g);
  const fs::path p = tmp_dir() / "snap.csv";
  io::write_snapshot(p, u);
  const RadialField back = io::read_snapshot(p, g);
  for (int i = 0; i < u.size(); ++i) CHECK(back.values[i] == u.values[i]);

  // mismatched grid is rejected
  const GridPtr g2 = make_grid(4, 1e-3, 1e2, 256, Stretch::geometric);
  CHECK_THROWS_AS(io::read_snapshot(p, g2), ConfigError);
}

TEST_CASE("full-precision formatting round-trips doubles") {
  for (double v : {1.0 / 3.0, 2.718281828459045, 1e-300, -0.1}) {
    CHECK(std::stod(io::format_full(v)) == v);
  }
}

TEST_CASE("checksums react to content") {
  const fs::path a = tmp_dir() / "a.txt", b = tmp_dir() / "b.txt";
  std::ofstream(a) << "hello";
  std::ofstream(b) << "hellp";
  CHECK(io::file_checksum(a) == io::file_checksum(a));
  CHECK(io::file_checksum(a) != io::file_checksum(b));
}

TEST_CASE("trajectory and modulation headers") {
  const fs::path p = tmp_dir() / "traj.csv";
  TrajectoryRecord rec;
  rec.times = {0.0};
  rec.energy_series = {1.0};
  rec.norm_E_series = {1.0};
  rec.tension_l2_series = {0.0};
  rec.dtu_l2_series = {0.0};
  rec.linf_series = {1.0};
  rec.dissipation_series = {0.0};
  io::write_trajectory(p, rec);
  std::ifstream in(p);
  std::string header;
  std::getline(in, header);
  CHECK(header == "t,E,norm_E,tension_l2,dtu_l2,linf,dissipation_accum");
}

TEST_CASE("TOML subset parsing") {
  const fs::path p = tmp_dir() / "cfg.toml";
  std::ofstream(p) << "kind = \"decompose\"   # comment\n"
                      "bubbles_N = 2\n"
                      "[grid]\n"
                      "D = 5\n"
                      "r_max = 20.0\n"
                      "M = 256\n"
                      "stretch = \"uniform\"\n"
                      "[flow]\n"
                      "adapt = true\n"
                      "dt = 1e-3\n"
                      "[initial]\n"
                      "kind = \"bubbles\"\n"
                      "theta = [0.1, 0.2]\n"
                      "lambda = [0.5, 2.0]\n";
  const ExperimentConfig cfg = load_config(p);
  CHECK(cfg.kind == ExperimentKind::decompose);
  CHECK(cfg.bubbles_N == 2);
  CHECK(cfg.grid.D == 5);
  CHECK(cfg.grid.r_max == 20.0);
  CHECK(cfg.grid.stretch == Stretch::uniform);
  CHECK(cfg.flow.adapt);
  CHECK(cfg.flow.dt == 1e-3);
  CHECK(cfg.initial.kind == InitialSpec::bubbles);
  CHECK(cfg.initial.lambda == std::vector<double>{0.5, 2.0});
}

TEST_CASE("JSON config and manifest round-trip") {
  const fs::path p = tmp_dir() / "cfg.json";
  std::ofstream(p) << R"({"kind":"spectrum","grid":{"D":4,"M":512},"spectrum_k":6})";
  const ExperimentConfig cfg = load_config(p);
  CHECK(cfg.kind == ExperimentKind::spectrum);
  CHECK(cfg.spectrum_k == 6);

  const ExperimentConfig back = config_from_json_string(config_to_json_string(cfg));
  CHECK(back.kind == cfg.kind);
  CHECK(back.grid.M == cfg.grid.M);
  CHECK(back.spectrum_k == cfg.spectrum_k);
  CHECK(back.flow.dt == cfg.flow.dt);
}

TEST_CASE("bad configs raise ConfigError") {
  const fs::path p = tmp_dir() / "bad.toml";
  std::ofstream(p) << "kind = \"nonsense\"\n";
  CHECK_THROWS_AS(load_config(p), ConfigError);
  CHECK_THROWS_AS(load_config(tmp_dir() / "missing.toml"), ConfigError);
}

TEST_CASE("worker thread cap comes from the environment") {
  ::unsetenv("GLB_THREADS");
  CHECK(worker_threads() == 1);
  ::setenv("GLB_THREADS", "4", 1);
  CHECK(worker_threads() == 4);
  ::setenv("GLB_THREADS", "1000", 1);
  CHECK(worker_threads() == 64);
  ::unsetenv("GLB_THREADS");
}

TEST_SUITE_END();
