#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "glb/experiment.hpp"
#include "json.hpp"

using namespace glb;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / "glb_exp_test" / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

ExperimentConfig short_sim(const fs::path& out, double t_end) {
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::simulate;
  cfg.grid.M = 512;
  cfg.flow.dt = 1e-3;
  cfg.flow.t_end = t_end;
  cfg.initial.kind = InitialSpec::scaled_w;
  cfg.initial.delta = 0.01;
  cfg.cadence = 10;
  cfg.snapshot_every = 2;
  cfg.out_dir = out;
  return cfg;
}

bool same_bytes(const fs::path& a, const fs::path& b) {
  std::ifstream fa(a, std::ios::binary), fb(b, std::ios::binary);
  const std::string sa((std::istreambuf_iterator<char>(fa)), {});
  const std::string sb((std::istreambuf_iterator<char>(fb)), {});
  return !sa.empty() && sa == sb;
}

}  // namespace

TEST_SUITE_BEGIN("experiment");

TEST_CASE("simulate writes a complete manifest") {
  const fs::path out = fresh_dir("sim");
  REQUIRE(run_experiment(short_sim(out, 0.02)) == 0);
  REQUIRE(fs::exists(out / "manifest.json"));
  nlohmann::json m;
  std::ifstream(out / "manifest.json") >> m;
  CHECK(m.at("blowup") == false);
  CHECK(m.at("final").at("t").get<double>() == doctest::Approx(0.02));
  CHECK(m.contains("files"));
  for (const auto& f : m.at("files")) {
    const fs::path p = out / f.at("path").get<std::string>();
    CHECK(fs::exists(p));
  }
  CHECK(fs::exists(out / "trajectory.csv"));
  CHECK(fs::exists(out / "final_state.csv"));
}

TEST_CASE("resume reproduces an unbroken run bitwise") {
  const fs::path full = fresh_dir("full"), half = fresh_dir("half");
  REQUIRE(run_experiment(short_sim(full, 0.02)) == 0);
  REQUIRE(run_experiment(short_sim(half, 0.01)) == 0);

  // extend the target time in the manifest, then continue
  nlohmann::json m;
  std::ifstream(half / "manifest.json") >> m;
  m["config"]["flow"]["t_end"] = 0.02;
  std::ofstream(half / "manifest.json") << m.dump(2);
  REQUIRE(resume_experiment(half / "manifest.json") == 0);

  CHECK(same_bytes(full / "final_state.csv", half / "final_state.csv"));
  CHECK(same_bytes(full / "final_prev_nl.csv", half / "final_prev_nl.csv"));
  CHECK(same_bytes(full / "trajectory.csv", half / "trajectory.csv"));
}

TEST_CASE("exit codes distinguish validation from success") {
  ExperimentConfig bad = short_sim(fresh_dir("bad"), 0.01);
  bad.flow.z_phase = 3.0;  // invalid
  CHECK(run_experiment(bad) == 2);
  CHECK(resume_experiment(fs::temp_directory_path() / "glb_exp_test" / "nope.json") == 2);
}

TEST_CASE("verify kind reports and passes") {
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::verify;
  cfg.out_dir = fresh_dir("verify");
  CHECK(run_experiment(cfg) == 0);
  CHECK(fs::exists(cfg.out_dir / "verify.json"));
}

TEST_SUITE_END();
