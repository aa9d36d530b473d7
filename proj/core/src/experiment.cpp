#include "glb/experiment.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <random>

#include "glb/dynamics.hpp"
#include "glb/errors.hpp"
#include "glb/io.hpp"
#include "glb/modulation.hpp"
#include "json.hpp"

namespace glb {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

struct ManifestBuilder {
  json j;
  fs::path dir;

  explicit ManifestBuilder(const ExperimentConfig& cfg) : dir(cfg.out_dir) {
    j["version"] = "0.1.0";
    j["config"] = json::parse(config_to_json_string(cfg));
    j["blowup"] = false;
  }
  void add_file(const fs::path& rel) {
    j["files"].push_back({{"path", rel.string()}, {"checksum", io::file_checksum(dir / rel)}});
  }
  void finish(double wall_s) {
    j["wall_time_s"] = wall_s;
    std::ofstream out(dir / "manifest.json");
    out << j.dump(2) << '\n';
  }
};

void write_sim_outputs(ManifestBuilder& mb, const ExperimentConfig& cfg,
                       const TrajectoryRecord& rec, const FlowState& final_state,
                       bool append, int snapshot_offset) {
  const fs::path dir = cfg.out_dir;
  const int skip = append ? 1 : 0;  // drop the duplicated tick on resume

  TrajectoryRecord tail = rec;
  if (skip > 0 && tail.ticks() > 0) {
    tail.times.erase(tail.times.begin());
    tail.energy_series.erase(tail.energy_series.begin());
    tail.norm_E_series.erase(tail.norm_E_series.begin());
    tail.tension_l2_series.erase(tail.tension_l2_series.begin());
    tail.dtu_l2_series.erase(tail.dtu_l2_series.begin());
    tail.linf_series.erase(tail.linf_series.begin());
    tail.dissipation_series.erase(tail.dissipation_series.begin());
  }
  io::write_trajectory(dir / "trajectory.csv", tail, append);
  mb.add_file("trajectory.csv");

  int idx = snapshot_offset;
  for (size_t k = (append && !rec.snapshots.empty()) ? 1 : 0; k < rec.snapshots.size();
       ++k) {
    char name[64];
    std::snprintf(name, sizeof(name), "snapshot_%05d.csv", idx++);
    io::write_snapshot(dir / name, rec.snapshots[k].u);
    mb.j["snapshot_index"].push_back({{"t", rec.snapshots[k].t}, {"path", name}});
    mb.add_file(name);
  }

  io::write_snapshot(dir / "final_state.csv", final_state.u);
  mb.add_file("final_state.csv");
  if (final_state.prev_nl) {
    RadialField nl(final_state.u.grid, "prev_nl");
    nl.values = *final_state.prev_nl;
    io::write_snapshot(dir / "final_prev_nl.csv", nl);
    mb.add_file("final_prev_nl.csv");
  }
  mb.j["final"] = {{"t", final_state.t},
                   {"step_count", final_state.step_count},
                   {"dissipation_accum", final_state.dissipation_accum},
                   {"prev_dt", final_state.prev_dt},
                   {"snapshot", "final_state.csv"},
                   {"prev_nl", final_state.prev_nl ? "final_prev_nl.csv" : ""},
                   {"snapshot_count", idx}};
  mb.j["blowup"] = rec.blowup;
  if (rec.blowup) {
    mb.j["blowup_time"] = rec.blowup_time;
    mb.j["blowup_reason"] = rec.blowup_reason;
  }

  // modulation track (best effort: the fit may be lost near blow-up)
  if (cfg.bubbles_N >= 1 && rec.snapshots.size() >= 2 && cfg.flow.nonlinearity) {
    try {
      const auto profiles = build_test_profiles(rec.snapshots.front().u.grid);
      const auto series =
          track_modulation(rec, cfg.bubbles_N, profiles, Regime::global_flow);
      io::write_modulation(dir / "modulation.csv", series, cfg.bubbles_N);
      mb.add_file("modulation.csv");
      if (series.failure_index >= 0)
        mb.j["modulation_fit_lost_at_index"] = series.failure_index;
      // monotone-trend report over the tracked window
      if (!series.fits.empty()) {
        auto trend = [](const std::vector<double>& v) {
          int up = 0, down = 0;
          for (size_t i = 1; i < v.size(); ++i) (v[i] >= v[i - 1] ? up : down)++;
          return std::string(up >= down ? "nondecreasing" : "nonincreasing");
        };
        std::vector<double> lam1;
        for (const auto& f : series.fits) lam1.push_back(f.params.lambda.front());
        mb.j["trend"] = {{"lambda_min", trend(lam1)}, {"linf", trend(rec.linf_series)}};
      }
    } catch (const std::exception& e) {
      mb.j["modulation_error"] = e.what();
    }
  }
}

int run_simulate(const ExperimentConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  fs::create_directories(cfg.out_dir);
  const GridPtr grid = cfg.grid.build();

  FlowState state;
  state.u = build_initial(cfg.initial, grid);

  Observers obs;
  obs.cadence = cfg.cadence;
  obs.snapshot_every = cfg.snapshot_every;

  FlowState final_state;
  const TrajectoryRecord rec = evolve(std::move(state), cfg.flow, obs, &final_state);

  ManifestBuilder mb(cfg);
  write_sim_outputs(mb, cfg, rec, final_state, /*append=*/false, 0);
  mb.finish(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  return 0;
}

int run_decompose(const ExperimentConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  fs::create_directories(cfg.out_dir);
  const GridPtr grid = cfg.grid.build();
  const RadialField u = build_initial(cfg.initial, grid);
  const auto profiles = build_test_profiles(grid);

  const BubbleParams guess = detect_bubbles(u, cfg.bubbles_N);
  json out;
  out["detected"] = {{"theta", guess.theta}, {"lambda", guess.lambda}};
  if (guess.count() == cfg.bubbles_N) {
    const auto fit = fit_decomposition(u, cfg.bubbles_N, guess, profiles);
    out["fit"] = {{"theta", fit.params.theta},
                  {"lambda", fit.params.lambda},
                  {"g_norm", fit.g_norm},
                  {"ratio_sum", fit.ratio_sum},
                  {"ortho_residuals", fit.ortho_residuals},
                  {"converged", fit.converged}};
  }
  const auto prox =
      proximity_d(u, cfg.bubbles_N, profiles, Regime::make_global(1.0), nullptr);
  out["proximity"] = {{"value", prox.value},
                      {"top_scale", prox.top_scale},
                      {"starts_used", prox.starts_used}};

  ManifestBuilder mb(cfg);
  {
    std::ofstream f(cfg.out_dir / "decomposition.json");
    f << out.dump(2) << '\n';
  }
  mb.add_file("decomposition.json");
  mb.finish(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  return 0;
}

int run_spectrum(const ExperimentConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  fs::create_directories(cfg.out_dir);
  const GridPtr grid = cfg.grid.build();

  ManifestBuilder mb(cfg);
  const auto plus = eigen_ground(LSign::plus, cfg.spectrum_k, grid);
  io::write_spectrum_report(cfg.out_dir / "spectrum_Lplus.json", "L+", *grid, plus);
  mb.add_file("spectrum_Lplus.json");
  const auto minus = eigen_ground(LSign::minus, cfg.spectrum_k, grid);
  io::write_spectrum_report(cfg.out_dir / "spectrum_Lminus.json", "L-", *grid, minus);
  mb.add_file("spectrum_Lminus.json");

  if (grid->size() <= 800) {  // dense solve; kept at exploratory sizes
    const auto yy = solve_Y1Y2(grid);
    json j{{"found", yy.found},
           {"nu", yy.nu},
           {"residual1", yy.residual1},
           {"residual2", yy.residual2},
           {"exploratory", yy.exploratory}};
    std::ofstream f(cfg.out_dir / "y1y2.json");
    f << j.dump(2) << '\n';
    mb.add_file("y1y2.json");
  }
  mb.finish(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  return 0;
}

// ---- verify: fast self-checks of the core invariants ------------------------

struct Check {
  std::string name;
  bool pass;
  double value;
};

RadialField random_smooth_field(const GridPtr& grid, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> mu(0.2, 0.5 * grid->r_max);
  std::uniform_real_distribution<double> amp(-1.0, 1.0);
  RadialField v(grid, "random");
  for (int m = 0; m < 5; ++m) {
    const double c = mu(rng), s = 0.2 + 0.3 * (mu(rng) / grid->r_max), a = amp(rng),
                 b = amp(rng);
    for (int i = 0; i < v.size(); ++i) {
      const double r = grid->nodes[i];
      const double env = r * std::exp(-(r - c) * (r - c) / (2.0 * s * s * c * c));
      v.values[i] += cplx{a * env, b * env};
    }
  }
  return v;
}

std::vector<Check> verify_suite(const ExperimentConfig& cfg) {
  std::vector<Check> checks;
  auto push = [&](const std::string& name, bool pass, double value) {
    checks.push_back({name, pass, value});
  };

  // quadrature of r^k on a default-style grid
  {
    const GridPtr g = make_grid(4, 1e-3, 1e2, 1024, Stretch::geometric);
    for (int k = 0; k <= 2; ++k) {
      std::vector<double> vals(g->size());
      for (int i = 0; i < g->size(); ++i) vals[i] = std::pow(g->nodes[i], k);
      const int D = g->dimension;
      const double exact =
          (std::pow(g->r_max, D + k) - std::pow(g->r_min(), D + k)) / (D + k);
      const double rel = std::abs(quad(*g, vals) - exact) / exact;
      push("quadrature_r^" + std::to_string(k), rel < 1e-3, rel);
    }
  }
  // derivative and Laplacian consistency
  {
    const GridPtr g = make_grid(4, 0.1, 1.0, 64, Stretch::uniform);
    RadialField lin(g);
    for (int i = 0; i < g->size(); ++i) lin.values[i] = g->nodes[i];
    const RadialField dl = d_r(lin);
    double err = 0;
    for (const auto& v : dl.values) err = std::max(err, std::abs(v - 1.0));
    push("d_r_linear_exact", err < 1e-10, err);

    RadialField r2(g);
    for (int i = 0; i < g->size(); ++i) r2.values[i] = g->nodes[i] * g->nodes[i];
    const RadialField lap = laplacian(r2);
    err = 0;
    for (int i = 1; i + 1 < g->size(); ++i)
      err = std::max(err, std::abs(lap.values[i].real() - 2.0 * g->dimension));
    push("laplacian_r2_interior", err < 1e-8, err);
  }
  // stationarity of W under the flow (short, coarse)
  {
    const GridPtr g = make_grid(4, 1e-3, 1e2, 1024, Stretch::geometric);
    FlowState s;
    s.u = bubble(0.0, 1.0, g);
    const RadialField W0 = s.u;
    FlowConfig fc;
    fc.dt = 1e-3;
    fc.t_end = 0.1;
    Observers obs;
    obs.cadence = 20;
    const auto rec = evolve(std::move(s), fc, obs);
    FlowState dummy;
    const RadialField& uT = rec.snapshots.back().u;
    const double drift = std::sqrt(norm_E(uT - W0, 0.0, g->r_max));
    push("W_stationary_drift", drift < 1e-3, drift);
    (void)dummy;
  }
  // energy identity on a Gaussian run
  {
    const GridPtr g = make_grid(4, 1e-3, 50.0, 1024, Stretch::geometric);
    FlowState s;
    InitialSpec init;
    init.kind = InitialSpec::gaussian;
    init.sigma = 1.0;
    init.amplitude = 1.0;
    s.u = build_initial(init, g);
    FlowConfig fc;
    fc.dt = 1e-4;
    fc.t_end = 0.05;
    fc.z_phase = 0.5;
    Observers obs;
    obs.cadence = 50;
    const auto rec = evolve(std::move(s), fc, obs);
    const double resid =
        std::abs(rec.energy_series.back() - rec.energy_series.front() +
                 fc.z().real() * rec.dissipation_series.back()) /
        std::abs(rec.energy_series.front());
    push("energy_identity", resid < 1e-4, resid);
  }
  // spectral facts for D = 4
  {
    const GridPtr g = make_grid(4, 1e-3, 1e2, 1024, Stretch::geometric);
    const auto plus = eigen_ground(LSign::plus, 2, g);
    push("Lplus_negative_mode", plus[0].eigenvalue < -1e-4, plus[0].eigenvalue);
    RadialField lw(g);
    for (int i = 0; i < g->size(); ++i)
      lw.values[i] = lambda_w_profile(4, g->nodes[i]);
    const double kres = norm_L2(apply_L(LSign::plus, lw, 1.0));
    push("Lplus_kernel_residual", kres < 1e-3, kres);
    const auto profiles = build_test_profiles(g);
    push("Z1_LambdaW_positive", profiles.pair_Z1_LambdaW > 0, profiles.pair_Z1_LambdaW);
    push("Z1_Y_orthogonal", std::abs(profiles.pair_Z1_Y) < 1e-8, profiles.pair_Z1_Y);
    push("Z2_W_positive", profiles.pair_Z2_W > 0, profiles.pair_Z2_W);
  }
  // radial Sobolev on a random suite
  {
    const GridPtr g = make_grid(4, 1e-3, 20.0, 1024, Stretch::geometric);
    std::mt19937_64 rng(cfg.seed);
    int failures = 0;
    for (int trial = 0; trial < 100; ++trial) {
      const RadialField v = random_smooth_field(g, rng);
      const auto [lhs, rhs] = radial_sobolev_check(v, 1.0);
      if (lhs > rhs * (1.0 + 1e-6)) ++failures;
    }
    push("radial_sobolev_suite", failures == 0, failures);
  }
  return checks;
}

int run_verify(const ExperimentConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  fs::create_directories(cfg.out_dir);
  const auto checks = verify_suite(cfg);
  json j;
  bool all = true;
  for (const auto& c : checks) {
    j["checks"].push_back({{"name", c.name}, {"pass", c.pass}, {"value", c.value}});
    all = all && c.pass;
  }
  j["all_pass"] = all;
  ManifestBuilder mb(cfg);
  {
    std::ofstream f(cfg.out_dir / "verify.json");
    f << j.dump(2) << '\n';
  }
  mb.add_file("verify.json");
  mb.finish(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  for (const auto& c : checks)
    std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << " (" << c.value << ")\n";
  return all ? 0 : 1;
}

}  // namespace

int run_experiment(const ExperimentConfig& cfg) {
  try {
    cfg.validate();
  } catch (const ConfigError& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return 2;
  }
  try {
    switch (cfg.kind) {
      case ExperimentKind::simulate: return run_simulate(cfg);
      case ExperimentKind::decompose: return run_decompose(cfg);
      case ExperimentKind::spectrum: return run_spectrum(cfg);
      case ExperimentKind::verify: return run_verify(cfg);
    }
  } catch (const ConfigError& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

int resume_experiment(const fs::path& manifest_path) {
  const auto t0 = std::chrono::steady_clock::now();
  json m;
  try {
    std::ifstream in(manifest_path);
    if (!in) throw ConfigError("resume: cannot open manifest " + manifest_path.string());
    in >> m;
  } catch (const std::exception& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return 2;
  }

  try {
    const ExperimentConfig cfg = config_from_json_string(m.at("config").dump());
    if (cfg.kind != ExperimentKind::simulate)
      throw ConfigError("resume: only simulate runs can be resumed");
    const fs::path dir = manifest_path.parent_path();
    const GridPtr grid = cfg.grid.build();

    FlowState state;
    state.t = m.at("final").at("t").get<double>();
    state.step_count = m.at("final").at("step_count").get<long>();
    state.dissipation_accum = m.at("final").at("dissipation_accum").get<double>();
    state.prev_dt = m.at("final").at("prev_dt").get<double>();
    state.u = io::read_snapshot(dir / m.at("final").at("snapshot").get<std::string>(), grid);
    const std::string prev = m.at("final").at("prev_nl").get<std::string>();
    if (!prev.empty())
      state.prev_nl = io::read_snapshot(dir / prev, grid).values;

    if (state.t >= cfg.flow.t_end - 1e-15) return 0;  // nothing left to do

    ExperimentConfig cfg2 = cfg;
    cfg2.out_dir = dir;
    Observers obs;
    obs.cadence = cfg.cadence;
    obs.snapshot_every = cfg.snapshot_every;
    FlowState final_state;
    const TrajectoryRecord rec = evolve(std::move(state), cfg2.flow, obs, &final_state);

    ManifestBuilder mb(cfg2);
    mb.j["snapshot_index"] = m.value("snapshot_index", json::array());
    const int offset = m.at("final").value("snapshot_count", 0);
    write_sim_outputs(mb, cfg2, rec, final_state, /*append=*/true, offset);
    mb.finish(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace glb
