#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "glb/errors.hpp"
#include "glb/experiment.hpp"

namespace {

int run_subcommand(glb::ExperimentKind kind, const std::string& config_path,
                   const std::string& out_dir, const std::string& resume_path) {
  if (!resume_path.empty()) return glb::resume_experiment(resume_path);
  glb::ExperimentConfig cfg;
  try {
    cfg = glb::load_config(config_path);
  } catch (const glb::ConfigError& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return 2;
  }
  cfg.kind = kind;  // the subcommand wins over the file's kind
  if (!out_dir.empty()) cfg.out_dir = out_dir;
  return glb::run_experiment(cfg);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"energy-critical radial complex Ginzburg-Landau toolkit"};
  app.require_subcommand(1);

  struct Args {
    std::string config, out, resume;
  };

  auto add = [&](const char* name, const char* desc) {
    auto* sub = app.add_subcommand(name, desc);
    auto args = std::make_shared<Args>();
    sub->add_option("--config", args->config, "experiment config (TOML or JSON)");
    sub->add_option("--out", args->out, "output directory (overrides config)");
    sub->add_option("--resume", args->resume, "manifest of a run to continue");
    return std::make_pair(sub, args);
  };

  auto [sim, sim_a] = add("simulate", "evolve the flow and record diagnostics");
  auto [dec, dec_a] = add("decompose", "fit a multi-bubble decomposition");
  auto [spec, spec_a] = add("spectrum", "eigenpairs of the linearized operators");
  auto [ver, ver_a] = add("verify", "fast invariant self-checks");

  CLI11_PARSE(app, argc, argv);

  auto dispatch = [&](CLI::App* sub, const Args& a, glb::ExperimentKind kind) -> int {
    if (a.config.empty() && a.resume.empty()) {
      std::cerr << "validation error: --config (or --resume) is required\n";
      return 2;
    }
    return run_subcommand(kind, a.config, a.out, a.resume);
  };

  if (sim->parsed()) return dispatch(sim, *sim_a, glb::ExperimentKind::simulate);
  if (dec->parsed()) return dispatch(dec, *dec_a, glb::ExperimentKind::decompose);
  if (spec->parsed()) return dispatch(spec, *spec_a, glb::ExperimentKind::spectrum);
  if (ver->parsed()) return dispatch(ver, *ver_a, glb::ExperimentKind::verify);
  return 2;
}
