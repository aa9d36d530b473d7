#include "glb/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "glb/errors.hpp"
#include "glb/ground_state.hpp"
#include "glb/io.hpp"
#include "json.hpp"

namespace glb {

namespace {

using nlohmann::json;

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  size_t b = s.find_last_not_of(" \t\r");
  return a == std::string::npos ? "" : s.substr(a, b - a + 1);
}

json parse_toml_value(const std::string& raw) {
  const std::string v = trim(raw);
  if (v.empty()) throw ConfigError("config: empty value");
  if (v.front() == '"') {
    if (v.size() < 2 || v.back() != '"') throw ConfigError("config: unterminated string");
    return v.substr(1, v.size() - 2);
  }
  if (v.front() == '[') {
    if (v.back() != ']') throw ConfigError("config: unterminated array");
    json arr = json::array();
    std::stringstream ss(v.substr(1, v.size() - 2));
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (!item.empty()) arr.push_back(parse_toml_value(item));
    }
    return arr;
  }
  if (v == "true") return true;
  if (v == "false") return false;
  try {
    size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos == v.size()) {
      if (v.find_first_of(".eE") == std::string::npos)
        return static_cast<long long>(d);
      return d;
    }
  } catch (...) {
  }
  return v;  // bare word, treated as string (enum values)
}

json parse_toml_subset(std::istream& in) {
  json root = json::object();
  json* current = &root;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("config: bad section at line " + std::to_string(lineno));
      const std::string name = trim(line.substr(1, line.size() - 2));
      current = &root[name];
      if (current->is_null()) *current = json::object();
      continue;
    }
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config: expected key = value at line " + std::to_string(lineno));
    (*current)[trim(line.substr(0, eq))] = parse_toml_value(line.substr(eq + 1));
  }
  return root;
}

template <typename T>
void maybe(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

ExperimentKind parse_kind(const std::string& s) {
  if (s == "simulate") return ExperimentKind::simulate;
  if (s == "decompose") return ExperimentKind::decompose;
  if (s == "spectrum") return ExperimentKind::spectrum;
  if (s == "verify") return ExperimentKind::verify;
  throw ConfigError("config: unknown experiment kind '" + s + "'");
}

ExperimentConfig from_json(const json& j) {
  ExperimentConfig cfg;
  if (j.contains("kind")) cfg.kind = parse_kind(j.at("kind").get<std::string>());

  if (j.contains("grid")) {
    const json& g = j.at("grid");
    maybe(g, "D", cfg.grid.D);
    maybe(g, "r_min", cfg.grid.r_min);
    maybe(g, "r_max", cfg.grid.r_max);
    maybe(g, "M", cfg.grid.M);
    if (g.contains("stretch")) {
      const std::string s = g.at("stretch").get<std::string>();
      if (s == "uniform")
        cfg.grid.stretch = Stretch::uniform;
      else if (s == "geometric")
        cfg.grid.stretch = Stretch::geometric;
      else
        throw ConfigError("config: unknown stretch '" + s + "'");
    }
  }
  if (j.contains("flow")) {
    const json& f = j.at("flow");
    maybe(f, "z_phase", cfg.flow.z_phase);
    maybe(f, "dt", cfg.flow.dt);
    maybe(f, "t_end", cfg.flow.t_end);
    maybe(f, "adapt", cfg.flow.adapt);
    maybe(f, "dt_safety", cfg.flow.dt_safety);
    maybe(f, "nonlinearity", cfg.flow.nonlinearity);
    maybe(f, "linf_ceiling", cfg.flow.linf_ceiling);
    if (f.contains("scheme")) {
      const std::string s = f.at("scheme").get<std::string>();
      if (s == "imex_cn_ab2")
        cfg.flow.scheme = Scheme::imex_cn_ab2;
      else if (s == "imex_be_fe")
        cfg.flow.scheme = Scheme::imex_be_fe;
      else
        throw ConfigError("config: unknown scheme '" + s + "'");
    }
  }
  if (j.contains("initial")) {
    const json& d = j.at("initial");
    if (d.contains("kind")) {
      const std::string s = d.at("kind").get<std::string>();
      if (s == "bubbles")
        cfg.initial.kind = InitialSpec::bubbles;
      else if (s == "scaled_w")
        cfg.initial.kind = InitialSpec::scaled_w;
      else if (s == "gaussian")
        cfg.initial.kind = InitialSpec::gaussian;
      else if (s == "file")
        cfg.initial.kind = InitialSpec::file;
      else
        throw ConfigError("config: unknown initial data kind '" + s + "'");
    }
    maybe(d, "theta", cfg.initial.theta);
    maybe(d, "lambda", cfg.initial.lambda);
    maybe(d, "delta", cfg.initial.delta);
    maybe(d, "sigma", cfg.initial.sigma);
    maybe(d, "amplitude", cfg.initial.amplitude);
    if (d.contains("path")) cfg.initial.path = d.at("path").get<std::string>();
  }
  maybe(j, "cadence", cfg.cadence);
  maybe(j, "snapshot_every", cfg.snapshot_every);
  if (j.contains("out_dir")) cfg.out_dir = j.at("out_dir").get<std::string>();
  maybe(j, "seed", cfg.seed);
  maybe(j, "bubbles_N", cfg.bubbles_N);
  maybe(j, "spectrum_k", cfg.spectrum_k);
  return cfg;
}

}  // namespace

void ExperimentConfig::validate() const {
  flow.validate();
  if (cadence < 1) throw ConfigError("config: cadence must be >= 1");
  if (initial.kind == InitialSpec::file && !std::filesystem::exists(initial.path))
    throw ConfigError("config: initial data file not found: " + initial.path.string());
  if (initial.kind == InitialSpec::bubbles && initial.theta.size() != initial.lambda.size())
    throw ConfigError("config: initial bubbles theta/lambda length mismatch");
  (void)grid;  // bounds checked by make_grid
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  std::string text = ss.str();

  const size_t first = text.find_first_not_of(" \t\r\n");
  const bool looks_json =
      path.extension() == ".json" || (first != std::string::npos && text[first] == '{');

  json j;
  if (looks_json) {
    try {
      j = json::parse(text);
    } catch (const json::parse_error& e) {
      throw ConfigError("config: JSON parse error: " + std::string(e.what()));
    }
  } else {
    std::stringstream ts(text);
    j = parse_toml_subset(ts);
  }
  ExperimentConfig cfg = from_json(j);
  cfg.validate();
  return cfg;
}

RadialField build_initial(const InitialSpec& spec, const GridPtr& grid) {
  switch (spec.kind) {
    case InitialSpec::bubbles:
      return multi_bubble(BubbleParams(spec.theta, spec.lambda), grid);
    case InitialSpec::scaled_w: {
      RadialField u = bubble(0.0, 1.0, grid);
      for (auto& v : u.values) v *= 1.0 + spec.delta;
      u.label = "scaled_w";
      return u;
    }
    case InitialSpec::gaussian: {
      RadialField u(grid, "gaussian");
      for (int i = 0; i < u.size(); ++i) {
        const double r = grid->nodes[i];
        u.values[i] = spec.amplitude * std::exp(-r * r / (4.0 * spec.sigma));
      }
      return u;
    }
    case InitialSpec::file:
      return io::read_snapshot(spec.path, grid);
  }
  throw ConfigError("build_initial: unreachable");
}

std::string config_to_json_string(const ExperimentConfig& cfg) {
  using nlohmann::json;
  json j;
  switch (cfg.kind) {
    case ExperimentKind::simulate: j["kind"] = "simulate"; break;
    case ExperimentKind::decompose: j["kind"] = "decompose"; break;
    case ExperimentKind::spectrum: j["kind"] = "spectrum"; break;
    case ExperimentKind::verify: j["kind"] = "verify"; break;
  }
  j["grid"] = {{"D", cfg.grid.D},
               {"r_min", cfg.grid.r_min},
               {"r_max", cfg.grid.r_max},
               {"M", cfg.grid.M},
               {"stretch", cfg.grid.stretch == Stretch::uniform ? "uniform" : "geometric"}};
  j["flow"] = {{"z_phase", cfg.flow.z_phase},
               {"dt", cfg.flow.dt},
               {"t_end", cfg.flow.t_end},
               {"scheme", cfg.flow.scheme == Scheme::imex_cn_ab2 ? "imex_cn_ab2" : "imex_be_fe"},
               {"adapt", cfg.flow.adapt},
               {"dt_safety", cfg.flow.dt_safety},
               {"nonlinearity", cfg.flow.nonlinearity},
               {"linf_ceiling", cfg.flow.linf_ceiling}};
  json init;
  switch (cfg.initial.kind) {
    case InitialSpec::bubbles:
      init["kind"] = "bubbles";
      init["theta"] = cfg.initial.theta;
      init["lambda"] = cfg.initial.lambda;
      break;
    case InitialSpec::scaled_w:
      init["kind"] = "scaled_w";
      init["delta"] = cfg.initial.delta;
      break;
    case InitialSpec::gaussian:
      init["kind"] = "gaussian";
      init["sigma"] = cfg.initial.sigma;
      init["amplitude"] = cfg.initial.amplitude;
      break;
    case InitialSpec::file:
      init["kind"] = "file";
      init["path"] = cfg.initial.path.string();
      break;
  }
  j["initial"] = init;
  j["cadence"] = cfg.cadence;
  j["snapshot_every"] = cfg.snapshot_every;
  j["out_dir"] = cfg.out_dir.string();
  j["seed"] = cfg.seed;
  j["bubbles_N"] = cfg.bubbles_N;
  j["spectrum_k"] = cfg.spectrum_k;
  return j.dump(2);
}

ExperimentConfig config_from_json_string(const std::string& text) {
  return from_json(nlohmann::json::parse(text));
}

int worker_threads() {
  const char* env = std::getenv("GLB_THREADS");
  if (!env) return 1;
  const int n = std::atoi(env);
  return std::max(1, std::min(n, 64));
}

}  // namespace glb
