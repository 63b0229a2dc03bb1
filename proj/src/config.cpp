#include "nlsfp/config.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <sstream>

namespace nlsfp {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void fail(const ConfigMap& map, const std::string& key, const std::string& what) {
  std::ostringstream msg;
  msg << map.origin;
  auto it = map.lines.find(key);
  if (it != map.lines.end()) msg << ":" << it->second;
  msg << ": key '" << key << "' " << what;
  throw ConfigError(msg.str());
}

}  // namespace

double ConfigMap::get_double(const std::string& key, double fallback) const {
  auto it = values.find(key);
  if (it == values.end()) return fallback;
  try {
    std::size_t pos = 0;
    const double v = std::stod(it->second, &pos);
    if (pos != it->second.size()) throw std::invalid_argument("");
    return v;
  } catch (...) {
    fail(*this, key, "expects a real number, got '" + it->second + "'");
  }
}

int ConfigMap::get_int(const std::string& key, int fallback) const {
  auto it = values.find(key);
  if (it == values.end()) return fallback;
  try {
    std::size_t pos = 0;
    const long v = std::stol(it->second, &pos, 10);
    if (pos != it->second.size()) throw std::invalid_argument("");
    return static_cast<int>(v);
  } catch (...) {
    fail(*this, key, "expects an integer, got '" + it->second + "'");
  }
}

std::uint64_t ConfigMap::get_u64(const std::string& key, std::uint64_t fallback) const {
  auto it = values.find(key);
  if (it == values.end()) return fallback;
  try {
    std::size_t pos = 0;
    const unsigned long long v = std::stoull(it->second, &pos, 10);
    if (pos != it->second.size()) throw std::invalid_argument("");
    return v;
  } catch (...) {
    fail(*this, key, "expects an unsigned integer, got '" + it->second + "'");
  }
}

std::string ConfigMap::get_string(const std::string& key, const std::string& fallback) const {
  auto it = values.find(key);
  return it == values.end() ? fallback : it->second;
}

bool ConfigMap::get_bool(const std::string& key, bool fallback) const {
  auto it = values.find(key);
  if (it == values.end()) return fallback;
  if (it->second == "true" || it->second == "1") return true;
  if (it->second == "false" || it->second == "0") return false;
  fail(*this, key, "expects true/false, got '" + it->second + "'");
}

std::uint64_t ConfigMap::hash() const {
  std::uint64_t h = 1469598103934665603ull;
  auto feed = [&h](const std::string& s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 1099511628211ull;
    }
  };
  for (const auto& [k, v] : values) {  // std::map iterates sorted
    feed(k);
    feed("=");
    feed(v);
    feed("\n");
  }
  return h;
}

ConfigMap parse_config_text(const std::string& text, const std::string& origin) {
  ConfigMap map;
  map.origin = origin;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash_pos = line.find('#');
    if (hash_pos != std::string::npos) line = line.substr(0, hash_pos);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      std::ostringstream msg;
      msg << origin << ":" << lineno << ": expected 'key = value', got '" << line << "'";
      throw ConfigError(msg.str());
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      std::ostringstream msg;
      msg << origin << ":" << lineno << ": empty key";
      throw ConfigError(msg.str());
    }
    map.values[key] = value;
    map.lines[key] = lineno;
  }
  return map;
}

ConfigMap parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path);
}

namespace {
constexpr std::array<const char*, 31> kKnownKeys = {
    "modes", "dt", "seed", "threads",
    "kernel.delta", "kernel.profile", "kernel.amplitude", "kernel.ratio", "kernel.support",
    "density.kind", "density.coupling", "density.potential", "density.table",
    "strip.Ns", "strip.Nt", "strip.T_max", "strip.steps", "strip.margin", "strip.tol",
    "strip.min_step", "strip.max_cg", "strip.resume",
    "hofer.nodes", "hofer.starts", "hofer.grad_tol", "hofer.max_iterations",
    "refine.tol", "refine.max_iterations",
    "action.orientation",
    "verify.samples",
    "out",
};
}  // namespace

bool is_known_config_key(const std::string& key) {
  return std::find_if(kKnownKeys.begin(), kKnownKeys.end(),
                      [&key](const char* k) { return key == k; }) != kKnownKeys.end();
}

RunConfig RunConfig::from(const ConfigMap& map) {
  for (const auto& [k, v] : map.values) {
    if (!is_known_config_key(k)) {
      std::ostringstream msg;
      msg << map.origin << ":" << map.lines.at(k) << ": unknown key '" << k << "'";
      throw ConfigError(msg.str());
    }
  }
  RunConfig cfg;
  cfg.modes = map.get_int("modes", cfg.modes);
  cfg.dt = map.get_double("dt", cfg.dt);
  cfg.seed = map.get_u64("seed", cfg.seed);
  cfg.threads = map.get_int("threads", cfg.threads);
  cfg.kernel_delta = map.get_double("kernel.delta", cfg.kernel_delta);
  cfg.kernel_profile = map.get_string("kernel.profile", cfg.kernel_profile);
  cfg.kernel_amplitude = map.get_double("kernel.amplitude", cfg.kernel_amplitude);
  cfg.kernel_ratio = map.get_double("kernel.ratio", cfg.kernel_ratio);
  cfg.kernel_support = map.get_int("kernel.support", cfg.kernel_support);
  cfg.density_kind = map.get_string("density.kind", cfg.density_kind);
  cfg.density_coupling = map.get_double("density.coupling", cfg.density_coupling);
  cfg.density_potential = map.get_double("density.potential", cfg.density_potential);
  cfg.density_table_path = map.get_string("density.table", cfg.density_table_path);
  cfg.strip_Ns = map.get_int("strip.Ns", cfg.strip_Ns);
  cfg.strip_Nt = map.get_int("strip.Nt", cfg.strip_Nt);
  cfg.strip_T_max = map.get_double("strip.T_max", cfg.strip_T_max);
  cfg.strip_steps = map.get_int("strip.steps", cfg.strip_steps);
  cfg.strip_margin = map.get_double("strip.margin", cfg.strip_margin);
  cfg.strip_tol = map.get_double("strip.tol", cfg.strip_tol);
  cfg.strip_min_step = map.get_double("strip.min_step", cfg.strip_min_step);
  cfg.strip_max_cg = map.get_int("strip.max_cg", cfg.strip_max_cg);
  cfg.strip_resume = map.get_string("strip.resume", cfg.strip_resume);
  cfg.hofer_nodes = map.get_int("hofer.nodes", cfg.hofer_nodes);
  cfg.hofer_starts = map.get_int("hofer.starts", cfg.hofer_starts);
  cfg.hofer_grad_tol = map.get_double("hofer.grad_tol", cfg.hofer_grad_tol);
  cfg.hofer_max_iterations = map.get_int("hofer.max_iterations", cfg.hofer_max_iterations);
  cfg.refine_tol = map.get_double("refine.tol", cfg.refine_tol);
  cfg.refine_max_iterations = map.get_int("refine.max_iterations", cfg.refine_max_iterations);
  cfg.action_orientation = map.get_double("action.orientation", cfg.action_orientation);
  cfg.verify_samples = map.get_int("verify.samples", cfg.verify_samples);

  auto positive = [&map](const char* key, double v) {
    if (!(v > 0.0)) {
      std::ostringstream msg;
      msg << map.origin << ": key '" << key << "' must be positive";
      throw ConfigError(msg.str());
    }
  };
  positive("dt", cfg.dt);
  positive("strip.tol", cfg.strip_tol);
  positive("hofer.grad_tol", cfg.hofer_grad_tol);
  positive("refine.tol", cfg.refine_tol);
  if (cfg.modes < 0) throw ConfigError(map.origin + ": key 'modes' must be >= 0");
  if (cfg.strip_Ns < 5 || cfg.strip_Nt < 2)
    throw ConfigError(map.origin + ": strip grid needs Ns >= 5, Nt >= 2");
  if (cfg.strip_steps < 1) throw ConfigError(map.origin + ": key 'strip.steps' must be >= 1");
  if (!(cfg.strip_T_max >= 0.0))
    throw ConfigError(map.origin + ": key 'strip.T_max' must be >= 0");
  if (cfg.action_orientation != 1.0 && cfg.action_orientation != -1.0)
    throw ConfigError(map.origin + ": key 'action.orientation' must be +1 or -1");
  if (cfg.density_kind != "gp" && cfg.density_kind != "linear" &&
      cfg.density_kind != "custom-table")
    throw ConfigError(map.origin + ": key 'density.kind' must be gp, linear or custom-table");
  if (cfg.density_kind == "custom-table" && cfg.density_table_path.empty())
    throw ConfigError(map.origin + ": density.kind=custom-table requires density.table");
  if (cfg.kernel_profile != "geometric" && cfg.kernel_profile != "constant")
    throw ConfigError(map.origin + ": key 'kernel.profile' must be geometric or constant");
  return cfg;
}

Kernel RunConfig::make_kernel() const {
  const DecayProfile profile = kernel_profile == "constant"
                                   ? DecayProfile::constant(kernel_amplitude)
                                   : DecayProfile::geometric(kernel_amplitude, kernel_ratio);
  return make_admissible_kernel(kernel_delta, kernel_support, profile);
}

DensityModel RunConfig::make_density() const {
  if (density_kind == "gp") return DensityModel::gp(density_coupling, density_potential);
  if (density_kind == "linear") return DensityModel::linear(density_coupling);
  std::ifstream in(density_table_path);
  if (!in) throw ConfigError("cannot read density table '" + density_table_path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return DensityModel::from_table(DensityTable::from_json(ss.str()));
  } catch (const std::invalid_argument& e) {
    throw ConfigError("density table '" + density_table_path + "': " + e.what());
  }
}

HamiltonianSystem RunConfig::make_system() const {
  return nlsfp::make_system(make_kernel(), make_density(), modes);
}

}  // namespace nlsfp
