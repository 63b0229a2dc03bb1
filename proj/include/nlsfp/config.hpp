#pragma once

#include "nlsfp/errors.hpp"
#include "nlsfp/hamiltonian.hpp"

#include <cstdint>
#include <map>
#include <string>

namespace nlsfp {

/// Flat dotted-key configuration file: `key = value` lines, '#' comments.
/// Unknown keys are reported (they usually mean a typo); parse and type
/// errors carry file:line diagnostics.
struct ConfigMap {
  std::string origin;
  std::map<std::string, std::string> values;
  std::map<std::string, int> lines;

  bool has(const std::string& key) const { return values.count(key) != 0; }
  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;

  /// FNV-1a over the sorted canonical "key=value" lines.
  std::uint64_t hash() const;
};

ConfigMap parse_config_text(const std::string& text, const std::string& origin);
ConfigMap parse_config_file(const std::string& path);

/// Materialized run parameters (defaults documented in the README).
struct RunConfig {
  int modes = 8;
  double dt = 1e-3;
  std::uint64_t seed = 20240901;
  int threads = 0;

  double kernel_delta = 0.1;
  std::string kernel_profile = "geometric";
  double kernel_amplitude = 0.2;
  double kernel_ratio = 0.5;
  int kernel_support = 8;

  std::string density_kind = "gp";   // gp | linear | custom-table
  double density_coupling = 0.05;
  double density_potential = 0.05;
  std::string density_table_path;

  int strip_Ns = 200;
  int strip_Nt = 32;
  double strip_T_max = 20.0;
  int strip_steps = 20;
  double strip_margin = 5.0;
  double strip_tol = 1e-8;
  double strip_min_step = 0.0;
  int strip_max_cg = 400;
  std::string strip_resume;

  int hofer_nodes = 8;
  int hofer_starts = 32;
  double hofer_grad_tol = 1e-9;
  int hofer_max_iterations = 5000;

  double refine_tol = 1e-9;
  int refine_max_iterations = 30;

  double action_orientation = -1.0;

  int verify_samples = 200;

  static RunConfig from(const ConfigMap& map);

  Kernel make_kernel() const;
  DensityModel make_density() const;
  HamiltonianSystem make_system() const;
};

/// Keys accepted by RunConfig::from; anything else is flagged.
bool is_known_config_key(const std::string& key);

}  // namespace nlsfp
