#pragma once

#include "nlsfp/config.hpp"
#include "nlsfp/fixed_point.hpp"

#include <optional>
#include <string>
#include <vector>

namespace nlsfp {

/// Command-line overrides applied on top of the config file.
struct SimulateArgs {
  std::optional<int> modes;
  std::optional<double> dt;
  std::optional<double> t1;
  std::string state_in;       // field JSON; empty: u0_1
  std::string state_out;      // field JSON; empty: not written
  std::string observables;    // CSV path; empty: not written
};

struct StripArgs {
  std::optional<int> mode_n;
  std::optional<double> T_max;
  std::optional<int> steps;
  std::optional<int> Ns;
  std::optional<int> Nt;
  std::optional<double> tol;
  std::string snapshot_dir;
  std::string resume;
  std::string log_csv;        // continuation log; empty: <out>/continuation.csv
};

struct FixedPointsArgs {
  std::vector<int> modes_list;
  std::optional<double> T_max;
  std::string out_catalog;    // default <out>/catalog.json
};

struct ExperimentResult {
  std::vector<std::string> artifacts;
  std::vector<std::string> warnings;
};

ExperimentResult run_simulate(const RunConfig& cfg, const SimulateArgs& args,
                              const std::string& out_dir);
ExperimentResult run_hofer(const RunConfig& cfg, const std::string& out_dir);
ExperimentResult run_strip(const RunConfig& cfg, const StripArgs& args,
                           const std::string& out_dir);
ExperimentResult run_fixedpoints(const RunConfig& cfg, const FixedPointsArgs& args,
                                 const std::string& out_dir);

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct VerifyReport {
  std::vector<CheckResult> checks;
  std::vector<std::string> warnings;
  bool all_pass() const;
};

/// Invariant suites of all modules at config scale (verify.samples). Warns,
/// without failing, when the |||F||| < pi/4 theorem hypothesis is violated.
VerifyReport run_verify(const RunConfig& cfg);
std::string verify_report_json(const VerifyReport& report);

/// Writes <out>/manifest.json recording the command, config hash, seed,
/// wall-clock and produced artifacts. Timestamps live here, never in CSVs.
void write_manifest(const std::string& out_dir, const std::string& command,
                    const ConfigMap& config, std::uint64_t seed, double wall_clock_sec,
                    const ExperimentResult& result, const std::string& status,
                    const std::string& error_message = "");

/// "%.17g" so equal doubles print identically run to run.
std::string format_double(double v);

}  // namespace nlsfp
