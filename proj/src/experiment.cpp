#include "nlsfp/experiment.hpp"

#include "nlsfp/flow.hpp"
#include "nlsfp/strip_solver.hpp"

#include <nlohmann/json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace nlsfp {

using json = nlohmann::json;
namespace fs = std::filesystem;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

void write_text(const std::string& path, const std::string& text) {
  fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  out << text;
  if (!out) throw ConfigError("failed writing '" + path + "'");
}

std::string read_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string join_path(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

HoferOptions hofer_options(const RunConfig& cfg) {
  HoferOptions h;
  h.time_nodes = cfg.hofer_nodes;
  h.multistarts = cfg.hofer_starts;
  h.grad_tol = cfg.hofer_grad_tol;
  h.max_iterations = cfg.hofer_max_iterations;
  h.seed = cfg.seed;
  h.threads = cfg.threads;
  return h;
}

ContinuationOptions continuation_options(const RunConfig& cfg, double T_max, int steps,
                                         double tol, const std::string& snapshot_dir) {
  ContinuationOptions opts;
  opts.schedule = make_uniform_schedule(T_max, steps);
  opts.margin = cfg.strip_margin;
  opts.min_step = cfg.strip_min_step;
  opts.action_orientation = cfg.action_orientation;
  opts.solve.tol = tol;
  opts.solve.max_cg = cfg.strip_max_cg;
  opts.solve.threads = cfg.threads;
  opts.hofer = hofer_options(cfg);
  opts.snapshot_dir = snapshot_dir;
  return opts;
}

std::string continuation_csv(const ContinuationState& state) {
  std::ostringstream csv;
  csv << "T,iterations,residual,energy,defect_min,action_min,action_max\n";
  for (const ContinuationStep& s : state.steps) {
    csv << format_double(s.T) << ',' << s.iterations << ',' << format_double(s.residual) << ','
        << format_double(s.energy) << ',' << format_double(s.defect_min) << ','
        << format_double(s.action_min) << ',' << format_double(s.action_max) << '\n';
  }
  return csv.str();
}

}  // namespace

ExperimentResult run_simulate(const RunConfig& cfg, const SimulateArgs& args,
                              const std::string& out_dir) {
  ExperimentResult res;
  RunConfig run = cfg;
  if (args.modes) run.modes = *args.modes;
  if (args.dt) run.dt = *args.dt;
  const double t1 = args.t1.value_or(1.0);

  const HamiltonianSystem sys = run.make_system();
  FourierField u = args.state_in.empty()
                       ? FourierField::unit_mode(std::min(1, run.modes), run.modes)
                       : resized(field_from_json(read_text(args.state_in)), run.modes);
  spanops::normalize(u.c);

  FlowSpec spec{sys, run.dt, 0.0, t1};
  const long long steps = validate_flow_spec(spec);

  std::ostringstream csv;
  csv << "t,norm,F,G,H0\n";
  HamWorkspace ws;
  auto emit = [&](double t, const FourierField& v) {
    csv << format_double(t) << ',' << format_double(l2_norm(v)) << ','
        << format_double(spanops::eval_F(sys, v.c, t, ws)) << ','
        << format_double(spanops::eval_G(sys, v.c, t, ws)) << ','
        << format_double(eval_H0(v)) << '\n';
  };
  emit(0.0, u);
  double drift = 0.0;
  FlowSpec leg = spec;
  for (long long i = 1; i <= steps; ++i) {
    leg.t0 = (i - 1) * run.dt;
    leg.t1 = i * run.dt;
    FlowResult r = flow_G(leg, u);
    u = std::move(r.u);
    drift = std::max(drift, r.max_norm_drift);
    emit(leg.t1, u);
  }

  const std::string obs = args.observables.empty() ? join_path(out_dir, "observables.csv")
                                                   : args.observables;
  write_text(obs, csv.str());
  res.artifacts.push_back(obs);
  if (!args.state_out.empty()) {
    write_text(args.state_out, field_to_json(u));
    res.artifacts.push_back(args.state_out);
  }
  return res;
}

ExperimentResult run_hofer(const RunConfig& cfg, const std::string& out_dir) {
  ExperimentResult res;
  const HamiltonianSystem sys = cfg.make_system();
  const HoferOptions opts = hofer_options(cfg);
  const HoferEstimate estF = hofer_norm(sys, HamiltonianPicture::F, opts);
  const HoferEstimate estG = hofer_norm(sys, HamiltonianPicture::G, opts);

  auto node_json = [](const HoferNode& n) {
    return json{{"t", n.t},
                {"weight", n.weight},
                {"max", n.max_value},
                {"min", n.min_value},
                {"max_converged", n.max_converged},
                {"min_converged", n.min_converged},
                {"max_iterations", n.max_iterations},
                {"min_iterations", n.min_iterations}};
  };
  json cert_f = json::array(), cert_g = json::array();
  for (const auto& n : estF.nodes) cert_f.push_back(node_json(n));
  for (const auto& n : estG.nodes) cert_g.push_back(node_json(n));

  const double pi4 = std::numbers::pi / 4.0;
  json out = {{"F", estF.value},
              {"G", estG.value},
              {"F_certificate", std::move(cert_f)},
              {"G_certificate", std::move(cert_g)},
              {"hypothesis_F_lt_pi_over_4", estF.value < pi4},
              {"hypothesis_G_lt_pi_over_4", estG.value < pi4}};
  if (!(estF.value < pi4) || !(estG.value < pi4))
    res.warnings.push_back("theorem hypothesis violated: Hofer estimate >= pi/4");
  if (!estF.all_converged || !estG.all_converged)
    res.warnings.push_back("hofer estimator: some inner optimizations did not converge");

  const std::string path = join_path(out_dir, "hofer.json");
  write_text(path, out.dump(2));
  res.artifacts.push_back(path);
  return res;
}

ExperimentResult run_strip(const RunConfig& cfg, const StripArgs& args,
                           const std::string& out_dir) {
  ExperimentResult res;
  const HamiltonianSystem sys = cfg.make_system();
  const int n = args.mode_n.value_or(1);
  const double T_max = args.T_max.value_or(cfg.strip_T_max);
  const int steps = args.steps.value_or(cfg.strip_steps);
  const int Ns = args.Ns.value_or(cfg.strip_Ns);
  const int Nt = args.Nt.value_or(cfg.strip_Nt);
  const double tol = args.tol.value_or(cfg.strip_tol);

  ContinuationOptions opts = continuation_options(cfg, T_max, steps, tol, args.snapshot_dir);

  std::optional<StripGrid> resume;
  const std::string resume_path = args.resume.empty() ? cfg.strip_resume : args.resume;
  if (!resume_path.empty()) resume = load_strip(resume_path);

  ContinuationState state;
  try {
    state = continue_in_T(sys, n, Ns, Nt, T_max, opts, resume);
  } catch (const ContinuationError& err) {
    // persist what was reached before propagating
    const std::string log = args.log_csv.empty() ? join_path(out_dir, "continuation.csv")
                                                 : args.log_csv;
    write_text(log, continuation_csv(*err.state));
    throw;
  }
  res.warnings = state.warnings;

  const std::string log = args.log_csv.empty() ? join_path(out_dir, "continuation.csv")
                                               : args.log_csv;
  write_text(log, continuation_csv(state));
  res.artifacts.push_back(log);

  const std::string snap = join_path(out_dir, "strip_final.json");
  save_strip(state.grid, snap);
  res.artifacts.push_back(snap);
  return res;
}

ExperimentResult run_fixedpoints(const RunConfig& cfg, const FixedPointsArgs& args,
                                 const std::string& out_dir) {
  ExperimentResult res;
  const HamiltonianSystem sys = cfg.make_system();
  const double T_max = args.T_max.value_or(cfg.strip_T_max);
  std::vector<int> modes_list = args.modes_list;
  if (modes_list.empty()) modes_list = {1};

  std::vector<FixedPointRecord> records;
  for (int n : modes_list) {
    ContinuationOptions opts =
        continuation_options(cfg, T_max, cfg.strip_steps, cfg.strip_tol, "");
    ContinuationState state = continue_in_T(sys, n, cfg.strip_Ns, cfg.strip_Nt, T_max, opts);
    for (const std::string& w : state.warnings) res.warnings.push_back(w);
    const Candidate cand = extract_candidate(sys, state, cfg.action_orientation);
    FlowSpec spec{sys, cfg.dt, 0.0, 1.0};
    RefineOptions ropts;
    ropts.tol = cfg.refine_tol;
    ropts.max_iterations = cfg.refine_max_iterations;
    ropts.threads = cfg.threads;
    records.push_back(refine_newton(spec, cand, ropts));
  }
  records = label_and_separate(std::move(records), sys);

  const std::string path = args.out_catalog.empty() ? join_path(out_dir, "catalog.json")
                                                    : args.out_catalog;
  write_text(path, catalog_to_json(records));
  res.artifacts.push_back(path);
  return res;
}

bool VerifyReport::all_pass() const {
  for (const CheckResult& c : checks)
    if (!c.pass) return false;
  return true;
}

std::string verify_report_json(const VerifyReport& report) {
  json checks = json::array();
  for (const CheckResult& c : report.checks)
    checks.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
  json j = {{"checks", std::move(checks)},
            {"warnings", report.warnings},
            {"all_pass", report.all_pass()}};
  return j.dump(2);
}

void write_manifest(const std::string& out_dir, const std::string& command,
                    const ConfigMap& config, std::uint64_t seed, double wall_clock_sec,
                    const ExperimentResult& result, const std::string& status,
                    const std::string& error_message) {
  char hash_hex[20];
  std::snprintf(hash_hex, sizeof(hash_hex), "%016llx",
                static_cast<unsigned long long>(config.hash()));
  json j = {{"version", "0.1.0"},
            {"command", command},
            {"config", config.origin},
            {"config_hash", hash_hex},
            {"seed", seed},
            {"wall_clock_sec", wall_clock_sec},
            {"artifacts", result.artifacts},
            {"warnings", result.warnings},
            {"status", status}};
  if (!error_message.empty()) j["error"] = error_message;
  write_text(join_path(out_dir, "manifest.json"), j.dump(2));
}

}  // namespace nlsfp
