#include "nlsfp/experiment.hpp"
#include "nlsfp/flow.hpp"
#include "nlsfp/rng.hpp"
#include "nlsfp/strip_solver.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

namespace nlsfp {

namespace {

FourierField random_unit_field(const Rng& rng, std::uint64_t stream, int modes) {
  FourierField u(modes);
  for (int i = 0; i < u.size(); ++i)
    u.c[i] = cdouble(rng.normal(stream, 2 * i), rng.normal(stream, 2 * i + 1));
  spanops::normalize(u.c);
  return u;
}

struct Suite {
  VerifyReport report;
  void check(const std::string& name, bool pass, const std::string& detail = "") {
    report.checks.push_back({name, pass, detail});
  }
  template <typename Fn>
  void guarded(const std::string& name, Fn&& fn) {
    try {
      fn();
    } catch (const std::exception& e) {
      check(name + ".exception", false, e.what());
    }
  }
};

std::string num(double v) { return format_double(v); }

}  // namespace

VerifyReport run_verify(const RunConfig& cfg) {
  Suite s;
  const Rng rng(cfg.seed);
  const int samples = std::max(10, cfg.verify_samples);
  const HamiltonianSystem sys = cfg.make_system();
  const int k = sys.modes;

  // ---- spectral ----
  s.guarded("spectral", [&] {
    double worst = 0.0;
    for (int i = 0; i < samples; ++i) {
      const FourierField u = random_unit_field(rng, 1000 + i, k);
      const GridField g = to_grid(u, sys.nx);
      double acc = 0.0;
      for (const cdouble& z : g.samples) acc += std::norm(z);
      const double grid_norm = std::sqrt(acc * kTwoPi / g.nx);
      worst = std::max(worst, std::abs(grid_norm - l2_norm(u)) / l2_norm(u));
    }
    s.check("spectral.parseval", worst <= 1e-10, "max rel err " + num(worst));

    double worst_comm = 0.0;
    for (int i = 0; i < 20; ++i) {
      const FourierField u = random_unit_field(rng, 2000 + i, k);
      const double t = rng.uniform(2100, i) * 3.0;
      const FourierField a = convolve(free_flow(u, t), sys.psi);
      const FourierField b = free_flow(convolve(u, sys.psi), t);
      worst_comm = std::max(worst_comm, l2_norm(added(a, b, -1.0)));
    }
    s.check("spectral.convolve_freeflow_commute", worst_comm <= 1e-12, num(worst_comm));

    const auto big = admissible_frequencies(0.5, 64);
    const auto small = admissible_frequencies(0.1, 64);
    bool subset = true;
    for (int m : big)
      if (std::find(small.begin(), small.end(), m) == small.end()) subset = false;
    s.check("spectral.admissible_monotone", subset);

    FourierField psi_field(sys.psi.modes);
    psi_field.c = sys.psi.c;
    const GridField psig = to_grid(psi_field, collocation_size(sys.psi.modes));
    double kmax_im = 0.0;
    for (const cdouble& z : psig.samples) kmax_im = std::max(kmax_im, std::abs(z.imag()));
    s.check("spectral.kernel_real_on_grid", kmax_im <= 1e-12, num(kmax_im));

    const FourierField u = random_unit_field(rng, 2200, k);
    const FourierField rt = field_from_json(field_to_json(u));
    double rel = 0.0;
    for (int i = 0; i < u.size(); ++i)
      rel = std::max(rel, std::abs(u.c[i] - rt.c[i]) / std::max(1e-300, std::abs(u.c[i])));
    s.check("spectral.json_roundtrip", rel <= 1e-15, num(rel));
  });

  // ---- hamiltonian ----
  s.guarded("hamiltonian", [&] {
    double worst_perp = 0.0, worst_phase = 0.0;
    for (int i = 0; i < samples; ++i) {
      const FourierField u = random_unit_field(rng, 3000 + i, k);
      const double t = rng.uniform(3100, i);
      worst_perp = std::max(worst_perp, std::abs(rdot(u, X_F(sys, u, t))));
      const double th = rng.uniform(3200, i) * kTwoPi;
      worst_phase = std::max(
          worst_phase, std::abs(eval_F(sys, scaled(u, std::polar(1.0, th)), t) - eval_F(sys, u, t)));
    }
    s.check("hamiltonian.perpendicularity", worst_perp <= 1e-10, "max " + num(worst_perp));
    s.check("hamiltonian.phase_equivariance", worst_phase <= 1e-12, "max " + num(worst_phase));

    double worst_fd = 0.0;
    const double h = 1e-5;
    for (int i = 0; i < 20; ++i) {
      const FourierField u = random_unit_field(rng, 3300 + i, k);
      const FourierField v = random_unit_field(rng, 3400 + i, k);
      const double t = rng.uniform(3500, i);
      const double fd =
          (eval_F(sys, added(u, v, h), t) - eval_F(sys, added(u, v, -h), t)) / (2 * h);
      const double an = rdot(grad_F(sys, u, t), v);
      worst_fd = std::max(worst_fd, std::abs(fd - an) / std::max(1.0, std::abs(an)));
      const double fg =
          (eval_G(sys, added(u, v, h), t) - eval_G(sys, added(u, v, -h), t)) / (2 * h);
      const double ag = rdot(grad_G(sys, u, t), v);
      worst_fd = std::max(worst_fd, std::abs(fg - ag) / std::max(1.0, std::abs(ag)));
    }
    s.check("hamiltonian.gradient_fd", worst_fd <= 1e-6, "max rel " + num(worst_fd));

    double worst_conj = 0.0;
    for (int i = 0; i < 10; ++i) {
      const FourierField u = random_unit_field(rng, 3600 + i, k);
      const double t = rng.uniform(3700, i);
      const FourierField composed = free_flow(grad_F(sys, free_flow(u, -t), t), t);
      worst_conj = std::max(worst_conj, l2_norm(added(grad_G(sys, u, t), composed, -1.0)));
    }
    s.check("hamiltonian.grad_G_conjugation", worst_conj <= 1e-14, num(worst_conj));

    // eval_F sees only modes in supp(psi_hat)
    double worst_supp = 0.0;
    for (int i = 0; i < 10; ++i) {
      FourierField u = random_unit_field(rng, 3800 + i, k);
      const double f0 = eval_F(sys, u, 0.3);
      FourierField v = u;
      for (int n = -k; n <= k; ++n)
        if (std::abs(sys.psi.at(n)) == 0.0) v.ref(n) = 0.0;
      worst_supp = std::max(worst_supp, std::abs(eval_F(sys, v, 0.3) - f0));
    }
    s.check("hamiltonian.support_dependence", worst_supp <= 1e-14, num(worst_supp));

    // closed-form Hofer norm on the single-pair kernel
    {
      const double c = 0.1;
      const Kernel pair = make_admissible_kernel(0.5, 1, DecayProfile::constant(c));
      const HamiltonianSystem toy = make_system(pair, DensityModel::linear(1.0), 1);
      HoferOptions hopts;
      hopts.time_nodes = 1;
      hopts.multistarts = 8;
      hopts.seed = cfg.seed;
      hopts.threads = cfg.threads;
      const double expect = 2.0 * std::numbers::pi * std::numbers::pi * c * c;
      const HoferEstimate est = hofer_norm(toy, HamiltonianPicture::F, hopts);
      const double rel = std::abs(est.value - expect) / expect;
      s.check("hamiltonian.hofer_closed_form", rel <= 1e-6, "rel err " + num(rel));
    }

    // theorem hypothesis on the configured system: warn, do not fail
    {
      HoferOptions hopts;
      hopts.time_nodes = std::min(cfg.hofer_nodes, 4);
      hopts.multistarts = std::min(cfg.hofer_starts, 8);
      hopts.seed = cfg.seed;
      hopts.threads = cfg.threads;
      const HoferEstimate est = hofer_norm(sys, HamiltonianPicture::F, hopts);
      if (!(est.value < std::numbers::pi / 4.0)) {
        std::ostringstream w;
        w << "theorem hypothesis violated: |||F||| estimate " << est.value << " >= pi/4";
        s.report.warnings.push_back(w.str());
      }
      s.check("hamiltonian.hofer_estimator_ran", true, "F " + num(est.value));
    }
  });

  // ---- flow ----
  s.guarded("flow", [&] {
    const HamiltonianSystem zero = make_system(sys.psi, DensityModel::linear(0.0), k);
    FlowSpec fspec{zero, 0.25, 0.0, 1.0};
    double worst_mult = 0.0;
    for (int n = -k; n <= k; ++n) {
      const FourierField u0 = FourierField::unit_mode(n, k);
      const FourierField fx = time_one_map(fspec, u0);
      const cdouble lambda = cdot(u0, fx);
      const double n2 = static_cast<double>(n) * n;
      worst_mult = std::max(worst_mult,
                            std::abs(lambda - cdouble(std::cos(n2), std::sin(n2))));
      for (int m = -k; m <= k; ++m)
        if (m != n && std::abs(fx.at(m)) != 0.0) worst_mult = 1.0;
    }
    s.check("flow.free_multipliers", worst_mult <= 1e-14, "max err " + num(worst_mult));

    FlowSpec gspec{sys, cfg.dt, 0.0, 1.0};
    double worst_drift = 0.0, worst_rev = 0.0;
    for (int i = 0; i < 3; ++i) {
      const FourierField u = random_unit_field(rng, 4000 + i, k);
      const FlowResult fwd = flow_G(gspec, u);
      worst_drift = std::max(worst_drift, fwd.max_norm_drift);
      FlowSpec back{sys, cfg.dt, 1.0, 0.0};
      const FlowResult ret = flow_G(back, fwd.u);
      worst_rev = std::max(worst_rev, l2_norm(added(ret.u, u, -1.0)));
    }
    s.check("flow.norm_conservation", worst_drift <= 1e-10, "max drift " + num(worst_drift));
    s.check("flow.reversibility", worst_rev <= 1e-8, "max " + num(worst_rev));

    // tangent consistency and symplecticity on one sample
    {
      const FourierField u = random_unit_field(rng, 4100, k);
      const FourierField v = random_unit_field(rng, 4101, k);
      const FourierField w = random_unit_field(rng, 4102, k);
      const double h = 1e-5;
      const FourierField dv = tangent_time_one(gspec, u, v);
      const FourierField fd = scaled(
          added(time_one_map(gspec, added(u, v, h)), time_one_map(gspec, added(u, v, -h)), -1.0),
          1.0 / (2 * h));
      const double err = l2_norm(added(dv, fd, -1.0));
      s.check("flow.tangent_fd", err <= 5e-5, num(err));
      const FourierField dw = tangent_time_one(gspec, u, w);
      const double symp = std::abs(omega_form(dv, dw) - omega_form(v, w));
      s.check("flow.symplecticity", symp <= 1e-6, num(symp));
    }
  });

  // ---- floer ----
  s.guarded("floer", [&] {
    const int ktoy = std::min(2, k);
    const Kernel toy_kernel = truncate_kernel(sys.psi, ktoy);
    const HamiltonianSystem toy = make_system(toy_kernel, sys.density, ktoy);
    const HamiltonianSystem toy_free = make_system(toy_kernel, DensityModel::linear(0.0), ktoy);

    StripGrid grid = make_constant_strip(ktoy, 1, 41, 8, 6.0, 0.0);
    const StripResidual R0 = residual(toy, grid, cfg.threads);
    s.check("floer.constant_strip_T0", R0.norm <= 1e-12, num(R0.norm));

    bool anchor_exact = true;
    for (int n = 0; n <= std::min(8, ktoy); ++n) {
      StripGrid cg = make_constant_strip(ktoy, n, 41, 8, 6.0, 0.0);
      for (const ActionSample& a : action_profile(toy, cg, cfg.action_orientation))
        if (a.action != 0.5 * n * n) anchor_exact = false;
    }
    s.check("floer.action_anchor_exact", anchor_exact);

    // twist row is the free-flow image of row 0 by construction
    {
      const auto tw = twist_phases(ktoy, 1.0);
      FourierField row0(ktoy), rowN(ktoy);
      auto n0 = grid.node(10, 0);
      std::copy(n0.begin(), n0.end(), row0.c.begin());
      const FourierField f = free_flow(row0, 1.0);
      bool same = true;
      for (int i = 0; i < row0.size(); ++i)
        if (std::abs(f.c[i] - tw[i] * row0.c[i]) > 1e-15) same = false;
      s.check("floer.twist_consistency", same);
    }

    // f == 0: perturbed constant grid solves back to the constant strip
    {
      StripGrid noisy = make_constant_strip(ktoy, 1, 41, 8, 6.0, 1.0);
      for (int j = 1; j + 1 < noisy.Ns; ++j)
        for (int m = 0; m < noisy.Nt; ++m) {
          auto node = noisy.node(j, m);
          for (int i = 0; i < noisy.nc(); ++i)
            node[i] += 1e-3 * cdouble(rng.normal(5000 + j, 2 * (m * noisy.nc() + i)),
                                      rng.normal(5000 + j, 2 * (m * noisy.nc() + i) + 1));
          spanops::normalize(node);
        }
      StripSolveOptions sopts;
      sopts.tol = 1e-10;
      sopts.threads = cfg.threads;
      solve_strip(toy_free, noisy, sopts);
      double worst = 0.0;
      const FourierField u0 = FourierField::unit_mode(1, ktoy);
      FourierField node(ktoy);
      for (int j = 1; j + 1 < noisy.Ns; ++j)
        for (int m = 0; m < noisy.Nt; ++m) {
          auto nn = noisy.node(j, m);
          std::copy(nn.begin(), nn.end(), node.c.begin());
          worst = std::max(worst, projective_distance(node, u0));
        }
      s.check("floer.free_solve_to_constant", worst <= 1e-8, "max dist " + num(worst));

      const StripResidual R = residual(toy_free, noisy, cfg.threads);
      double gauge = 0.0;
      for (int j = 1; j + 1 < noisy.Ns; ++j)
        for (int m = 0; m < noisy.Nt; ++m) {
          auto nn = noisy.node(j, m);
          std::copy(nn.begin(), nn.end(), node.c.begin());
          FourierField r(ktoy);
          const std::size_t base = (static_cast<std::size_t>(j) * noisy.Nt + m) * noisy.nc();
          std::copy(R.nodes.begin() + base, R.nodes.begin() + base + noisy.nc(), r.c.begin());
          gauge = std::max(gauge, std::abs(rdot(scaled(node, cdouble(0, 1)), r)));
        }
      s.check("floer.residual_gauge_orthogonal", gauge <= 1e-10, num(gauge));
    }

    // snapshot round trip + corrupt snapshot diagnostics
    {
      const std::string tmp = (std::filesystem::temp_directory_path() / "nlsfp_verify_snap.json").string();
      save_strip(grid, tmp);
      const StripGrid back = load_strip(tmp);
      bool same = back.Ns == grid.Ns && back.Nt == grid.Nt && back.modes == grid.modes;
      double worst = 0.0;
      if (same)
        for (std::size_t i = 0; i < grid.data.size(); ++i)
          worst = std::max(worst, std::abs(grid.data[i] - back.data[i]));
      s.check("floer.snapshot_roundtrip", same && worst <= 1e-15, num(worst));

      std::ofstream bad(tmp);
      bad << "{\"version\":1, corrupted";
      bad.close();
      bool named = false;
      try {
        load_strip(tmp);
      } catch (const ConfigError& e) {
        named = std::string(e.what()).find(tmp) != std::string::npos;
      }
      s.check("floer.corrupt_snapshot_named", named);
      std::filesystem::remove(tmp);
    }

    // resume snapshot configured by the user: must load
    if (!cfg.strip_resume.empty()) {
      try {
        load_strip(cfg.strip_resume);
        s.check("floer.configured_resume_loads", true);
      } catch (const ConfigError& e) {
        s.check("floer.configured_resume_loads", false, e.what());
      }
    }
  });

  // ---- fixedpoint ----
  s.guarded("fixedpoint", [&] {
    const int ktoy = std::min(2, k);
    const HamiltonianSystem toy_free =
        make_system(truncate_kernel(sys.psi, ktoy), DensityModel::linear(0.0), ktoy);
    FlowSpec spec{toy_free, 0.25, 0.0, 1.0};
    std::vector<FixedPointRecord> records;
    double worst_res = 0.0;
    for (int n = -ktoy; n <= ktoy; ++n) {
      const Candidate cand = candidate_from_field(FourierField::unit_mode(n, ktoy), n);
      records.push_back(refine_newton(spec, cand));
      worst_res = std::max(worst_res, records.back().residual);
    }
    bool distinct = true;
    for (std::size_t i = 0; i < records.size(); ++i)
      for (std::size_t j = i + 1; j < records.size(); ++j)
        if (projective_distance(records[i].u, records[j].u) < 1e-3) distinct = false;
    s.check("fixedpoint.free_completeness", distinct && worst_res <= 1e-12,
            "2k+1 distinct records, max residual " + num(worst_res));

    const FixedPointRecord again =
        refine_newton(spec, candidate_from_field(records[2].u, records[2].mode_n));
    s.check("fixedpoint.idempotence",
            projective_distance(again.u, records[2].u) <= 1e-12);
  });

  // ---- cli / determinism ----
  s.guarded("cli", [&] {
    const ConfigMap a = parse_config_text("modes = 4\nseed = 7\n", "verify");
    const ConfigMap b = parse_config_text("seed = 7\nmodes = 4\n", "verify");
    s.check("cli.config_hash_order_independent", a.hash() == b.hash());
    const Rng r1(cfg.seed), r2(cfg.seed);
    bool det = true;
    for (int i = 0; i < 100; ++i)
      if (r1.uniform(42, i) != r2.uniform(42, i)) det = false;
    s.check("cli.rng_deterministic", det);
  });

  return s.report;
}

}  // namespace nlsfp
