#include "nlsfp/strip_solver.hpp"

#include "nlsfp/dft.hpp"
#include "nlsfp/parallel.hpp"

#include <cmath>
#include <filesystem>
#include <numbers>
#include <sstream>

namespace nlsfp {

namespace {

using Vec = std::vector<cdouble>;

double real_dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    s += a[i].real() * b[i].real() + a[i].imag() * b[i].imag();
  return s;
}

double vec_norm(const Vec& a) { return std::sqrt(real_dot(a, a)); }

// Linearization of the projected residual with the tangent projector frozen
// at the current grid. apply(.., transpose=true) realizes the adjoint: the
// sign of D_s flips, i D_t and the (symmetric) Hessian action are reused
// verbatim, and the twisted fetches coincide by unitarity of the free flow.
struct StripLinearOp {
  const HamiltonianSystem& sys;
  const StripGrid& grid;
  std::vector<double> phi;       // per column
  std::vector<cdouble> twf, twb;
  double fd_step;
  int threads;

  StripLinearOp(const HamiltonianSystem& s, const StripGrid& g, double fd, int th)
      : sys(s), grid(g), twf(twist_phases(g.modes, 1.0)), twb(twist_phases(g.modes, -1.0)),
        fd_step(fd), threads(th) {
    const Cutoff cut(g.T);
    phi.resize(g.Ns);
    for (int j = 0; j < g.Ns; ++j) phi[j] = cut(g.s_at(j));
  }

  void apply(const Vec& in, Vec& out, bool transpose) const {
    out.assign(grid.data.size(), cdouble{});
    const int nc = grid.nc();
    const int Nt = grid.Nt;
    const double inv2ds = (transpose ? -0.5 : 0.5) / grid.ds();
    const double inv2dt = 0.5 / grid.dt();
    const int interior = grid.Ns - 2;

    parallel_for(interior, threads, [&](std::size_t b, std::size_t e) {
      HamWorkspace ws;
      std::vector<cdouble> acc(nc), hp(nc), hm(nc), pert(nc);
      for (std::size_t jj = b; jj < e; ++jj) {
        const int j = static_cast<int>(jj) + 1;
        const double w = phi[j];
        for (int m = 0; m < Nt; ++m) {
          auto u = grid.node(j, m);
          const std::size_t base = (static_cast<std::size_t>(j) * Nt + m) * nc;
          const cdouble* dnode = in.data() + base;

          // s-part; boundary columns hold zeros in `in`
          const cdouble* right = in.data() + ((static_cast<std::size_t>(j) + 1) * Nt + m) * nc;
          const cdouble* left = in.data() + ((static_cast<std::size_t>(j) - 1) * Nt + m) * nc;
          for (int i = 0; i < nc; ++i) acc[i] = (right[i] - left[i]) * inv2ds;

          // twisted i*D_t
          {
            const int mu = m + 1 < Nt ? m + 1 : 0;
            const int md = m - 1 >= 0 ? m - 1 : Nt - 1;
            const cdouble* up = in.data() + (static_cast<std::size_t>(j) * Nt + mu) * nc;
            const cdouble* dn = in.data() + (static_cast<std::size_t>(j) * Nt + md) * nc;
            const bool wrap_up = m + 1 >= Nt;
            const bool wrap_dn = m - 1 < 0;
            for (int i = 0; i < nc; ++i) {
              const cdouble a = wrap_up ? twf[i] * up[i] : up[i];
              const cdouble bb = wrap_dn ? twb[i] * dn[i] : dn[i];
              acc[i] += cdouble(0.0, 1.0) * (a - bb) * inv2dt;
            }
          }

          // Hessian action by a central difference of grad G along the node
          // direction (normalized so the probe size stays fd_step).
          if (w != 0.0) {
            double dn2 = 0.0;
            for (int i = 0; i < nc; ++i) dn2 += std::norm(dnode[i]);
            if (dn2 > 0.0) {
              const double dnorm = std::sqrt(kTwoPi * dn2);
              const double scale = fd_step / dnorm;
              const double t = grid.t_at(m);
              for (int i = 0; i < nc; ++i) pert[i] = u[i] + scale * dnode[i];
              spanops::grad_G(sys, pert, t, hp, ws);
              for (int i = 0; i < nc; ++i) pert[i] = u[i] - scale * dnode[i];
              spanops::grad_G(sys, pert, t, hm, ws);
              const double fac = w * dnorm / (2.0 * fd_step);
              for (int i = 0; i < nc; ++i) acc[i] += fac * (hp[i] - hm[i]);
            }
          }

          spanops::project_tangent(u, acc);
          std::copy(acc.begin(), acc.end(), out.begin() + base);
        }
      }
    });
  }
};

// Exact inverse of the normal operator of the frozen free part
// L0 = D_s + i D_t^twist with pinned boundary columns. Per coefficient mode
// nn the twisted shift diagonalizes after the phase ramp e^{i nn^2 m/Nt}; per
// t-frequency q the normal operator is B^T B + c^2 with
// c = sin((nn^2 + 2 pi q)/Nt)/dt, pentadiagonal in s and split into two
// parity chains solved by Thomas factorizations precomputed here.
class FreePreconditioner {
 public:
  FreePreconditioner(const StripGrid& g, int threads)
      : nc_(g.nc()), Nt_(g.Nt), M_(g.Ns - 2), threads_(threads) {
    const double inv4ds2 = 1.0 / (4.0 * g.ds() * g.ds());
    const double ridge = 1e-9 * (inv4ds2 + 1.0 / (g.dt() * g.dt()));
    ramp_.resize(static_cast<std::size_t>(nc_) * Nt_);
    for (int n = -g.modes; n <= g.modes; ++n) {
      const double nn2 = static_cast<double>(n) * n;
      for (int m = 0; m < Nt_; ++m) {
        const double ph = nn2 * m / Nt_;
        ramp_[(n + g.modes) * static_cast<std::size_t>(Nt_) + m] =
            cdouble(std::cos(ph), std::sin(ph));
      }
    }
    // Thomas factors per (mode, q, parity-chain)
    diag_.resize(static_cast<std::size_t>(nc_) * Nt_ * M_);
    upper_.assign(static_cast<std::size_t>(nc_) * Nt_ * M_, 0.0);
    for (int idx = 0; idx < nc_; ++idx) {
      const double nn2 = static_cast<double>(idx - g.modes) * (idx - g.modes);
      for (int q = 0; q < Nt_; ++q) {
        const double theta = (nn2 + kTwoPi * q) / Nt_;
        const double c = std::sin(theta) / g.dt();
        const double shift = c * c + ridge;
        double* dg = diag_.data() + (static_cast<std::size_t>(idx) * Nt_ + q) * M_;
        double* up = upper_.data() + (static_cast<std::size_t>(idx) * Nt_ + q) * M_;
        for (int parity = 0; parity < 2; ++parity) {
          double prev = 0.0;
          bool first = true;
          for (int p = parity; p < M_; p += 2) {
            // diag of B^T B: number of residual rows seeing column p
            const int nbrs = (p - 1 >= 0 ? 1 : 0) + (p + 1 < M_ ? 1 : 0);
            double d = nbrs * inv4ds2 + shift;
            if (!first) d -= (inv4ds2 * inv4ds2) * prev;  // -off^2 / d_prev
            dg[p] = 1.0 / d;
            up[p] = -inv4ds2;
            prev = dg[p];
            first = false;
          }
        }
      }
    }
  }

  // z = M^{-1} r (full grid layout; boundary columns ignored/zeroed)
  void apply(const StripGrid& g, const Vec& r, Vec& z) const {
    z.assign(r.size(), cdouble{});
    const int nc = nc_, Nt = Nt_, M = M_;
    scratch_.assign(static_cast<std::size_t>(nc) * Nt * M, cdouble{});

    // gather + unramp + DFT over m
    parallel_for(M, threads_, [&](std::size_t b, std::size_t e) {
      std::vector<cdouble> tmp(Nt), hat(Nt);
      for (std::size_t p = b; p < e; ++p) {
        const int j = static_cast<int>(p) + 1;
        for (int idx = 0; idx < nc; ++idx) {
          const cdouble* rphase = ramp_.data() + static_cast<std::size_t>(idx) * Nt;
          for (int m = 0; m < Nt; ++m)
            tmp[m] = std::conj(rphase[m]) * r[(static_cast<std::size_t>(j) * Nt + m) * nc + idx];
          dft_forward(Nt, tmp.data(), hat.data());
          for (int q = 0; q < Nt; ++q)
            scratch_[(static_cast<std::size_t>(idx) * Nt + q) * M + p] = hat[q];
        }
      }
    });

    // Thomas solves over s per (mode, q, parity)
    parallel_for(static_cast<std::size_t>(nc) * Nt, threads_, [&](std::size_t b, std::size_t e) {
      for (std::size_t chan = b; chan < e; ++chan) {
        cdouble* x = scratch_.data() + chan * M;
        const double* dg = diag_.data() + chan * M;  // inverted pivots 1/D_p
        const double* up = upper_.data() + chan * M;
        for (int parity = 0; parity < 2; ++parity) {
          int prev = -1;
          for (int p = parity; p < M; p += 2) {
            cdouble v = x[p];
            if (prev >= 0) v -= up[p] * x[prev];
            x[p] = v * dg[p];
            prev = p;
          }
          for (int p = prev - 2; p >= parity; p -= 2) x[p] -= up[p] * dg[p] * x[p + 2];
        }
      }
    });

    // scatter back: inverse DFT + ramp
    parallel_for(M, threads_, [&](std::size_t b, std::size_t e) {
      std::vector<cdouble> tmp(Nt), outv(Nt);
      const double invNt = 1.0 / Nt;
      for (std::size_t p = b; p < e; ++p) {
        const int j = static_cast<int>(p) + 1;
        for (int idx = 0; idx < nc; ++idx) {
          for (int q = 0; q < Nt; ++q)
            tmp[q] = scratch_[(static_cast<std::size_t>(idx) * Nt + q) * M + p];
          dft_inverse(Nt, tmp.data(), outv.data());
          const cdouble* rphase = ramp_.data() + static_cast<std::size_t>(idx) * Nt;
          for (int m = 0; m < Nt; ++m)
            z[(static_cast<std::size_t>(j) * Nt + m) * nc + idx] = rphase[m] * outv[m] * invNt;
        }
      }
    });

    // keep the preconditioned residual tangent
    const int interior = M;
    parallel_for(interior, threads_, [&](std::size_t b, std::size_t e) {
      for (std::size_t p = b; p < e; ++p) {
        const int j = static_cast<int>(p) + 1;
        for (int m = 0; m < Nt; ++m) {
          auto u = g.node(j, m);
          std::span<cdouble> zz{z.data() + (static_cast<std::size_t>(j) * Nt + m) * nc,
                                static_cast<std::size_t>(nc)};
          spanops::project_tangent(u, zz);
        }
      }
    });
  }

 private:
  int nc_, Nt_, M_, threads_;
  std::vector<cdouble> ramp_;
  std::vector<double> diag_;   // inverted pivots
  std::vector<double> upper_;  // off-diagonal (-1/(4 ds^2))
  mutable Vec scratch_;
};

}  // namespace

StripSolveInfo solve_strip(const HamiltonianSystem& sys, StripGrid& grid,
                           const StripSolveOptions& opts) {
  StripSolveInfo info;
  renormalize_and_align(grid);
  StripResidual R = residual(sys, grid, opts.threads);
  if (!std::isfinite(R.norm)) throw StripSolveError("solve_strip: non-finite residual", R.norm, 0);

  StripGrid best = grid;
  double best_norm = R.norm;

  const FreePreconditioner prec(grid, opts.threads);
  const int nc = grid.nc();
  const int Nt = grid.Nt;

  Vec b, z, p, Ap, Jp, x, r;
  for (info.iterations = 0; info.iterations < opts.max_iterations; ++info.iterations) {
    if (R.norm <= opts.tol) {
      info.converged = true;
      info.residual = R.norm;
      return info;
    }

    const StripLinearOp op(sys, grid, opts.fd_step, opts.threads);

    // normal equations: (J^T J) x = -J^T R
    op.apply(R.nodes, b, /*transpose=*/true);
    for (cdouble& v : b) v = -v;

    x.assign(b.size(), cdouble{});
    r = b;
    prec.apply(grid, r, z);
    p = z;
    double rz = real_dot(r, z);
    const double b_norm = vec_norm(b);
    int cg_it = 0;
    for (; cg_it < opts.max_cg; ++cg_it) {
      if (vec_norm(r) <= opts.cg_tol * b_norm || rz == 0.0) break;
      op.apply(p, Jp, false);
      op.apply(Jp, Ap, true);
      const double pAp = real_dot(p, Ap);
      if (!(pAp > 0.0)) break;
      const double alpha = rz / pAp;
      for (std::size_t i = 0; i < x.size(); ++i) x[i] += alpha * p[i];
      for (std::size_t i = 0; i < r.size(); ++i) r[i] -= alpha * Ap[i];
      prec.apply(grid, r, z);
      const double rz_new = real_dot(r, z);
      const double beta = rz_new / rz;
      rz = rz_new;
      for (std::size_t i = 0; i < p.size(); ++i) p[i] = z[i] + beta * p[i];
    }
    info.cg_total += cg_it;

    // damped update with per-node renormalization
    double alpha = 1.0;
    bool accepted = false;
    StripGrid trial = grid;
    for (int bt = 0; bt < opts.max_backtracks; ++bt) {
      for (int j = 1; j + 1 < grid.Ns; ++j) {
        for (int m = 0; m < Nt; ++m) {
          auto src = grid.node(j, m);
          auto dst = trial.node(j, m);
          const cdouble* dx = x.data() + (static_cast<std::size_t>(j) * Nt + m) * nc;
          for (int i = 0; i < nc; ++i) dst[i] = src[i] + alpha * dx[i];
          spanops::normalize(dst);
        }
      }
      StripResidual Rt = residual(sys, trial, opts.threads);
      if (std::isfinite(Rt.norm) && Rt.norm <= R.norm * (1.0 - 1e-4 * alpha)) {
        grid = trial;
        renormalize_and_align(grid);
        R = residual(sys, grid, opts.threads);
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (R.norm < best_norm) {
      best_norm = R.norm;
      best = grid;
    }
    if (!accepted) {
      grid = best;
      std::ostringstream msg;
      msg << "solve_strip: line search stalled at residual " << best_norm << " (tol " << opts.tol
          << ")";
      throw StripSolveError(msg.str(), best_norm, info.iterations);
    }
  }
  if (R.norm <= opts.tol) {
    info.converged = true;
    info.residual = R.norm;
    return info;
  }
  grid = best;
  std::ostringstream msg;
  msg << "solve_strip: iteration cap reached at residual " << best_norm << " (tol " << opts.tol
      << ")";
  throw StripSolveError(msg.str(), best_norm, info.iterations);
}

std::vector<double> make_uniform_schedule(double T_max, int steps) {
  if (!(T_max >= 0.0) || steps < 1)
    throw std::invalid_argument("make_uniform_schedule: need T_max >= 0 and steps >= 1");
  std::vector<double> ts;
  ts.reserve(steps + 1);
  for (int i = 0; i <= steps; ++i) ts.push_back(T_max * i / steps);
  return ts;
}

namespace {

ContinuationStep measure_step(const HamiltonianSystem& sys, const StripGrid& grid,
                              const StripSolveInfo& info, const ContinuationOptions& opts) {
  ContinuationStep rec;
  rec.T = grid.T;
  rec.iterations = info.iterations;
  rec.residual = info.residual;
  rec.energy = energy(sys, grid, opts.solve.threads);
  rec.defect_min = best_slice(sys, grid).defect;
  const auto profile = action_profile(sys, grid, opts.action_orientation);
  double amin = std::numeric_limits<double>::infinity();
  double amax = -amin;
  bool found = false;
  for (const auto& a : profile) {
    if (std::abs(a.s) > grid.T) continue;
    amin = std::min(amin, a.action);
    amax = std::max(amax, a.action);
    found = true;
  }
  if (!found) {
    // T below the grid spacing: report the column nearest s = 0
    std::size_t j0 = profile.size() / 2;
    for (std::size_t j = 0; j < profile.size(); ++j)
      if (std::abs(profile[j].s) < std::abs(profile[j0].s)) j0 = j;
    amin = amax = profile[j0].action;
  }
  rec.action_min = amin;
  rec.action_max = amax;
  return rec;
}

void maybe_snapshot(const StripGrid& grid, const std::string& dir) {
  if (dir.empty()) return;
  std::filesystem::create_directories(dir);
  std::ostringstream name;
  name << dir << "/strip_T" << grid.T << ".json";
  save_strip(grid, name.str());
  save_strip(grid, dir + "/latest.json");
}

}  // namespace

ContinuationState continue_in_T(const HamiltonianSystem& sys, int n, int Ns, int Nt,
                                double T_max, const ContinuationOptions& opts,
                                const std::optional<StripGrid>& resume) {
  if (std::abs(n) > sys.modes)
    throw std::invalid_argument("continue_in_T: |n| must be <= the mode cut-off");

  auto state = std::make_shared<ContinuationState>();

  {
    HoferOptions h = opts.hofer;
    const HoferEstimate est = hofer_norm(sys, HamiltonianPicture::G, h);
    state->hofer_G = est.value;
    state->hofer_hypothesis_ok = est.value < std::numbers::pi / 4.0;
    if (!state->hofer_hypothesis_ok) {
      std::ostringstream w;
      w << "theorem hypothesis violated: |||G^k||| estimate " << est.value << " >= pi/4";
      state->warnings.push_back(w.str());
    }
    if (!est.all_converged)
      state->warnings.push_back("hofer estimator: some inner optimizations did not converge");
  }

  const double That = std::min(2.0 * T_max, T_max + 1.0);
  const double S = That + opts.margin;
  if (resume) {
    state->grid = *resume;
    if (state->grid.mode_n != n || state->grid.Ns != Ns || state->grid.Nt != Nt ||
        state->grid.modes != sys.modes)
      throw ConfigError("continue_in_T: resume snapshot does not match the requested run");
  } else {
    state->grid = make_constant_strip(sys.modes, n, Ns, Nt, S, 0.0);
  }

  std::vector<double> schedule = opts.schedule.empty()
                                     ? make_uniform_schedule(T_max, 20)
                                     : opts.schedule;
  std::sort(schedule.begin(), schedule.end());
  const double min_step = opts.min_step > 0.0 ? opts.min_step
                                              : std::max(T_max, 1.0) / (64.0 * schedule.size());

  double current = state->grid.T;
  StripGrid last_good = state->grid;

  // T = current (the seed) is solved too, so the T=0 record exists.
  if (!resume) {
    StripSolveInfo info = solve_strip(sys, state->grid, opts.solve);
    state->steps.push_back(measure_step(sys, state->grid, info, opts));
    maybe_snapshot(state->grid, opts.snapshot_dir);
    last_good = state->grid;
  }

  for (double target : schedule) {
    if (target <= current + 1e-12) continue;
    double step = target - current;
    while (current < target - 1e-12) {
      const double trial_T = std::min(target, current + step);
      state->grid.T = trial_T;
      try {
        StripSolveInfo info = solve_strip(sys, state->grid, opts.solve);
        current = trial_T;
        last_good = state->grid;
        state->steps.push_back(measure_step(sys, state->grid, info, opts));
        maybe_snapshot(state->grid, opts.snapshot_dir);
        step = std::min(2.0 * step, target - current);
      } catch (const StripSolveError& err) {
        state->grid = last_good;
        step *= 0.5;
        if (step < min_step) {
          std::ostringstream msg;
          msg << "continue_in_T: step fell below " << min_step << " at T = " << current << " ("
              << err.what() << ")";
          throw ContinuationError(msg.str(), state);
        }
      }
    }
  }
  return *state;
}

}  // namespace nlsfp
