#include "nlsfp/fixed_point.hpp"

#include "nlsfp/parallel.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace nlsfp {

using json = nlohmann::json;

namespace {

/// int_0^1 G_t(orbit(t)) dt along the G-flow trajectory of u (trapezoid over
/// the integrator grid).
double orbit_ham_term(const FlowSpec& spec, const FourierField& u) {
  FlowSpec one = spec;
  one.t0 = 0.0;
  one.t1 = 1.0;
  const long long steps = validate_flow_spec(one);
  HamWorkspace ws;
  FourierField cur = u.modes == spec.sys.modes ? u : resized(u, spec.sys.modes);
  double acc = 0.5 * spanops::eval_G(spec.sys, cur.c, 0.0, ws);
  FlowSpec leg = one;
  for (long long i = 1; i <= steps; ++i) {
    leg.t0 = (i - 1) * one.dt;
    leg.t1 = i * one.dt;
    cur = flow_G(leg, cur).u;
    const double g = spanops::eval_G(spec.sys, cur.c, leg.t1, ws);
    acc += (i == steps ? 0.5 : 1.0) * g;
  }
  return acc * one.dt;
}

}  // namespace

Candidate extract_candidate(const HamiltonianSystem& sys, const ContinuationState& state,
                            double action_orientation) {
  const StripGrid& grid = state.grid;
  const BestSlice bs = best_slice(sys, grid);
  Candidate cand;
  cand.u = FourierField(grid.modes);
  auto node = grid.node(bs.column, 0);
  std::copy(node.begin(), node.end(), cand.u.c.begin());
  spanops::normalize(cand.u.c);
  cand.mode_n = grid.mode_n;
  cand.column = bs.column;
  cand.s = bs.s;
  cand.defect = bs.defect;
  cand.T_source = grid.T;
  const auto profile = action_profile(sys, grid, action_orientation);
  cand.action_strip = profile[bs.column].action;
  cand.ham_term = profile[bs.column].ham_term;
  return cand;
}

Candidate candidate_from_field(const FourierField& u, int mode_n, double T_source) {
  Candidate cand;
  cand.u = normalized(u);
  cand.mode_n = mode_n;
  cand.T_source = T_source;
  cand.action_strip = 0.5 * mode_n * mode_n;
  cand.ham_term = 0.0;
  return cand;
}

namespace {

// Orthonormal real basis of the complement of {u, iu}: pivoted Gram-Schmidt
// over the canonical re/im coefficient directions.
std::vector<FourierField> gauge_complement_basis(const FourierField& u) {
  const int nc = u.size();
  const int dim = 2 * nc - 2;
  std::vector<FourierField> cands;
  cands.reserve(2 * nc);
  for (int i = 0; i < nc; ++i) {
    FourierField e(u.modes);
    e.c[i] = 1.0 / std::sqrt(kTwoPi);
    cands.push_back(e);
    e.c[i] = cdouble(0.0, 1.0 / std::sqrt(kTwoPi));
    cands.push_back(std::move(e));
  }
  const FourierField iu = scaled(u, cdouble(0.0, 1.0));
  auto deflate = [&](FourierField& v, const FourierField& w) {
    const double a = rdot(w, v);
    for (int i = 0; i < static_cast<int>(v.c.size()); ++i) v.c[i] -= a * w.c[i];
  };
  std::vector<FourierField> basis;
  basis.reserve(dim);
  std::vector<bool> used(cands.size(), false);
  for (int b = 0; b < dim; ++b) {
    int pick = -1;
    double best = -1.0;
    std::vector<FourierField> reduced(cands.size());
    for (std::size_t i = 0; i < cands.size(); ++i) {
      if (used[i]) continue;
      FourierField v = cands[i];
      deflate(v, u);
      deflate(v, iu);
      for (const auto& q : basis) deflate(v, q);
      const double norm = l2_norm(v);
      if (norm > best) {
        best = norm;
        pick = static_cast<int>(i);
        reduced[i] = std::move(v);
      }
    }
    if (pick < 0 || best < 1e-8)
      throw NumericError("refine_newton: gauge complement basis degenerate");
    used[pick] = true;
    FourierField v = reduced[pick];
    for (auto& z : v.c) z *= 1.0 / best;
    basis.push_back(std::move(v));
  }
  return basis;
}

// CG on the small dense normal equations A^T A x = A^T b.
std::vector<double> cg_normal(const std::vector<std::vector<double>>& A,
                              const std::vector<double>& b, double tol, int max_it) {
  const int m = static_cast<int>(A.size());     // rows
  const int n = m ? static_cast<int>(A[0].size()) : 0;
  auto matvec = [&](const std::vector<double>& v, std::vector<double>& out, bool trans) {
    if (!trans) {
      out.assign(m, 0.0);
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) out[i] += A[i][j] * v[j];
    } else {
      out.assign(n, 0.0);
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) out[j] += A[i][j] * v[i];
    }
  };
  std::vector<double> x(n, 0.0), r, tmp, p, Ap;
  matvec(b, r, true);  // r = A^T b
  const double b0 = std::sqrt(std::inner_product(r.begin(), r.end(), r.begin(), 0.0));
  p = r;
  double rr = b0 * b0;
  for (int it = 0; it < max_it && std::sqrt(rr) > tol * std::max(b0, 1e-300); ++it) {
    matvec(p, tmp, false);
    matvec(tmp, Ap, true);
    const double pAp = std::inner_product(p.begin(), p.end(), Ap.begin(), 0.0);
    if (!(pAp > 0.0)) break;
    const double alpha = rr / pAp;
    for (int j = 0; j < n; ++j) x[j] += alpha * p[j];
    for (int j = 0; j < n; ++j) r[j] -= alpha * Ap[j];
    const double rr_new = std::inner_product(r.begin(), r.end(), r.begin(), 0.0);
    const double beta = rr_new / rr;
    rr = rr_new;
    for (int j = 0; j < n; ++j) p[j] = r[j] + beta * p[j];
  }
  return x;
}

struct GaugeResidual {
  FourierField r;     // phi_1(u) - lambda u
  cdouble lambda;
  double norm;
  FourierField phiu;
};

GaugeResidual gauge_residual(const FlowSpec& spec, const FourierField& u) {
  GaugeResidual gr;
  gr.phiu = time_one_map(spec, u);
  cdouble mu = cdot(u, gr.phiu);
  gr.lambda = std::abs(mu) == 0.0 ? cdouble(1.0, 0.0) : mu / std::abs(mu);
  gr.r = added(gr.phiu, u, -gr.lambda);
  gr.norm = l2_norm(gr.r);
  return gr;
}

}  // namespace

FixedPointRecord refine_newton(const FlowSpec& spec, const Candidate& cand,
                               const RefineOptions& opts) {
  FourierField u = normalized(resized(cand.u, spec.sys.modes));
  GaugeResidual gr = gauge_residual(spec, u);
  FourierField best_u = u;
  double best_norm = gr.norm;
  int it = 0;
  int stale = 0;

  while (gr.norm > opts.tol && it < opts.max_iterations) {
    const auto basis = gauge_complement_basis(u);
    const int dim = static_cast<int>(basis.size());

    // columns Pi_W (Dphi_1(u)[q_i] - lambda q_i), in basis coordinates
    std::vector<std::vector<double>> A(dim, std::vector<double>(dim, 0.0));
    std::vector<FourierField> cols(dim);
    parallel_for(dim, opts.threads, [&](std::size_t b, std::size_t e) {
      for (std::size_t i = b; i < e; ++i)
        cols[i] = tangent_time_one(spec, u, basis[i]);
    });
    for (int i = 0; i < dim; ++i) {
      const FourierField col = added(cols[i], basis[i], -gr.lambda);
      for (int row = 0; row < dim; ++row) A[row][i] = rdot(basis[row], col);
    }
    std::vector<double> rhs(dim);
    for (int row = 0; row < dim; ++row) rhs[row] = -rdot(basis[row], gr.r);

    const std::vector<double> x = cg_normal(A, rhs, opts.cg_tol, 8 * dim);

    // damped Newton update on the sphere
    double alpha = 1.0;
    bool accepted = false;
    for (int bt = 0; bt < 12; ++bt) {
      FourierField trial = u;
      for (int i = 0; i < dim; ++i)
        trial = added(trial, basis[i], alpha * x[i]);
      spanops::normalize(trial.c);
      GaugeResidual gt = gauge_residual(spec, trial);
      if (gt.norm < gr.norm) {
        u = std::move(trial);
        gr = std::move(gt);
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    ++it;
    if (gr.norm < best_norm) {
      best_norm = gr.norm;
      best_u = u;
      stale = 0;
    } else {
      ++stale;
    }
    if (!accepted || stale >= 3) {
      std::ostringstream msg;
      msg << "refine_newton: stalled at residual " << best_norm << " after " << it
          << " iterations (tol " << opts.tol << ")";
      throw RefineError(msg.str(), best_u, best_norm);
    }
  }
  if (gr.norm > opts.tol) {
    std::ostringstream msg;
    msg << "refine_newton: iteration cap reached at residual " << best_norm << " (tol "
        << opts.tol << ")";
    throw RefineError(msg.str(), best_u, best_norm);
  }

  FixedPointRecord rec;
  rec.u = u;
  rec.mode_n = cand.mode_n;
  rec.residual = gr.norm;
  rec.lambda = gr.lambda;
  rec.T_source = cand.T_source;
  rec.action_strip = cand.action_strip;
  // transport: replace the slice Hamiltonian term by the refined orbit's
  rec.action = cand.action_strip - cand.ham_term + orbit_ham_term(spec, u);
  rec.action_drift = rec.action - rec.action_strip;
  return rec;
}

std::vector<FixedPointRecord> label_and_separate(std::vector<FixedPointRecord> records,
                                                 const HamiltonianSystem& sys) {
  std::sort(records.begin(), records.end(),
            [](const FixedPointRecord& a, const FixedPointRecord& b) { return a.action < b.action; });
  for (std::size_t i = 0; i < records.size(); ++i) {
    for (std::size_t j = i + 1; j < records.size(); ++j) {
      if (std::abs(records[i].action - records[j].action) < std::numbers::pi) {
        std::ostringstream fi, fj;
        fi << "separation-not-certified(n=" << records[j].mode_n << ")";
        fj << "separation-not-certified(n=" << records[i].mode_n << ")";
        records[i].flags.push_back(fi.str());
        records[j].flags.push_back(fj.str());
      }
    }
  }
  for (FixedPointRecord& rec : records) {
    for (int m = -sys.modes; m <= sys.modes; ++m) {
      if (std::abs(sys.psi.at(m)) != 0.0) continue;
      const FourierField u0 = FourierField::unit_mode(m, sys.modes);
      if (projective_distance(rec.u, u0) <= 1e-6) {
        std::ostringstream f;
        f << "trivial-coincident(m=" << m << ")";
        rec.flags.push_back(f.str());
        rec.distinct_from_trivial = false;
      }
    }
  }
  return records;
}

std::string catalog_to_json(const std::vector<FixedPointRecord>& records) {
  json arr = json::array();
  for (const FixedPointRecord& rec : records) {
    json coeffs = json::array();
    for (const cdouble& z : rec.u.c) coeffs.push_back({z.real(), z.imag()});
    arr.push_back({{"n", rec.mode_n},
                   {"action", rec.action},
                   {"residual", rec.residual},
                   {"lambda", {rec.lambda.real(), rec.lambda.imag()}},
                   {"coeffs", std::move(coeffs)},
                   {"flags", rec.flags},
                   {"action_strip", rec.action_strip},
                   {"action_drift", rec.action_drift},
                   {"T_source", rec.T_source},
                   {"distinct_from_trivial", rec.distinct_from_trivial}});
  }
  return arr.dump(2);
}

}  // namespace nlsfp
