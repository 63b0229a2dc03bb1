#pragma once

#include "nlsfp/errors.hpp"
#include "nlsfp/hofer.hpp"
#include "nlsfp/strip.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace nlsfp {

struct StripSolveOptions {
  double tol = 1e-8;          // residual norm target
  int max_iterations = 60;    // Gauss-Newton iterations
  int max_cg = 400;           // PCG iterations per step
  double cg_tol = 0.05;       // relative normal-equation residual
  double fd_step = 1e-6;      // directional step for the Hessian action
  int max_backtracks = 16;
  int threads = 0;
};

struct StripSolveInfo {
  int iterations = 0;
  double residual = 0.0;
  int cg_total = 0;
  bool converged = false;
};

/// Carries the best grid seen (written back into the caller's grid) so the
/// continuation can shrink its step and retry.
class StripSolveError : public NumericError {
 public:
  StripSolveError(const std::string& what, double best, int iters)
      : NumericError(what), best_residual(best), iterations(iters) {}
  double best_residual;
  int iterations;
};

/// Damped Gauss-Newton on the stacked projected residual. The linear step
/// solves the normal equations by preconditioned CG with Jacobian action
/// assembled from the analytic stencils and a central-difference Hessian of
/// G; nodes are renormalized to the sphere and the column phase gauge is
/// re-aligned after every accepted step.
StripSolveInfo solve_strip(const HamiltonianSystem& sys, StripGrid& grid,
                           const StripSolveOptions& opts = {});

struct ContinuationStep {
  double T = 0.0;
  int iterations = 0;
  double residual = 0.0;
  double energy = 0.0;
  double defect_min = 0.0;
  double action_min = 0.0;
  double action_max = 0.0;
};

struct ContinuationState {
  StripGrid grid;
  std::vector<ContinuationStep> steps;
  double hofer_G = 0.0;            // |||G^k||| estimate used by the checks
  bool hofer_hypothesis_ok = true; // |||G^k||| < pi/4
  std::vector<std::string> warnings;
};

struct ContinuationOptions {
  std::vector<double> schedule;    // ascending, starting at 0
  double margin = 5.0;             // S = min(2 T_max, T_max + 1) + margin
  double min_step = 0.0;           // 0: T_max/steps/64
  double action_orientation = -1.0;
  StripSolveOptions solve;
  HoferOptions hofer;
  std::string snapshot_dir;        // empty: no snapshots
};

class ContinuationError : public NumericError {
 public:
  ContinuationError(const std::string& what, std::shared_ptr<ContinuationState> s)
      : NumericError(what), state(std::move(s)) {}
  std::shared_ptr<ContinuationState> state;  // full record for inspection
};

std::vector<double> make_uniform_schedule(double T_max, int steps);

/// Continuation in the cut-off parameter: starts from the constant strip at
/// T=0 (or `resume`), solves at each scheduled T reusing the previous
/// solution, bisecting the step on solver failure down to min_step. Records
/// energy, minimal slice defect and the action window at every accepted T.
/// The |||G^k||| < pi/4 hypothesis is estimated up front and recorded as a
/// warning if violated (the run continues).
ContinuationState continue_in_T(const HamiltonianSystem& sys, int n, int Ns, int Nt,
                                double T_max, const ContinuationOptions& opts,
                                const std::optional<StripGrid>& resume = std::nullopt);

}  // namespace nlsfp
