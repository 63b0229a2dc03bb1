#pragma once

#include "nlsfp/flow.hpp"
#include "nlsfp/strip_solver.hpp"

#include <string>
#include <vector>

namespace nlsfp {

/// t=0 node of the minimal-defect column of a finished continuation, plus
/// the strip-side action data needed to label the refined point.
struct Candidate {
  FourierField u;
  int mode_n = 0;
  int column = 0;
  double s = 0.0;
  double defect = 0.0;
  double action_strip = 0.0;  // A(s*) from the profile
  double ham_term = 0.0;      // phi_T(s*) int G dt part of A(s*)
  double T_source = 0.0;
};

Candidate extract_candidate(const HamiltonianSystem& sys, const ContinuationState& state,
                            double action_orientation = -1.0);

/// A fixed-point candidate seeded directly from a field (no strip): the
/// action components are anchored at n^2/2 plus the orbit Hamiltonian term.
Candidate candidate_from_field(const FourierField& u, int mode_n, double T_source = 0.0);

struct RefineOptions {
  double tol = 1e-9;        // residual ||phi_1(u) - lambda u||_2
  int max_iterations = 30;
  double cg_tol = 1e-12;
  int threads = 0;
};

/// A refined projective fixed point of the time-one map.
struct FixedPointRecord {
  FourierField u;
  int mode_n = 0;
  double residual = 0.0;
  cdouble lambda;             // <u, phi_1 u>/|<u, phi_1 u>|
  double action = 0.0;        // strip action with the Hamiltonian term re-evaluated
  double action_strip = 0.0;  // action at the extraction slice
  double action_drift = 0.0;  // action - action_strip (refinement displacement)
  double T_source = 0.0;
  bool distinct_from_trivial = true;
  std::vector<std::string> flags;
};

class RefineError : public NumericError {
 public:
  RefineError(const std::string& what, FourierField best_u, double best_res)
      : NumericError(what), best(std::move(best_u)), best_residual(best_res) {}
  FourierField best;
  double best_residual;
};

/// Newton on the gauge-fixed residual r(u) = phi_1(u) - lambda(u) u restricted
/// to the orthogonal complement of {u, iu}; the Jacobian columns come from
/// tangent_time_one and the projected normal equations are solved by CG.
FixedPointRecord refine_newton(const FlowSpec& spec, const Candidate& cand,
                               const RefineOptions& opts = {});

/// Sorts by action, flags pairs with |A_m - A_n| < pi as not separation
/// certified, and marks records within projective distance 1e-6 of a trivial
/// fixed point u0_m with psi_hat(m) = 0.
std::vector<FixedPointRecord> label_and_separate(std::vector<FixedPointRecord> records,
                                                 const HamiltonianSystem& sys);

/// [{n, action, residual, lambda:[re,im], coeffs:[[re,im],...], flags:[...],
///   action_strip, action_drift, T_source}, ...]
std::string catalog_to_json(const std::vector<FixedPointRecord>& records);

}  // namespace nlsfp
