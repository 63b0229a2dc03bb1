#pragma once

#include "nlsfp/hamiltonian.hpp"

namespace nlsfp {

/// Fixed-step RK4 integration plan over [t0, t1]. dt > 0; (t1-t0)/dt must be
/// an integer to rounding; t1 < t0 integrates backwards.
struct FlowSpec {
  HamiltonianSystem sys;
  double dt = 1e-3;
  double t0 = 0.0;
  double t1 = 1.0;
};

/// Number of steps (signed direction); throws std::invalid_argument on a bad spec.
long long validate_flow_spec(const FlowSpec& spec);

/// phi0_t: multiplies coefficient n by exp(+i t n^2). Exact.
FourierField free_flow(const FourierField& u, double t);

struct FlowResult {
  FourierField u;
  double max_norm_drift = 0.0;  // sup over steps of | ||u||_2 - 1 |
};

/// RK4 on du/dt = X^G_t(u). The sphere is monitored, not enforced: drift
/// beyond 1e-6 throws FlowError("integrator step too large").
FlowResult flow_G(const FlowSpec& spec, const FourierField& u0);

/// phi_1 = phi^G_1 o phi0_1 (t0=0, t1=1 regardless of spec.t0/t1).
FourierField time_one_map(const FlowSpec& spec, const FourierField& u);

/// D phi_1(u)[v]: exact linear free-flow tangent composed with RK4 on the
/// joint system (u, v), where DX^G(u)[v] is a central directional difference
/// of X^G with step 1e-6 along v/||v||.
FourierField tangent_time_one(const FlowSpec& spec, const FourierField& u, const FourierField& v);

/// Norm drift guard used by flow_G.
inline constexpr double kFlowDriftGuard = 1e-6;

}  // namespace nlsfp
