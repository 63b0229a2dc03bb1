#include "nlsfp/flow.hpp"

#include "nlsfp/errors.hpp"

#include <cmath>
#include <stdexcept>

namespace nlsfp {

namespace {
constexpr double kTangentFdStep = 1e-6;
}

long long validate_flow_spec(const FlowSpec& spec) {
  if (!(spec.dt > 0.0)) throw std::invalid_argument("FlowSpec: dt must be > 0");
  const double raw = (spec.t1 - spec.t0) / spec.dt;
  const double rounded = std::round(raw);
  if (std::abs(raw - rounded) > 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(raw)))
    throw std::invalid_argument("FlowSpec: (t1-t0)/dt is not an integer");
  return static_cast<long long>(rounded);
}

FourierField free_flow(const FourierField& u, double t) {
  FourierField out = u;
  spanops::free_flow_inplace(t, out.modes, out.c);
  return out;
}

namespace {

// One RK4 step of du/dt = X^G_t(u), h possibly negative.
void rk4_step(const HamiltonianSystem& sys, double t, double h, std::vector<cdouble>& u,
              HamWorkspace& ws, std::vector<cdouble>& k1, std::vector<cdouble>& k2,
              std::vector<cdouble>& k3, std::vector<cdouble>& k4, std::vector<cdouble>& tmp) {
  const std::size_t nc = u.size();
  spanops::hamiltonian_field_G(sys, u, t, k1, ws);
  for (std::size_t i = 0; i < nc; ++i) tmp[i] = u[i] + 0.5 * h * k1[i];
  spanops::hamiltonian_field_G(sys, tmp, t + 0.5 * h, k2, ws);
  for (std::size_t i = 0; i < nc; ++i) tmp[i] = u[i] + 0.5 * h * k2[i];
  spanops::hamiltonian_field_G(sys, tmp, t + 0.5 * h, k3, ws);
  for (std::size_t i = 0; i < nc; ++i) tmp[i] = u[i] + h * k3[i];
  spanops::hamiltonian_field_G(sys, tmp, t + h, k4, ws);
  const double h6 = h / 6.0;
  for (std::size_t i = 0; i < nc; ++i)
    u[i] += h6 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
}

}  // namespace

FlowResult flow_G(const FlowSpec& spec, const FourierField& u0) {
  const long long steps = validate_flow_spec(spec);
  const double h = steps >= 0 ? spec.dt : -spec.dt;
  const long long n = std::llabs(steps);

  FlowResult res;
  res.u = u0.modes == spec.sys.modes ? u0 : resized(u0, spec.sys.modes);
  const std::size_t nc = res.u.c.size();
  HamWorkspace ws;
  std::vector<cdouble> k1(nc), k2(nc), k3(nc), k4(nc), tmp(nc);

  double t = spec.t0;
  for (long long i = 0; i < n; ++i) {
    rk4_step(spec.sys, t, h, res.u.c, ws, k1, k2, k3, k4, tmp);
    t = spec.t0 + (i + 1) * h;
    const double drift = std::abs(std::sqrt(spanops::norm2_sq(res.u.c)) - 1.0);
    if (drift > res.max_norm_drift) res.max_norm_drift = drift;
    if (drift > kFlowDriftGuard)
      throw FlowError("integrator step too large", drift);
  }
  return res;
}

FourierField time_one_map(const FlowSpec& spec, const FourierField& u) {
  FlowSpec one = spec;
  one.t0 = 0.0;
  one.t1 = 1.0;
  return flow_G(one, free_flow(u, 1.0)).u;
}

FourierField tangent_time_one(const FlowSpec& spec, const FourierField& u, const FourierField& v) {
  FlowSpec one = spec;
  one.t0 = 0.0;
  one.t1 = 1.0;
  const long long steps = validate_flow_spec(one);
  const double h = one.dt;

  FourierField uu = free_flow(u.modes == spec.sys.modes ? u : resized(u, spec.sys.modes), 1.0);
  FourierField vv = free_flow(v.modes == spec.sys.modes ? v : resized(v, spec.sys.modes), 1.0);
  const std::size_t nc = uu.c.size();

  HamWorkspace ws;
  std::vector<cdouble> gp(nc), gm(nc), pert(nc);

  // DX^G(u)[v] by a central difference along the normalized direction.
  auto dx = [&](const std::vector<cdouble>& ub, const std::vector<cdouble>& vb, double t,
                std::vector<cdouble>& out) {
    const double nv = std::sqrt(spanops::norm2_sq(vb));
    if (nv == 0.0) {
      std::fill(out.begin(), out.end(), cdouble{});
      return;
    }
    const double scale = kTangentFdStep / nv;
    for (std::size_t i = 0; i < nc; ++i) pert[i] = ub[i] + scale * vb[i];
    spanops::hamiltonian_field_G(spec.sys, pert, t, gp, ws);
    for (std::size_t i = 0; i < nc; ++i) pert[i] = ub[i] - scale * vb[i];
    spanops::hamiltonian_field_G(spec.sys, pert, t, gm, ws);
    const double fac = nv / (2.0 * kTangentFdStep);
    for (std::size_t i = 0; i < nc; ++i) out[i] = fac * (gp[i] - gm[i]);
  };

  std::vector<cdouble> ku1(nc), ku2(nc), ku3(nc), ku4(nc);
  std::vector<cdouble> kv1(nc), kv2(nc), kv3(nc), kv4(nc);
  std::vector<cdouble> ut(nc), vt(nc);

  double t = 0.0;
  for (long long s = 0; s < steps; ++s) {
    spanops::hamiltonian_field_G(spec.sys, uu.c, t, ku1, ws);
    dx(uu.c, vv.c, t, kv1);
    for (std::size_t i = 0; i < nc; ++i) { ut[i] = uu.c[i] + 0.5 * h * ku1[i]; vt[i] = vv.c[i] + 0.5 * h * kv1[i]; }
    spanops::hamiltonian_field_G(spec.sys, ut, t + 0.5 * h, ku2, ws);
    dx(ut, vt, t + 0.5 * h, kv2);
    for (std::size_t i = 0; i < nc; ++i) { ut[i] = uu.c[i] + 0.5 * h * ku2[i]; vt[i] = vv.c[i] + 0.5 * h * kv2[i]; }
    spanops::hamiltonian_field_G(spec.sys, ut, t + 0.5 * h, ku3, ws);
    dx(ut, vt, t + 0.5 * h, kv3);
    for (std::size_t i = 0; i < nc; ++i) { ut[i] = uu.c[i] + h * ku3[i]; vt[i] = vv.c[i] + h * kv3[i]; }
    spanops::hamiltonian_field_G(spec.sys, ut, t + h, ku4, ws);
    dx(ut, vt, t + h, kv4);
    const double h6 = h / 6.0;
    for (std::size_t i = 0; i < nc; ++i) {
      uu.c[i] += h6 * (ku1[i] + 2.0 * ku2[i] + 2.0 * ku3[i] + ku4[i]);
      vv.c[i] += h6 * (kv1[i] + 2.0 * kv2[i] + 2.0 * kv3[i] + kv4[i]);
    }
    t = (s + 1) * h;
  }
  return vv;
}

}  // namespace nlsfp
