#include "nlsfp/hamiltonian.hpp"

#include "nlsfp/dft.hpp"

#include <cmath>
#include <stdexcept>

namespace nlsfp {

HamiltonianSystem make_system(const Kernel& psi, const DensityModel& density, int modes) {
  if (modes < 0) throw std::invalid_argument("make_system: modes must be >= 0");
  HamiltonianSystem sys;
  sys.psi = truncate_kernel(psi, modes);
  sys.density = density;
  sys.modes = modes;
  sys.nx = collocation_size(modes);
  const int nc = 2 * modes + 1;
  sys.conv_mult.resize(nc);
  sys.adj_mult.resize(nc);
  for (int n = -modes; n <= modes; ++n) {
    const cdouble p = sys.psi.at(n);
    sys.conv_mult[n + modes] = kTwoPi * p;
    sys.adj_mult[n + modes] = kTwoPi * std::conj(p);
  }
  sys.grid_x.resize(sys.nx);
  sys.cos_x.resize(sys.nx);
  for (int j = 0; j < sys.nx; ++j) {
    sys.grid_x[j] = kTwoPi * j / sys.nx;
    sys.cos_x[j] = std::cos(sys.grid_x[j]);
  }
  return sys;
}

HamiltonianSystem level_system(const HamiltonianSystem& sys, int l) {
  if (l > sys.modes) throw std::invalid_argument("level_system: l must be <= modes");
  return make_system(truncate_kernel(sys.psi, l), sys.density, sys.modes);
}

void HamWorkspace::ensure(const HamiltonianSystem& sys) {
  const std::size_t nc = 2 * static_cast<std::size_t>(sys.modes) + 1;
  if (field.size() != nc) {
    field.resize(nc);
    phase_fwd.resize(nc);
    phase_bwd.resize(nc);
    phase_valid = false;
  }
  if (grid.size() != static_cast<std::size_t>(sys.nx)) {
    grid.resize(sys.nx);
    grid2.resize(sys.nx);
  }
}

namespace {

void ensure_phases(const HamiltonianSystem& sys, double t, HamWorkspace& ws) {
  if (ws.phase_valid && ws.phase_t == t) return;
  for (int n = -sys.modes; n <= sys.modes; ++n) {
    const double phase = t * static_cast<double>(n) * static_cast<double>(n);
    const cdouble z(std::cos(phase), std::sin(phase));
    ws.phase_fwd[n + sys.modes] = z;
    ws.phase_bwd[n + sys.modes] = std::conj(z);
  }
  ws.phase_t = t;
  ws.phase_valid = true;
}

// ws.grid <- (u * psi^k) on the collocation grid.
void convolved_to_grid(const HamiltonianSystem& sys, std::span<const cdouble> u, HamWorkspace& ws) {
  const int nx = sys.nx;
  const int k = sys.modes;
  std::fill(ws.grid.begin(), ws.grid.end(), cdouble{});
  for (int n = -k; n <= k; ++n) {
    const int bin = (n % nx + nx) % nx;
    ws.grid[bin] = sys.conv_mult[n + k] * u[n + k];
  }
  dft_inverse(nx, ws.grid.data(), ws.grid.data());
}

double quad_F(const HamiltonianSystem& sys, double t, HamWorkspace& ws) {
  const int nx = sys.nx;
  double acc = 0.0;
  switch (sys.density.kind) {
    case DensityModel::Kind::gp: {
      const double c = sys.density.coupling;
      const double amp = sys.density.potential * (1.0 + std::cos(kTwoPi * t));
      for (int j = 0; j < nx; ++j) {
        const double r = std::norm(ws.grid[j]);
        acc += 0.5 * c * r * r + amp * sys.cos_x[j] * r;
      }
      break;
    }
    case DensityModel::Kind::linear: {
      const double lam = sys.density.coupling;
      for (int j = 0; j < nx; ++j) acc += lam * std::norm(ws.grid[j]);
      break;
    }
    case DensityModel::Kind::table: {
      for (int j = 0; j < nx; ++j)
        acc += sys.density.f(std::norm(ws.grid[j]), sys.grid_x[j], t);
      break;
    }
  }
  return 0.5 * acc * kTwoPi / nx;
}

// ws.grid2 <- d1f(|Cu|^2, x, t) * (Cu) pointwise; expects ws.grid = Cu.
void multiplier_grid(const HamiltonianSystem& sys, double t, HamWorkspace& ws) {
  const int nx = sys.nx;
  switch (sys.density.kind) {
    case DensityModel::Kind::gp: {
      const double c = sys.density.coupling;
      const double amp = sys.density.potential * (1.0 + std::cos(kTwoPi * t));
      for (int j = 0; j < nx; ++j)
        ws.grid2[j] = (c * std::norm(ws.grid[j]) + amp * sys.cos_x[j]) * ws.grid[j];
      break;
    }
    case DensityModel::Kind::linear: {
      const double lam = sys.density.coupling;
      for (int j = 0; j < nx; ++j) ws.grid2[j] = lam * ws.grid[j];
      break;
    }
    case DensityModel::Kind::table: {
      for (int j = 0; j < nx; ++j)
        ws.grid2[j] = sys.density.d1f(std::norm(ws.grid[j]), sys.grid_x[j], t) * ws.grid[j];
      break;
    }
  }
}

}  // namespace

namespace spanops {

double eval_F(const HamiltonianSystem& sys, std::span<const cdouble> u, double t, HamWorkspace& ws) {
  ws.ensure(sys);
  convolved_to_grid(sys, u, ws);
  return quad_F(sys, t, ws);
}

void grad_F(const HamiltonianSystem& sys, std::span<const cdouble> u, double t,
            std::span<cdouble> out, HamWorkspace& ws) {
  ws.ensure(sys);
  const int nx = sys.nx;
  const int k = sys.modes;
  convolved_to_grid(sys, u, ws);
  multiplier_grid(sys, t, ws);
  dft_forward(nx, ws.grid2.data(), ws.grid2.data());
  const double inv = 1.0 / nx;
  for (int n = -k; n <= k; ++n) {
    const int bin = (n % nx + nx) % nx;
    out[n + k] = sys.adj_mult[n + k] * (ws.grid2[bin] * inv);
  }
}

double eval_G(const HamiltonianSystem& sys, std::span<const cdouble> u, double t, HamWorkspace& ws) {
  ws.ensure(sys);
  ensure_phases(sys, t, ws);
  const int nc = 2 * sys.modes + 1;
  for (int i = 0; i < nc; ++i) ws.field[i] = ws.phase_bwd[i] * u[i];
  convolved_to_grid(sys, ws.field, ws);
  return quad_F(sys, t, ws);
}

void grad_G(const HamiltonianSystem& sys, std::span<const cdouble> u, double t,
            std::span<cdouble> out, HamWorkspace& ws) {
  ws.ensure(sys);
  ensure_phases(sys, t, ws);
  const int nc = 2 * sys.modes + 1;
  for (int i = 0; i < nc; ++i) ws.field[i] = ws.phase_bwd[i] * u[i];
  grad_F(sys, ws.field, t, out, ws);
  for (int i = 0; i < nc; ++i) out[i] *= ws.phase_fwd[i];
}

void hamiltonian_field_G(const HamiltonianSystem& sys, std::span<const cdouble> u, double t,
                         std::span<cdouble> out, HamWorkspace& ws) {
  grad_G(sys, u, t, out, ws);
  for (cdouble& z : out) z *= cdouble(0.0, 1.0);
}

}  // namespace spanops

double eval_F(const HamiltonianSystem& sys, const FourierField& u, double t) {
  HamWorkspace ws;
  const FourierField v = u.modes == sys.modes ? u : resized(u, sys.modes);
  return spanops::eval_F(sys, v.c, t, ws);
}

FourierField grad_F(const HamiltonianSystem& sys, const FourierField& u, double t) {
  HamWorkspace ws;
  const FourierField v = u.modes == sys.modes ? u : resized(u, sys.modes);
  FourierField out(sys.modes);
  spanops::grad_F(sys, v.c, t, out.c, ws);
  return out;
}

FourierField X_F(const HamiltonianSystem& sys, const FourierField& u, double t) {
  return scaled(grad_F(sys, u, t), cdouble(0.0, 1.0));
}

double eval_G(const HamiltonianSystem& sys, const FourierField& u, double t) {
  HamWorkspace ws;
  const FourierField v = u.modes == sys.modes ? u : resized(u, sys.modes);
  return spanops::eval_G(sys, v.c, t, ws);
}

FourierField grad_G(const HamiltonianSystem& sys, const FourierField& u, double t) {
  HamWorkspace ws;
  const FourierField v = u.modes == sys.modes ? u : resized(u, sys.modes);
  FourierField out(sys.modes);
  spanops::grad_G(sys, v.c, t, out.c, ws);
  return out;
}

FourierField X_G(const HamiltonianSystem& sys, const FourierField& u, double t) {
  return scaled(grad_G(sys, u, t), cdouble(0.0, 1.0));
}

double eval_H0(const FourierField& u) {
  double s = 0.0;
  for (int n = -u.modes; n <= u.modes; ++n)
    s += static_cast<double>(n) * n * std::norm(u.at(n));
  return 0.5 * kTwoPi * s;
}

}  // namespace nlsfp
