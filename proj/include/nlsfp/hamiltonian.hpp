#pragma once

#include "nlsfp/density.hpp"
#include "nlsfp/grid_field.hpp"
#include "nlsfp/kernel.hpp"

#include <vector>

namespace nlsfp {

/// A truncation level of the Hamiltonian ladder: kernel psi^k, density f and
/// the run-wide field cap k. F_t(u) = 1/2 int f(|u*psi^k|^2, x, t) dx and
/// G_t = F_t o phi0_{-t}. All evaluations happen on the collocation grid of
/// size nx >= 4k+4, which keeps the quadrature and the gradient exact for
/// polynomial densities.
struct HamiltonianSystem {
  Kernel psi;               // truncated to <= modes
  DensityModel density;
  int modes = 0;            // field cut-off k
  int nx = 0;               // collocation size (power of two)

  // cached multipliers over n = -modes..modes
  std::vector<cdouble> conv_mult;  // 2pi psi_hat(n)
  std::vector<cdouble> adj_mult;   // 2pi conj(psi_hat(n))  (reflected kernel)
  std::vector<double> grid_x;      // collocation abscissae
  std::vector<double> cos_x;       // cos(x_j), for the gp potential
};

HamiltonianSystem make_system(const Kernel& psi, const DensityModel& density, int modes);

/// Same density and field cap, kernel truncated to level l (G^l of the ladder).
HamiltonianSystem level_system(const HamiltonianSystem& sys, int l);

/// Scratch buffers so the per-node evaluations allocate nothing. One per
/// thread; contents are meaningless between calls.
struct HamWorkspace {
  std::vector<cdouble> field;      // 2k+1
  std::vector<cdouble> grid;       // nx   (u * psi on the grid)
  std::vector<cdouble> grid2;      // nx
  double phase_t = 0.0;            // free-flow phase cache key
  bool phase_valid = false;
  std::vector<cdouble> phase_fwd;  // e^{+i t n^2}
  std::vector<cdouble> phase_bwd;  // e^{-i t n^2}
  void ensure(const HamiltonianSystem& sys);
};

namespace spanops {
double eval_F(const HamiltonianSystem& sys, std::span<const cdouble> u, double t, HamWorkspace& ws);
void grad_F(const HamiltonianSystem& sys, std::span<const cdouble> u, double t,
            std::span<cdouble> out, HamWorkspace& ws);
double eval_G(const HamiltonianSystem& sys, std::span<const cdouble> u, double t, HamWorkspace& ws);
void grad_G(const HamiltonianSystem& sys, std::span<const cdouble> u, double t,
            std::span<cdouble> out, HamWorkspace& ws);
/// X^G = i grad_G (the symplectic gradient).
void hamiltonian_field_G(const HamiltonianSystem& sys, std::span<const cdouble> u, double t,
                         std::span<cdouble> out, HamWorkspace& ws);
}  // namespace spanops

double eval_F(const HamiltonianSystem& sys, const FourierField& u, double t);
FourierField grad_F(const HamiltonianSystem& sys, const FourierField& u, double t);
FourierField X_F(const HamiltonianSystem& sys, const FourierField& u, double t);

double eval_G(const HamiltonianSystem& sys, const FourierField& u, double t);
FourierField grad_G(const HamiltonianSystem& sys, const FourierField& u, double t);
FourierField X_G(const HamiltonianSystem& sys, const FourierField& u, double t);

/// H0(u) = int |u_x|^2/2 dx = pi * sum n^2 |u(n)|^2; H0(u0_n) = n^2/2.
double eval_H0(const FourierField& u);

}  // namespace nlsfp
