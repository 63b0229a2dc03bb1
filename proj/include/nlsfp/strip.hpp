#pragma once

#include "nlsfp/cutoff.hpp"
#include "nlsfp/hamiltonian.hpp"

#include <string>
#include <vector>

namespace nlsfp {

/// Discretized strip map u~: [-S,S] x [0,1] -> unit-sphere representatives.
/// Rows store t = 0, dt, ..., 1-dt only; the t=1 row is DEFINED as
/// free_flow(row 0, 1), so the twist boundary condition holds exactly by
/// construction. Columns s_j = -S + j*ds; the boundary columns j=0, Ns-1 are
/// pinned to the asymptote u0_n and are never unknowns.
struct StripGrid {
  int modes = 0;
  int Ns = 0;
  int Nt = 0;
  int mode_n = 0;
  double S = 0.0;
  double T = 0.0;
  std::vector<cdouble> data;  // ((j*Nt)+m)*(2modes+1) + (n+modes)

  int nc() const { return 2 * modes + 1; }
  double ds() const { return 2.0 * S / (Ns - 1); }
  double dt() const { return 1.0 / Nt; }
  double s_at(int j) const { return -S + j * ds(); }
  double t_at(int m) const { return m * dt(); }

  std::span<cdouble> node(int j, int m) {
    return {data.data() + (static_cast<std::size_t>(j) * Nt + m) * nc(),
            static_cast<std::size_t>(nc())};
  }
  std::span<const cdouble> node(int j, int m) const {
    return {data.data() + (static_cast<std::size_t>(j) * Nt + m) * nc(),
            static_cast<std::size_t>(nc())};
  }
};

StripGrid make_constant_strip(int modes, int n, int Ns, int Nt, double S, double T);

/// Twist phases used by the wrapped t-stencils: e^{+i n^2} per coefficient.
std::vector<cdouble> twist_phases(int modes, double sign);

struct StripResidual {
  std::vector<cdouble> nodes;  // layout of StripGrid.data; zero at boundary columns
  double norm = 0.0;           // sqrt( ds*dt * sum ||R||_2^2 )
};

/// R = Pi_u( D_s u + i D_t u + phi_T(s) grad G_t(u) ) at interior nodes,
/// central differences with the twisted wrap in t.
StripResidual residual(const HamiltonianSystem& sys, const StripGrid& grid, int threads = 0);

/// E = sum 1/2 ( |Pi D_s u|^2 + |Pi (D_t u - phi_T X^G(u))|^2 ) ds dt.
double energy(const HamiltonianSystem& sys, const StripGrid& grid, int threads = 0);

/// int_0^1 |Pi_u (D_t u - X^G_t(u))|^2 dt at column j (no cut-off factor:
/// this measures distance from a genuine Hamiltonian orbit, meaningful on
/// the plateau |s_j| <= T).
double slice_defect(const HamiltonianSystem& sys, const StripGrid& grid, int j);

struct BestSlice {
  int column = 0;
  double s = 0.0;
  double defect = 0.0;
};
/// argmin of slice_defect over plateau columns (|s_j| <= T; falls back to the
/// column nearest s = 0 when the plateau contains no grid column).
BestSlice best_slice(const HamiltonianSystem& sys, const StripGrid& grid);

struct ActionSample {
  double s = 0.0;
  double action = 0.0;
  double ham_term = 0.0;  // phi_T(s) * int_0^1 G_t(u(s,t)) dt
};
/// A(s) = n^2/2 + orientation * sum_{s'<=s} omega(Pi D_s, Pi D_t) ds dt
///        + phi_T(s) int_0^1 G_t dt, anchored at A(u0_n) = n^2/2.
/// orientation defaults to -1; see the config key action.orientation.
std::vector<ActionSample> action_profile(const HamiltonianSystem& sys, const StripGrid& grid,
                                         double orientation = -1.0);

struct NormalSplit {
  StripGrid tangential;          // modes = l, renormalized nodes
  std::vector<cdouble> normal;   // full layout, coefficients |n| <= l zeroed
  // d/ds energies of the raw orthogonal split (no tangent projection, no
  // renormalization), so energy_total = energy_tangential + energy_normal
  // holds exactly: E_s = sum |D_s .|^2 ds dt over interior columns.
  double energy_total = 0.0;
  double energy_tangential = 0.0;
  double energy_normal = 0.0;
};
/// Splits each node into its CP^{2l} part and the normal complement.
/// Requires the projection norm >= 0.5 at every node (tubular neighborhood);
/// violations name the offending node.
NormalSplit normal_split(const StripGrid& grid, int l);

/// Renormalizes every interior node and aligns the per-column phase gauge
/// left to right (phase chosen to maximize Re<column_{j-1}, column_j>).
void renormalize_and_align(StripGrid& grid);

/// Snapshot JSON:
/// {"version":1,"T":..,"S":..,"Ns":..,"Nt":..,"n":..,"k":..,
///  "rows":[[[re,im],...] per node, j-major then m]}
std::string strip_to_json(const StripGrid& grid);
StripGrid strip_from_json(const std::string& text, const std::string& origin = "snapshot");
void save_strip(const StripGrid& grid, const std::string& path);
StripGrid load_strip(const std::string& path);

}  // namespace nlsfp
