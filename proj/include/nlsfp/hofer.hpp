#pragma once

#include "nlsfp/hamiltonian.hpp"
#include "nlsfp/rng.hpp"

#include <vector>

namespace nlsfp {

enum class HamiltonianPicture { F, G };

struct HoferOptions {
  int time_nodes = 8;       // Gauss-Legendre nodes on [0,1]
  int multistarts = 32;     // random starts per extremum, on top of the u0_n starts
  double grad_tol = 1e-9;   // projected-gradient norm tolerance
  int max_iterations = 5000;
  std::uint64_t seed = 0;
  int threads = 0;
};

struct HoferNode {
  double t = 0.0;
  double weight = 0.0;
  double max_value = 0.0;
  double min_value = 0.0;
  bool max_converged = true;   // winning start met grad_tol
  bool min_converged = true;
  int max_iterations = 0;
  int min_iterations = 0;
  FourierField argmax;
  FourierField argmin;
};

/// |||H||| estimate: Gauss-Legendre in t of (max - min) over the unit sphere
/// modulo phase. Each extremum comes from projected-gradient ascent with
/// Armijo backtracking, seeded with every u0_n plus `multistarts` random
/// fields. A lower bound of the true Hofer norm by construction; `nodes` is
/// the audit certificate.
struct HoferEstimate {
  double value = 0.0;
  std::vector<HoferNode> nodes;
  bool all_converged = true;
};

HoferEstimate hofer_norm(const HamiltonianSystem& sys, HamiltonianPicture which,
                         const HoferOptions& opts);

/// Same estimator applied to the difference Hamiltonian G^k_t - G^l_t of the
/// truncation ladder (l <= k = sys.modes). Right side of the normal-energy
/// bound of the strip module.
HoferEstimate hofer_gap(const HamiltonianSystem& sys, int l, const HoferOptions& opts);

/// Gauss-Legendre nodes/weights on [0,1].
std::vector<std::pair<double, double>> gauss_legendre_01(int n);

}  // namespace nlsfp
