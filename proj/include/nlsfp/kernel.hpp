#pragma once

#include "nlsfp/fourier_field.hpp"

#include <functional>
#include <vector>

namespace nlsfp {

/// Real smoothing kernel psi via Hermitian-symmetric Fourier coefficients,
/// with admissibility certificate: psi_hat(m) = 0 wherever
/// |exp(i m^2) - 1| < delta. `allowed` is M_delta intersected with the
/// stored mode range.
struct Kernel {
  int modes = 0;                 // k_psi
  std::vector<cdouble> c;        // size 2k+1, index m+modes
  double delta = 0.0;
  std::vector<int> allowed;      // sorted

  cdouble at(int m) const { return (m < -modes || m > modes) ? cdouble{} : c[m + modes]; }
  cdouble& ref(int m) { return c[m + modes]; }
};

/// M_delta within [-k, k]: all m with |exp(i m^2)-1| = 2|sin(m^2/2)| >= delta.
/// Requires 0 < delta < 2 (delta >= 2 would empty the set). The m^2/2
/// reduction happens inside sin(); accurate to ~1e-9 for |m| <= 1e6.
std::vector<int> admissible_frequencies(double delta, int k);

/// Per-frequency real amplitude a_m >= 0; only |m| is consulted, which
/// enforces Hermitian symmetry (psi real and even).
struct DecayProfile {
  std::function<double(int)> amplitude;  // of |m|
  static DecayProfile geometric(double a, double rho);
  static DecayProfile constant(double a);
};

/// psi_hat(m) = a_m on admissible_frequencies(delta, k), 0 elsewhere.
/// Throws std::invalid_argument("no admissible frequencies at this k")
/// if the allowed set is empty.
Kernel make_admissible_kernel(double delta, int k, const DecayProfile& profile);

/// Kernel with explicitly given coefficients; validates Hermitian symmetry
/// and the admissibility condition for the given delta.
Kernel make_kernel_from_coeffs(double delta, const std::vector<cdouble>& coeffs_neg_to_pos);

/// psi^k: coefficients with |m| <= k kept, others dropped. Admissibility is
/// preserved (zeroing cannot violate it).
Kernel truncate_kernel(const Kernel& psi, int k);

/// ||psi - psi^k||_2 = sqrt(2pi * sum_{|m|>k} |psi_hat(m)|^2). Multiplying by
/// ||u||_2 gives the uniform bound on ||u*psi - u*psi^k||_inf.
double truncation_error_bound(const Kernel& psi, int k);

/// Convolution on the circle: coefficient at n is 2pi * u(n) * psi_hat(n),
/// band-limited to min(u.modes, psi.modes).
FourierField convolve(const FourierField& u, const Kernel& psi);

/// Kernel JSON uses the field schema plus a "delta" key.
std::string kernel_to_json(const Kernel& psi);
Kernel kernel_from_json(const std::string& text);

}  // namespace nlsfp
