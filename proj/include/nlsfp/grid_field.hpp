#pragma once

#include "nlsfp/fourier_field.hpp"

#include <vector>

namespace nlsfp {

/// Collocation representation: samples over N_x equispaced points of
/// [0, 2pi), N_x a power of two >= 2(2k+1). Used for pointwise
/// nonlinearities; the spectral representation stays authoritative.
struct GridField {
  int nx = 0;
  std::vector<cdouble> samples;
};

/// Smallest valid collocation size for mode cut-off k. Uses N_x >= 4k+4 so
/// products like d1f(|u*psi|^2) * (u*psi) alias only outside |n| <= k.
int collocation_size(int k);

GridField to_grid(const FourierField& u, int nx);
FourierField to_spectrum(const GridField& g, int k);

namespace spanops {
/// samples[j] = sum_n u[n] exp(i n x_j), x_j = 2pi j / nx. Buffers must not alias.
void to_grid(std::span<const cdouble> u, int modes, std::span<cdouble> samples);
/// Reads back coefficients |n| <= modes from nx samples.
void to_spectrum(std::span<const cdouble> samples, int modes, std::span<cdouble> u);
}  // namespace spanops

}  // namespace nlsfp
