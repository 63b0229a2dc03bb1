#include "nlsfp/grid_field.hpp"

#include "nlsfp/dft.hpp"

#include <stdexcept>

namespace nlsfp {

int collocation_size(int k) {
  int need = std::max(4 * k + 4, 2 * (2 * k + 1));
  int nx = 2;
  while (nx < need) nx *= 2;
  return nx;
}

namespace spanops {

void to_grid(std::span<const cdouble> u, int modes, std::span<cdouble> samples) {
  const int nx = static_cast<int>(samples.size());
  if (nx < 2 * (2 * modes + 1))
    throw std::invalid_argument("to_grid: N_x must be >= 2(2k+1)");
  std::fill(samples.begin(), samples.end(), cdouble{});
  for (int n = -modes; n <= modes; ++n) {
    const int bin = (n % nx + nx) % nx;
    samples[bin] = u[n + modes];
  }
  dft_inverse(nx, samples.data(), samples.data());
}

void to_spectrum(std::span<const cdouble> samples, int modes, std::span<cdouble> u) {
  const int nx = static_cast<int>(samples.size());
  if (nx < 2 * (2 * modes + 1))
    throw std::invalid_argument("to_spectrum: N_x must be >= 2(2k+1)");
  std::vector<cdouble> hat(nx);
  dft_forward(nx, samples.data(), hat.data());
  const double inv = 1.0 / nx;
  for (int n = -modes; n <= modes; ++n) {
    const int bin = (n % nx + nx) % nx;
    u[n + modes] = hat[bin] * inv;
  }
}

}  // namespace spanops

GridField to_grid(const FourierField& u, int nx) {
  if ((nx & (nx - 1)) != 0)
    throw std::invalid_argument("to_grid: N_x must be a power of two");
  GridField g;
  g.nx = nx;
  g.samples.resize(nx);
  spanops::to_grid(u.c, u.modes, g.samples);
  return g;
}

FourierField to_spectrum(const GridField& g, int k) {
  FourierField u(k);
  spanops::to_spectrum(g.samples, k, u.c);
  return u;
}

}  // namespace nlsfp
