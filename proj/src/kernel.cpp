#include "nlsfp/kernel.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nlsfp {

using json = nlohmann::json;

namespace {
double admissibility_gap(int m) {
  const double m2 = static_cast<double>(m) * static_cast<double>(m);
  return 2.0 * std::abs(std::sin(0.5 * m2));
}
}  // namespace

std::vector<int> admissible_frequencies(double delta, int k) {
  if (!(delta > 0.0) || !(delta < 2.0))
    throw std::invalid_argument("admissible_frequencies: delta must lie in (0,2)");
  if (k < 0) throw std::invalid_argument("admissible_frequencies: k must be >= 0");
  std::vector<int> out;
  for (int m = -k; m <= k; ++m)
    if (admissibility_gap(m) >= delta) out.push_back(m);
  return out;
}

DecayProfile DecayProfile::geometric(double a, double rho) {
  return DecayProfile{[a, rho](int m) { return a * std::pow(rho, std::abs(m)); }};
}

DecayProfile DecayProfile::constant(double a) {
  return DecayProfile{[a](int) { return a; }};
}

Kernel make_admissible_kernel(double delta, int k, const DecayProfile& profile) {
  std::vector<int> allowed = admissible_frequencies(delta, k);
  if (allowed.empty())
    throw std::invalid_argument("no admissible frequencies at this k");
  Kernel psi;
  psi.modes = k;
  psi.c.assign(2 * static_cast<std::size_t>(k) + 1, cdouble{});
  psi.delta = delta;
  psi.allowed = std::move(allowed);
  for (int m : psi.allowed) {
    const double a = profile.amplitude(std::abs(m));
    if (!(a >= 0.0))
      throw std::invalid_argument("make_admissible_kernel: profile amplitude must be >= 0");
    psi.ref(m) = a;
  }
  return psi;
}

Kernel make_kernel_from_coeffs(double delta, const std::vector<cdouble>& coeffs) {
  if (coeffs.size() % 2 == 0)
    throw std::invalid_argument("make_kernel_from_coeffs: need an odd coefficient count");
  Kernel psi;
  psi.modes = static_cast<int>(coeffs.size() / 2);
  psi.c = coeffs;
  psi.delta = delta;
  for (int m = 0; m <= psi.modes; ++m) {
    const cdouble a = psi.at(m);
    const cdouble b = psi.at(-m);
    if (std::abs(a - std::conj(b)) > 1e-12 * (1.0 + std::abs(a)))
      throw std::invalid_argument("make_kernel_from_coeffs: coefficients are not Hermitian");
  }
  for (int m = -psi.modes; m <= psi.modes; ++m) {
    if (admissibility_gap(m) < delta && std::abs(psi.at(m)) != 0.0)
      throw std::invalid_argument("make_kernel_from_coeffs: nonzero coefficient at an inadmissible frequency");
  }
  psi.allowed = admissible_frequencies(delta, psi.modes);
  return psi;
}

Kernel truncate_kernel(const Kernel& psi, int k) {
  if (k < 0) throw std::invalid_argument("truncate_kernel: k must be >= 0");
  if (k >= psi.modes) return psi;
  Kernel out;
  out.modes = k;
  out.delta = psi.delta;
  out.c.assign(2 * static_cast<std::size_t>(k) + 1, cdouble{});
  for (int m = -k; m <= k; ++m) out.ref(m) = psi.at(m);
  out.allowed.clear();
  for (int m : psi.allowed)
    if (std::abs(m) <= k) out.allowed.push_back(m);
  return out;
}

double truncation_error_bound(const Kernel& psi, int k) {
  double s = 0.0;
  for (int m = -psi.modes; m <= psi.modes; ++m)
    if (std::abs(m) > k) s += std::norm(psi.at(m));
  return std::sqrt(kTwoPi * s);
}

FourierField convolve(const FourierField& u, const Kernel& psi) {
  const int k = std::min(u.modes, psi.modes);
  FourierField out(k);
  for (int n = -k; n <= k; ++n) out.ref(n) = kTwoPi * u.at(n) * psi.at(n);
  return out;
}

std::string kernel_to_json(const Kernel& psi) {
  json coeffs = json::array();
  for (const cdouble& z : psi.c) coeffs.push_back({z.real(), z.imag()});
  json j = {{"version", 1}, {"k", psi.modes}, {"coeffs", std::move(coeffs)}, {"delta", psi.delta}};
  return j.dump();
}

Kernel kernel_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("kernel_from_json: malformed JSON: ") + e.what());
  }
  if (!j.contains("version") || j["version"].get<int>() != 1)
    throw std::invalid_argument("kernel_from_json: unsupported version");
  const int k = j.at("k").get<int>();
  const auto& coeffs = j.at("coeffs");
  if (static_cast<int>(coeffs.size()) != 2 * k + 1)
    throw std::invalid_argument("kernel_from_json: coeff count does not match k");
  std::vector<cdouble> c(2 * static_cast<std::size_t>(k) + 1);
  for (int i = 0; i < 2 * k + 1; ++i)
    c[i] = cdouble(coeffs[i][0].get<double>(), coeffs[i][1].get<double>());
  return make_kernel_from_coeffs(j.at("delta").get<double>(), c);
}

}  // namespace nlsfp
