#include "nlsfp/fourier_field.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <stdexcept>

namespace nlsfp {

using json = nlohmann::json;

FourierField FourierField::unit_mode(int n, int k) {
  if (std::abs(n) > k) throw std::invalid_argument("unit_mode: |n| exceeds mode cut-off");
  FourierField u(k);
  u.ref(n) = 1.0 / std::sqrt(kTwoPi);
  return u;
}

namespace spanops {

double norm2_sq(std::span<const cdouble> u) {
  double s = 0.0;
  for (const cdouble& z : u) s += std::norm(z);
  return kTwoPi * s;
}

cdouble cdot(std::span<const cdouble> u, std::span<const cdouble> v) {
  cdouble s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += std::conj(u[i]) * v[i];
  return kTwoPi * s;
}

void free_flow_inplace(double t, int modes, std::span<cdouble> u) {
  for (int n = -modes; n <= modes; ++n) {
    const double phase = t * static_cast<double>(n) * static_cast<double>(n);
    u[n + modes] *= cdouble(std::cos(phase), std::sin(phase));
  }
}

void project_tangent(std::span<const cdouble> u, std::span<cdouble> w) {
  // Remove the complex line through u: w -= <u,w>/<u,u> * u. This kills the
  // real span of {u, iu} in one step.
  const double uu = norm2_sq(u);
  if (uu == 0.0) return;
  const cdouble a = cdot(u, w) / uu;
  for (std::size_t i = 0; i < w.size(); ++i) w[i] -= a * u[i];
}

void normalize(std::span<cdouble> u) {
  const double n = std::sqrt(norm2_sq(u));
  if (n == 0.0) throw std::invalid_argument("normalize: zero field");
  const double inv = 1.0 / n;
  for (cdouble& z : u) z *= inv;
}

}  // namespace spanops

double l2_norm(const FourierField& u) { return std::sqrt(spanops::norm2_sq(u.c)); }

cdouble cdot(const FourierField& u, const FourierField& v) {
  if (u.modes == v.modes) return spanops::cdot(u.c, v.c);
  const int k = std::min(u.modes, v.modes);
  cdouble s = 0.0;
  for (int n = -k; n <= k; ++n) s += std::conj(u.at(n)) * v.at(n);
  return kTwoPi * s;
}

double rdot(const FourierField& u, const FourierField& v) { return cdot(u, v).real(); }

double omega_form(const FourierField& u, const FourierField& v) { return cdot(u, v).imag(); }

FourierField normalized(const FourierField& u) {
  FourierField out = u;
  spanops::normalize(out.c);
  return out;
}

FourierField scaled(const FourierField& u, cdouble z) {
  FourierField out = u;
  for (cdouble& w : out.c) w *= z;
  return out;
}

FourierField added(const FourierField& u, const FourierField& v, cdouble alpha) {
  const int k = std::max(u.modes, v.modes);
  FourierField out(k);
  for (int n = -k; n <= k; ++n) out.ref(n) = u.at(n) + alpha * v.at(n);
  return out;
}

double projective_distance(const FourierField& u, const FourierField& v) {
  const double nu = l2_norm(u);
  const double nv = l2_norm(v);
  if (nu == 0.0 || nv == 0.0) throw std::invalid_argument("projective_distance: zero field");
  const double cosang = std::min(1.0, std::abs(cdot(u, v)) / (nu * nv));
  return std::sqrt(std::max(0.0, 2.0 - 2.0 * cosang));
}

FourierField resized(const FourierField& u, int k) {
  FourierField out(k);
  const int m = std::min(k, u.modes);
  for (int n = -m; n <= m; ++n) out.ref(n) = u.at(n);
  return out;
}

std::string field_to_json(const FourierField& u) {
  json coeffs = json::array();
  for (const cdouble& z : u.c) coeffs.push_back({z.real(), z.imag()});
  json j = {{"version", 1}, {"k", u.modes}, {"coeffs", std::move(coeffs)}};
  return j.dump();
}

FourierField field_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("field_from_json: malformed JSON: ") + e.what());
  }
  if (!j.contains("version") || j["version"].get<int>() != 1)
    throw std::invalid_argument("field_from_json: unsupported version");
  const int k = j.at("k").get<int>();
  if (k < 0) throw std::invalid_argument("field_from_json: negative mode cut-off");
  const auto& coeffs = j.at("coeffs");
  if (static_cast<int>(coeffs.size()) != 2 * k + 1)
    throw std::invalid_argument("field_from_json: coeff count does not match k");
  FourierField u(k);
  for (int i = 0; i < 2 * k + 1; ++i)
    u.c[i] = cdouble(coeffs[i][0].get<double>(), coeffs[i][1].get<double>());
  return u;
}

}  // namespace nlsfp
