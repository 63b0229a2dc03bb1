#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <string>
#include <vector>

namespace nlsfp {

using cdouble = std::complex<double>;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Truncated spectrum of a field on S^1 = R/2piZ with the convention
///   u(x) = sum_{|n|<=k} c(n) exp(i n x),
/// stored densely over n = -k..k. Out-of-range coefficients are zero by
/// definition. Immutable by convention once built; all operations below
/// are pure.
struct FourierField {
  int modes = 0;                 // k
  std::vector<cdouble> c;        // size 2k+1, index n+modes

  FourierField() = default;
  explicit FourierField(int k) : modes(k), c(2 * static_cast<std::size_t>(k) + 1) {}

  int size() const { return 2 * modes + 1; }
  cdouble at(int n) const { return (n < -modes || n > modes) ? cdouble{} : c[n + modes]; }
  cdouble& ref(int n) { return c[n + modes]; }

  /// Unit-sphere representative of the free fixed point [e^{inx}]:
  /// u0_n = e^{inx}/sqrt(2pi).
  static FourierField unit_mode(int n, int k);
};

namespace spanops {
// Hot-path versions on raw coefficient ranges (length 2k+1 each).
double norm2_sq(std::span<const cdouble> u);
cdouble cdot(std::span<const cdouble> u, std::span<const cdouble> v);
void free_flow_inplace(double t, int modes, std::span<cdouble> u);
/// Removes the real span of {u, iu} from w (tangent projection of the
/// projectivized sphere at a unit u).
void project_tangent(std::span<const cdouble> u, std::span<cdouble> w);
void normalize(std::span<cdouble> u);
}  // namespace spanops

/// L2 norm: sqrt(2pi * sum |c(n)|^2).
double l2_norm(const FourierField& u);

/// Complex inner product, conjugate-linear in the FIRST argument:
/// <u,v> = 2pi * sum conj(u(n)) v(n).
cdouble cdot(const FourierField& u, const FourierField& v);

/// Real inner product Re<u,v>.
double rdot(const FourierField& u, const FourierField& v);

/// Symplectic form omega(u,v) = <i u, v>_R = Im<u,v>.
double omega_form(const FourierField& u, const FourierField& v);

FourierField normalized(const FourierField& u);
FourierField scaled(const FourierField& u, cdouble z);
FourierField added(const FourierField& u, const FourierField& v, cdouble alpha = 1.0);

/// Chordal distance between projective points: for normalized representatives,
/// min_theta ||u - e^{i theta} v||_2 = sqrt(2 - 2|<u,v>|).
double projective_distance(const FourierField& u, const FourierField& v);

/// Restrict/extend to mode cut-off k (zero padding / truncation).
FourierField resized(const FourierField& u, int k);

/// {"version":1,"k":...,"coeffs":[[re,im],...]} ordered n=-k..k.
std::string field_to_json(const FourierField& u);
FourierField field_from_json(const std::string& text);

}  // namespace nlsfp
