#pragma once

#include <memory>
#include <string>
#include <vector>

namespace nlsfp {

/// f(r,x,t) sampled on a uniform (r,x,t) lattice; evaluated with Catmull-Rom
/// cubic interpolation, periodic in x (period 2pi) and t (period 1), clamped
/// in r to [0, r_max]. d1f differentiates the r-spline analytically.
struct DensityTable {
  double r_max = 1.0;
  int nr = 2, nx = 1, nt = 1;
  std::vector<double> values;  // index (ir*nx + ix)*nt + it

  double eval(double r, double x, double t) const;
  double eval_d1(double r, double x, double t) const;

  static DensityTable from_json(const std::string& text);
  std::string to_json() const;
};

/// Scalar density f(r,x,t) with its partial derivative in r; one-periodic
/// in t. r is fed |u*psi|^2 by the Hamiltonian module.
///
/// Built-ins:
///   gp     : f = coupling/2 * r^2 + V(t,x) * r,
///            V(t,x) = potential * cos(x) * (1 + cos(2 pi t))
///   linear : f = coupling * r
///   table  : cubic interpolation of a sampled lattice
struct DensityModel {
  enum class Kind { gp, linear, table };
  Kind kind = Kind::linear;
  double coupling = 0.0;    // c for gp, lambda for linear
  double potential = 0.0;   // gp potential amplitude a
  std::shared_ptr<const DensityTable> table;

  double f(double r, double x, double t) const;
  double d1f(double r, double x, double t) const;

  static DensityModel gp(double c, double a);
  static DensityModel linear(double lambda);
  static DensityModel from_table(DensityTable t);
};

}  // namespace nlsfp
