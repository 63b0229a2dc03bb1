#include "nlsfp/density.hpp"

#include "nlsfp/fourier_field.hpp"  // kTwoPi

#include <nlohmann/json.hpp>

#include <cmath>
#include <stdexcept>

namespace nlsfp {

using json = nlohmann::json;

namespace {

// Catmull-Rom weights for local coordinate s in [0,1).
inline void cr_weights(double s, double w[4]) {
  const double s2 = s * s, s3 = s2 * s;
  w[0] = 0.5 * (-s3 + 2 * s2 - s);
  w[1] = 0.5 * (3 * s3 - 5 * s2 + 2);
  w[2] = 0.5 * (-3 * s3 + 4 * s2 + s);
  w[3] = 0.5 * (s3 - s2);
}

inline void cr_dweights(double s, double w[4]) {
  const double s2 = s * s;
  w[0] = 0.5 * (-3 * s2 + 4 * s - 1);
  w[1] = 0.5 * (9 * s2 - 10 * s);
  w[2] = 0.5 * (-9 * s2 + 8 * s + 1);
  w[3] = 0.5 * (3 * s2 - 2 * s);
}

inline int wrap(int i, int n) { return ((i % n) + n) % n; }
inline int clampi(int i, int lo, int hi) { return i < lo ? lo : (i > hi ? hi : i); }

double eval_impl(const DensityTable& tab, double r, double x, double t, bool d1) {
  // r axis: clamped uniform grid on [0, r_max] with nr >= 2 points.
  const double hr = tab.r_max / (tab.nr - 1);
  double pr = r / hr;
  pr = std::min(std::max(pr, 0.0), static_cast<double>(tab.nr - 1));
  const int ir = clampi(static_cast<int>(pr), 0, tab.nr - 2);
  const double sr = pr - ir;

  // periodic axes
  double px = x / kTwoPi * tab.nx;
  px -= std::floor(px / tab.nx) * tab.nx;
  const int ix = static_cast<int>(px) % tab.nx;
  const double sx = px - std::floor(px);

  double pt = t * tab.nt;
  pt -= std::floor(pt / tab.nt) * tab.nt;
  const int it = static_cast<int>(pt) % tab.nt;
  const double st = pt - std::floor(pt);

  double wr[4], wx[4], wt[4];
  if (d1)
    cr_dweights(sr, wr);
  else
    cr_weights(sr, wr);
  cr_weights(sx, wx);
  cr_weights(st, wt);

  double acc = 0.0;
  for (int a = -1; a <= 2; ++a) {
    const int ra = clampi(ir + a, 0, tab.nr - 1);
    for (int b = -1; b <= 2; ++b) {
      const int xb = tab.nx == 1 ? 0 : wrap(ix + b, tab.nx);
      const double wxb = tab.nx == 1 ? (b == 0 ? 1.0 : 0.0) : wx[b + 1];
      if (wxb == 0.0) continue;
      for (int cidx = -1; cidx <= 2; ++cidx) {
        const int tc = tab.nt == 1 ? 0 : wrap(it + cidx, tab.nt);
        const double wtc = tab.nt == 1 ? (cidx == 0 ? 1.0 : 0.0) : wt[cidx + 1];
        if (wtc == 0.0) continue;
        acc += wr[a + 1] * wxb * wtc *
               tab.values[(static_cast<std::size_t>(ra) * tab.nx + xb) * tab.nt + tc];
      }
    }
  }
  return d1 ? acc / hr : acc;
}
}  // namespace

double DensityTable::eval(double r, double x, double t) const {
  return eval_impl(*this, r, x, t, false);
}

double DensityTable::eval_d1(double r, double x, double t) const {
  return eval_impl(*this, r, x, t, true);
}

DensityTable DensityTable::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("density table: malformed JSON: ") + e.what());
  }
  DensityTable t;
  t.r_max = j.at("r_max").get<double>();
  t.nr = j.at("nr").get<int>();
  t.nx = j.at("nx").get<int>();
  t.nt = j.at("nt").get<int>();
  if (t.nr < 2 || t.nx < 1 || t.nt < 1 || !(t.r_max > 0))
    throw std::invalid_argument("density table: need nr >= 2, nx,nt >= 1, r_max > 0");
  t.values = j.at("values").get<std::vector<double>>();
  if (t.values.size() != static_cast<std::size_t>(t.nr) * t.nx * t.nt)
    throw std::invalid_argument("density table: values size != nr*nx*nt");
  return t;
}

std::string DensityTable::to_json() const {
  json j = {{"version", 1}, {"r_max", r_max}, {"nr", nr}, {"nx", nx}, {"nt", nt}, {"values", values}};
  return j.dump();
}

double DensityModel::f(double r, double x, double t) const {
  switch (kind) {
    case Kind::gp: {
      const double V = potential * std::cos(x) * (1.0 + std::cos(kTwoPi * t));
      return 0.5 * coupling * r * r + V * r;
    }
    case Kind::linear:
      return coupling * r;
    case Kind::table:
      return table->eval(r, x, t);
  }
  return 0.0;
}

double DensityModel::d1f(double r, double x, double t) const {
  switch (kind) {
    case Kind::gp: {
      const double V = potential * std::cos(x) * (1.0 + std::cos(kTwoPi * t));
      return coupling * r + V;
    }
    case Kind::linear:
      return coupling;
    case Kind::table:
      return table->eval_d1(r, x, t);
  }
  return 0.0;
}

DensityModel DensityModel::gp(double c, double a) {
  DensityModel d;
  d.kind = Kind::gp;
  d.coupling = c;
  d.potential = a;
  return d;
}

DensityModel DensityModel::linear(double lambda) {
  DensityModel d;
  d.kind = Kind::linear;
  d.coupling = lambda;
  return d;
}

DensityModel DensityModel::from_table(DensityTable t) {
  DensityModel d;
  d.kind = Kind::table;
  d.table = std::make_shared<const DensityTable>(std::move(t));
  return d;
}

}  // namespace nlsfp
