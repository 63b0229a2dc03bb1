#include "nlsfp/strip.hpp"

#include "nlsfp/errors.hpp"
#include "nlsfp/parallel.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace nlsfp {

using json = nlohmann::json;

StripGrid make_constant_strip(int modes, int n, int Ns, int Nt, double S, double T) {
  if (Ns < 5 || Nt < 2) throw std::invalid_argument("StripGrid: need Ns >= 5, Nt >= 2");
  if (std::abs(n) > modes) throw std::invalid_argument("StripGrid: |n| must be <= modes");
  if (!(S > 0.0)) throw std::invalid_argument("StripGrid: S must be > 0");
  StripGrid g;
  g.modes = modes;
  g.Ns = Ns;
  g.Nt = Nt;
  g.mode_n = n;
  g.S = S;
  g.T = T;
  g.data.assign(static_cast<std::size_t>(Ns) * Nt * (2 * modes + 1), cdouble{});
  const double amp = 1.0 / std::sqrt(kTwoPi);
  for (int j = 0; j < Ns; ++j)
    for (int m = 0; m < Nt; ++m) g.node(j, m)[n + modes] = amp;
  return g;
}

std::vector<cdouble> twist_phases(int modes, double sign) {
  std::vector<cdouble> out(2 * static_cast<std::size_t>(modes) + 1);
  for (int n = -modes; n <= modes; ++n) {
    const double phase = sign * static_cast<double>(n) * static_cast<double>(n);
    out[n + modes] = cdouble(std::cos(phase), std::sin(phase));
  }
  return out;
}

namespace {

// D_t with the twisted wrap: rows above Nt-1 and below 0 are the free-flow
// images of the opposite edge.
struct TwistStencil {
  const StripGrid& g;
  std::vector<cdouble> fwd, bwd;
  explicit TwistStencil(const StripGrid& grid)
      : g(grid), fwd(twist_phases(grid.modes, 1.0)), bwd(twist_phases(grid.modes, -1.0)) {}

  void d_t(int j, int m, std::span<cdouble> out) const {
    const int nc = g.nc();
    const double inv2dt = 0.5 / g.dt();
    if (m + 1 < g.Nt && m - 1 >= 0) {
      auto up = g.node(j, m + 1);
      auto dn = g.node(j, m - 1);
      for (int i = 0; i < nc; ++i) out[i] = (up[i] - dn[i]) * inv2dt;
      return;
    }
    auto up = m + 1 < g.Nt ? g.node(j, m + 1) : g.node(j, 0);
    auto dn = m - 1 >= 0 ? g.node(j, m - 1) : g.node(j, g.Nt - 1);
    const bool wrap_up = m + 1 >= g.Nt;
    const bool wrap_dn = m - 1 < 0;
    for (int i = 0; i < nc; ++i) {
      const cdouble a = wrap_up ? fwd[i] * up[i] : up[i];
      const cdouble b = wrap_dn ? bwd[i] * dn[i] : dn[i];
      out[i] = (a - b) * inv2dt;
    }
  }

  void d_s(int j, int m, std::span<cdouble> out) const {
    const int nc = g.nc();
    if (j > 0 && j + 1 < g.Ns) {
      const double inv2ds = 0.5 / g.ds();
      auto r = g.node(j + 1, m);
      auto l = g.node(j - 1, m);
      for (int i = 0; i < nc; ++i) out[i] = (r[i] - l[i]) * inv2ds;
    } else {
      // one-sided at the pinned columns (diagnostics only)
      const double invds = 1.0 / g.ds();
      auto a = g.node(j == 0 ? 1 : j, m);
      auto b = g.node(j == 0 ? 0 : j - 1, m);
      for (int i = 0; i < nc; ++i) out[i] = (a[i] - b[i]) * invds;
    }
  }
};

}  // namespace

StripResidual residual(const HamiltonianSystem& sys, const StripGrid& grid, int threads) {
  if (sys.modes != grid.modes)
    throw std::invalid_argument("residual: system and grid mode cut-offs differ");
  StripResidual R;
  R.nodes.assign(grid.data.size(), cdouble{});
  const TwistStencil st(grid);
  const Cutoff phi(grid.T);
  const int nc = grid.nc();
  const int Nt = grid.Nt;
  const int interior = grid.Ns - 2;

  parallel_for(interior, threads, [&](std::size_t b, std::size_t e) {
    HamWorkspace ws;
    std::vector<cdouble> dsv(nc), dtv(nc), gv(nc);
    for (std::size_t jj = b; jj < e; ++jj) {
      const int j = static_cast<int>(jj) + 1;
      const double w = phi(grid.s_at(j));
      for (int m = 0; m < Nt; ++m) {
        auto u = grid.node(j, m);
        st.d_s(j, m, dsv);
        st.d_t(j, m, dtv);
        std::span<cdouble> out{R.nodes.data() + (static_cast<std::size_t>(j) * Nt + m) * nc,
                               static_cast<std::size_t>(nc)};
        if (w != 0.0) {
          spanops::grad_G(sys, u, grid.t_at(m), gv, ws);
          for (int i = 0; i < nc; ++i)
            out[i] = dsv[i] + cdouble(0.0, 1.0) * dtv[i] + w * gv[i];
        } else {
          for (int i = 0; i < nc; ++i) out[i] = dsv[i] + cdouble(0.0, 1.0) * dtv[i];
        }
        spanops::project_tangent(u, out);
      }
    }
  });

  double acc = 0.0;
  for (int j = 1; j + 1 < grid.Ns; ++j)
    for (int m = 0; m < Nt; ++m)
      acc += spanops::norm2_sq({R.nodes.data() + (static_cast<std::size_t>(j) * Nt + m) * nc,
                                static_cast<std::size_t>(nc)});
  R.norm = std::sqrt(acc * grid.ds() * grid.dt());
  return R;
}

double energy(const HamiltonianSystem& sys, const StripGrid& grid, int threads) {
  const TwistStencil st(grid);
  const Cutoff phi(grid.T);
  const int nc = grid.nc();
  const int Nt = grid.Nt;
  const int interior = grid.Ns - 2;
  std::vector<double> col(interior, 0.0);

  parallel_for(interior, threads, [&](std::size_t b, std::size_t e) {
    HamWorkspace ws;
    std::vector<cdouble> dsv(nc), dtv(nc), xv(nc);
    for (std::size_t jj = b; jj < e; ++jj) {
      const int j = static_cast<int>(jj) + 1;
      const double w = phi(grid.s_at(j));
      double acc = 0.0;
      for (int m = 0; m < Nt; ++m) {
        auto u = grid.node(j, m);
        st.d_s(j, m, dsv);
        st.d_t(j, m, dtv);
        if (w != 0.0) {
          spanops::hamiltonian_field_G(sys, u, grid.t_at(m), xv, ws);
          for (int i = 0; i < nc; ++i) dtv[i] -= w * xv[i];
        }
        spanops::project_tangent(u, dsv);
        spanops::project_tangent(u, dtv);
        acc += 0.5 * (spanops::norm2_sq(dsv) + spanops::norm2_sq(dtv));
      }
      col[jj] = acc;
    }
  });

  double total = 0.0;
  for (double v : col) total += v;
  return total * grid.ds() * grid.dt();
}

double slice_defect(const HamiltonianSystem& sys, const StripGrid& grid, int j) {
  if (j < 0 || j >= grid.Ns) throw std::invalid_argument("slice_defect: column out of range");
  const TwistStencil st(grid);
  const int nc = grid.nc();
  HamWorkspace ws;
  std::vector<cdouble> dtv(nc), xv(nc);
  double acc = 0.0;
  for (int m = 0; m < grid.Nt; ++m) {
    auto u = grid.node(j, m);
    st.d_t(j, m, dtv);
    spanops::hamiltonian_field_G(sys, u, grid.t_at(m), xv, ws);
    for (int i = 0; i < nc; ++i) dtv[i] -= xv[i];
    spanops::project_tangent(u, dtv);
    acc += spanops::norm2_sq(dtv);
  }
  return acc * grid.dt();
}

BestSlice best_slice(const HamiltonianSystem& sys, const StripGrid& grid) {
  BestSlice best;
  best.defect = std::numeric_limits<double>::infinity();
  bool found = false;
  for (int j = 1; j + 1 < grid.Ns; ++j) {
    if (std::abs(grid.s_at(j)) > grid.T) continue;
    found = true;
    const double d = slice_defect(sys, grid, j);
    if (d < best.defect) {
      best.defect = d;
      best.column = j;
      best.s = grid.s_at(j);
    }
  }
  if (!found) {
    // plateau narrower than the grid spacing: fall back to the column
    // nearest s = 0
    int j0 = 1;
    for (int j = 1; j + 1 < grid.Ns; ++j)
      if (std::abs(grid.s_at(j)) < std::abs(grid.s_at(j0))) j0 = j;
    best.column = j0;
    best.s = grid.s_at(j0);
    best.defect = slice_defect(sys, grid, j0);
  }
  return best;
}

std::vector<ActionSample> action_profile(const HamiltonianSystem& sys, const StripGrid& grid,
                                         double orientation) {
  const TwistStencil st(grid);
  const Cutoff phi(grid.T);
  const int nc = grid.nc();
  const int Nt = grid.Nt;
  const double anchor = 0.5 * grid.mode_n * grid.mode_n;
  const double dsdt = grid.ds() * grid.dt();

  HamWorkspace ws;
  std::vector<cdouble> dsv(nc), dtv(nc);
  std::vector<ActionSample> out(grid.Ns);

  double accum = 0.0;
  for (int j = 0; j < grid.Ns; ++j) {
    ActionSample& a = out[j];
    a.s = grid.s_at(j);
    if (j > 0 && j + 1 < grid.Ns) {
      for (int m = 0; m < Nt; ++m) {
        auto u = grid.node(j, m);
        st.d_s(j, m, dsv);
        st.d_t(j, m, dtv);
        spanops::project_tangent(u, dsv);
        spanops::project_tangent(u, dtv);
        accum += spanops::cdot(dsv, dtv).imag() * dsdt;  // omega(D_s, D_t)
      }
    }
    const double w = phi(a.s);
    if (w != 0.0) {
      double gsum = 0.0;
      for (int m = 0; m < Nt; ++m)
        gsum += spanops::eval_G(sys, grid.node(j, m), grid.t_at(m), ws);
      a.ham_term = w * gsum * grid.dt();
    }
    a.action = anchor + orientation * accum + a.ham_term;
  }
  return out;
}

NormalSplit normal_split(const StripGrid& grid, int l) {
  if (l < 0 || l > grid.modes) throw std::invalid_argument("normal_split: need 0 <= l <= modes");
  const int nc = grid.nc();
  const int k = grid.modes;
  NormalSplit split;
  split.normal.assign(grid.data.size(), cdouble{});

  StripGrid tang;
  tang.modes = l;
  tang.Ns = grid.Ns;
  tang.Nt = grid.Nt;
  tang.mode_n = grid.mode_n;
  tang.S = grid.S;
  tang.T = grid.T;
  tang.data.assign(static_cast<std::size_t>(grid.Ns) * grid.Nt * (2 * l + 1), cdouble{});

  for (int j = 0; j < grid.Ns; ++j) {
    for (int m = 0; m < grid.Nt; ++m) {
      auto u = grid.node(j, m);
      double low2 = 0.0;
      for (int n = -l; n <= l; ++n) low2 += std::norm(u[n + k]);
      const double lownorm = std::sqrt(kTwoPi * low2);
      if (lownorm < 0.5) {
        std::ostringstream msg;
        msg << "normal_split: node (j=" << j << ", m=" << m
            << ") outside the tubular neighborhood of CP^{2l} (projection norm " << lownorm
            << ")";
        throw NumericError(msg.str());
      }
      auto tn = tang.node(j, m);
      for (int n = -l; n <= l; ++n) tn[n + l] = u[n + k];
      spanops::normalize(tn);
      std::span<cdouble> nn{split.normal.data() + (static_cast<std::size_t>(j) * grid.Nt + m) * nc,
                            static_cast<std::size_t>(nc)};
      for (int n = -k; n <= k; ++n) nn[n + k] = std::abs(n) <= l ? cdouble{} : u[n + k];
    }
  }

  // raw d/ds energies; the |n| <= l / |n| > l split is orthogonal modewise
  const double inv2ds = 0.5 / grid.ds();
  const double dsdt = grid.ds() * grid.dt();
  double etot = 0.0, elow = 0.0, ehigh = 0.0;
  for (int j = 1; j + 1 < grid.Ns; ++j) {
    for (int m = 0; m < grid.Nt; ++m) {
      auto r = grid.node(j + 1, m);
      auto lft = grid.node(j - 1, m);
      for (int n = -k; n <= k; ++n) {
        const double term = kTwoPi * std::norm((r[n + k] - lft[n + k]) * inv2ds);
        etot += term;
        if (std::abs(n) <= l)
          elow += term;
        else
          ehigh += term;
      }
    }
  }
  split.energy_total = etot * dsdt;
  split.energy_tangential = elow * dsdt;
  split.energy_normal = ehigh * dsdt;
  split.tangential = std::move(tang);
  return split;
}

void renormalize_and_align(StripGrid& grid) {
  for (int j = 1; j + 1 < grid.Ns; ++j)
    for (int m = 0; m < grid.Nt; ++m) spanops::normalize(grid.node(j, m));
  for (int j = 1; j + 1 < grid.Ns; ++j) {
    cdouble z = 0.0;
    for (int m = 0; m < grid.Nt; ++m) z += spanops::cdot(grid.node(j - 1, m), grid.node(j, m));
    const double az = std::abs(z);
    if (az == 0.0) continue;
    const cdouble w = std::conj(z) / az;
    for (int m = 0; m < grid.Nt; ++m)
      for (cdouble& c : grid.node(j, m)) c *= w;
  }
}

std::string strip_to_json(const StripGrid& grid) {
  json rows = json::array();
  const int nc = grid.nc();
  for (int j = 0; j < grid.Ns; ++j) {
    for (int m = 0; m < grid.Nt; ++m) {
      auto u = grid.node(j, m);
      json node = json::array();
      for (int i = 0; i < nc; ++i) node.push_back({u[i].real(), u[i].imag()});
      rows.push_back(std::move(node));
    }
  }
  json j = {{"version", 1}, {"T", grid.T},      {"S", grid.S},           {"Ns", grid.Ns},
            {"Nt", grid.Nt}, {"n", grid.mode_n}, {"k", grid.modes},       {"rows", std::move(rows)}};
  return j.dump();
}

StripGrid strip_from_json(const std::string& text, const std::string& origin) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError("snapshot '" + origin + "': malformed JSON: " + e.what());
  }
  try {
    if (j.at("version").get<int>() != 1)
      throw ConfigError("snapshot '" + origin + "': unsupported version");
    StripGrid g;
    g.T = j.at("T").get<double>();
    g.S = j.at("S").get<double>();
    g.Ns = j.at("Ns").get<int>();
    g.Nt = j.at("Nt").get<int>();
    g.mode_n = j.at("n").get<int>();
    g.modes = j.at("k").get<int>();
    if (g.Ns < 5 || g.Nt < 2 || g.modes < 0 || std::abs(g.mode_n) > g.modes || !(g.S > 0))
      throw ConfigError("snapshot '" + origin + "': invalid dimensions");
    const auto& rows = j.at("rows");
    const std::size_t nodes = static_cast<std::size_t>(g.Ns) * g.Nt;
    if (rows.size() != nodes)
      throw ConfigError("snapshot '" + origin + "': row count does not match Ns*Nt");
    const int nc = g.nc();
    g.data.resize(nodes * nc);
    for (std::size_t p = 0; p < nodes; ++p) {
      const auto& node = rows[p];
      if (static_cast<int>(node.size()) != nc)
        throw ConfigError("snapshot '" + origin + "': node coefficient count does not match k");
      for (int i = 0; i < nc; ++i)
        g.data[p * nc + i] = cdouble(node[i][0].get<double>(), node[i][1].get<double>());
    }
    return g;
  } catch (const json::exception& e) {
    throw ConfigError("snapshot '" + origin + "': " + e.what());
  }
}

void save_strip(const StripGrid& grid, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write snapshot '" + path + "'");
  out << strip_to_json(grid);
  if (!out) throw ConfigError("failed writing snapshot '" + path + "'");
}

StripGrid load_strip(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read snapshot '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return strip_from_json(ss.str(), path);
}

}  // namespace nlsfp
