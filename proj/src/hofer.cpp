#include "nlsfp/hofer.hpp"

#include "nlsfp/parallel.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>

namespace nlsfp {

std::vector<std::pair<double, double>> gauss_legendre_01(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre_01: n must be >= 1");
  std::vector<std::pair<double, double>> out(n);
  // Newton on P_n over [-1,1], then map to [0,1].
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      if (n == 1) p1 = x;
      for (int j = 2; j <= n; ++j) {
        const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      const double pn = (n == 1) ? x : p1;
      const double pm = (n == 1) ? 1.0 : p0;
      pp = n * (x * pn - pm) / (x * x - 1.0);
      const double dx = pn / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * pp * pp);
    out[i] = {0.5 * (x + 1.0), 0.5 * w};
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

// Value/gradient functor for the optimized Hamiltonian at a fixed t.
struct Objective {
  std::function<double(std::span<const cdouble>, double, HamWorkspace&)> value;
  std::function<void(std::span<const cdouble>, double, std::span<cdouble>, HamWorkspace&)> grad;
  int modes = 0;
};

struct AscentResult {
  double value = 0.0;
  std::vector<cdouble> arg;
  bool converged = false;
  int iterations = 0;
};

// Projected-gradient ascent of sign*H(., t) over the unit sphere (the {u,iu}
// directions are removed; H is phase invariant so only the radial one acts).
AscentResult projected_ascent(const Objective& obj, double t, double sign,
                              std::vector<cdouble> u, const HoferOptions& opts,
                              HamWorkspace& ws) {
  const std::size_t nc = u.size();
  std::vector<cdouble> g(nc), trial(nc);
  spanops::normalize(u);
  double f = sign * obj.value(u, t, ws);
  double alpha = 1.0;
  AscentResult res;
  int it = 0;
  for (; it < opts.max_iterations; ++it) {
    obj.grad(u, t, g, ws);
    if (sign < 0)
      for (cdouble& z : g) z = -z;
    spanops::project_tangent(u, g);
    const double gnorm2 = spanops::norm2_sq(g);
    if (std::sqrt(gnorm2) <= opts.grad_tol) {
      res.converged = true;
      break;
    }
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      for (std::size_t i = 0; i < nc; ++i) trial[i] = u[i] + alpha * g[i];
      spanops::normalize(trial);
      const double ft = sign * obj.value(trial, t, ws);
      if (ft >= f + 1e-4 * alpha * gnorm2) {
        u.swap(trial);
        f = ft;
        alpha = std::min(alpha * 1.5, 1e6);
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) {
      // Line search exhausted at gradient scale: treat as converged-to-noise.
      res.converged = std::sqrt(gnorm2) <= 1e3 * opts.grad_tol;
      break;
    }
  }
  res.value = sign * f;
  res.arg = std::move(u);
  res.iterations = it;
  return res;
}

struct ExtremumOutcome {
  double value = 0.0;
  FourierField arg;
  bool converged = false;
  int iterations = 0;
};

HoferEstimate estimate(const Objective& obj, const HoferOptions& opts, std::uint64_t stream_tag) {
  const int nc = 2 * obj.modes + 1;
  const auto quad = gauss_legendre_01(opts.time_nodes);
  const int starts = nc + std::max(0, opts.multistarts);
  const Rng rng(opts.seed);

  struct Task {
    int node;
    int start;
    int sign;  // +1 max, -1 min
  };
  std::vector<Task> tasks;
  tasks.reserve(2 * quad.size() * starts);
  for (int q = 0; q < static_cast<int>(quad.size()); ++q)
    for (int s = 0; s < starts; ++s)
      for (int sign : {+1, -1}) tasks.push_back({q, s, sign});

  std::vector<AscentResult> results(tasks.size());
  parallel_for(tasks.size(), opts.threads, [&](std::size_t b, std::size_t e) {
    HamWorkspace ws;
    for (std::size_t i = b; i < e; ++i) {
      const Task& task = tasks[i];
      std::vector<cdouble> u0(nc);
      if (task.start < nc) {
        u0[task.start] = 1.0 / std::sqrt(kTwoPi);  // u0_n seed
      } else {
        const std::uint64_t stream =
            stream_tag ^ Rng::stream_of("hofer") ^ (static_cast<std::uint64_t>(task.node) << 32) ^
            (static_cast<std::uint64_t>(task.start) << 8) ^ (task.sign > 0 ? 1u : 2u);
        for (int j = 0; j < nc; ++j)
          u0[j] = cdouble(rng.normal(stream, 2 * j), rng.normal(stream, 2 * j + 1));
        if (spanops::norm2_sq(u0) == 0.0) u0[0] = 1.0;
      }
      results[i] = projected_ascent(obj, quad[task.node].first, task.sign, std::move(u0), opts, ws);
    }
  });

  HoferEstimate est;
  est.nodes.resize(quad.size());
  for (std::size_t q = 0; q < quad.size(); ++q) {
    HoferNode& node = est.nodes[q];
    node.t = quad[q].first;
    node.weight = quad[q].second;
    node.max_value = -std::numeric_limits<double>::infinity();
    node.min_value = std::numeric_limits<double>::infinity();
  }
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const Task& task = tasks[i];
    const AscentResult& r = results[i];
    HoferNode& node = est.nodes[task.node];
    if (task.sign > 0 && r.value > node.max_value) {
      node.max_value = r.value;
      node.max_converged = r.converged;
      node.max_iterations = r.iterations;
      node.argmax.modes = obj.modes;
      node.argmax.c = r.arg;
    } else if (task.sign < 0 && r.value < node.min_value) {
      node.min_value = r.value;
      node.min_converged = r.converged;
      node.min_iterations = r.iterations;
      node.argmin.modes = obj.modes;
      node.argmin.c = r.arg;
    }
  }
  for (const HoferNode& node : est.nodes) {
    est.value += node.weight * (node.max_value - node.min_value);
    if (!node.max_converged || !node.min_converged) est.all_converged = false;
  }
  return est;
}

}  // namespace

HoferEstimate hofer_norm(const HamiltonianSystem& sys, HamiltonianPicture which,
                         const HoferOptions& opts) {
  Objective obj;
  obj.modes = sys.modes;
  if (which == HamiltonianPicture::F) {
    obj.value = [&sys](std::span<const cdouble> u, double t, HamWorkspace& ws) {
      return spanops::eval_F(sys, u, t, ws);
    };
    obj.grad = [&sys](std::span<const cdouble> u, double t, std::span<cdouble> g, HamWorkspace& ws) {
      spanops::grad_F(sys, u, t, g, ws);
    };
  } else {
    obj.value = [&sys](std::span<const cdouble> u, double t, HamWorkspace& ws) {
      return spanops::eval_G(sys, u, t, ws);
    };
    obj.grad = [&sys](std::span<const cdouble> u, double t, std::span<cdouble> g, HamWorkspace& ws) {
      spanops::grad_G(sys, u, t, g, ws);
    };
  }
  return estimate(obj, opts, which == HamiltonianPicture::F ? 0xF0F0ull : 0x0707ull);
}

HoferEstimate hofer_gap(const HamiltonianSystem& sys, int l, const HoferOptions& opts) {
  if (l > sys.modes) throw std::invalid_argument("hofer_gap: l must be <= modes");
  const HamiltonianSystem low = level_system(sys, l);
  Objective obj;
  obj.modes = sys.modes;
  obj.value = [&sys, &low](std::span<const cdouble> u, double t, HamWorkspace& ws) {
    return spanops::eval_G(sys, u, t, ws) - spanops::eval_G(low, u, t, ws);
  };
  obj.grad = [&sys, &low](std::span<const cdouble> u, double t, std::span<cdouble> g, HamWorkspace& ws) {
    // sys and low share modes/nx, so the workspace (and its phase cache)
    // can serve both evaluations.
    std::vector<cdouble> g2(g.size());
    spanops::grad_G(sys, u, t, g, ws);
    spanops::grad_G(low, u, t, g2, ws);
    for (std::size_t i = 0; i < g.size(); ++i) g[i] -= g2[i];
  };
  return estimate(obj, opts, 0xA11ull);
}

}  // namespace nlsfp
