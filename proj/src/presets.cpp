#include "trmcf/errors.hpp"
#include "trmcf/immersion.hpp"

#include <cmath>
#include <random>

namespace trmcf {

namespace {

constexpr double kTwoPi = 2.0 * M_PI;

GridSpec make_grid(const PresetParams& p, double period) {
  GridSpec g;
  g.dim = p.intrinsic_dim;
  g.fd_order = p.fd_order;
  for (int a = 0; a < g.dim; ++a) {
    g.resolution[a] = p.resolution;
    g.periods[a] = period;
  }
  if (g.dim == 1) {
    g.resolution[1] = 1;
    g.periods[1] = 1.0;
  }
  g.validate();
  return g;
}

// Phase 2 pi m.u / P of the perturbation mode at a node.
double mode_phase(const GridSpec& grid, const PresetParams& p, std::size_t node) {
  const auto u = grid.parameter(node);
  double ph = 0.0;
  for (int a = 0; a < grid.dim; ++a) ph += kTwoPi * p.mode[a] * u[a] / grid.periods[a];
  return ph;
}

// Smooth random field: low Fourier modes |k|_inf <= 2 with seeded amplitudes.
struct NoiseField {
  struct Term { int k0, k1; double a, b; };
  std::vector<Term> terms;
  NoiseField(std::mt19937_64& rng, int dim, double amplitude) {
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    const int k1max = dim > 1 ? 2 : 0;
    std::vector<Term> t;
    for (int k1 = -k1max; k1 <= k1max; ++k1)
      for (int k0 = -2; k0 <= 2; ++k0)
        if (k0 != 0 || k1 != 0) t.push_back({k0, k1, U(rng), U(rng)});
    for (auto& x : t) {
      x.a *= amplitude / t.size();
      x.b *= amplitude / t.size();
    }
    terms = std::move(t);
  }
  double operator()(const GridSpec& grid, std::size_t node) const {
    const auto u = grid.parameter(node);
    double s = 0.0;
    for (const auto& t : terms) {
      double ph = kTwoPi * t.k0 * u[0] / grid.periods[0];
      if (grid.dim > 1) ph += kTwoPi * t.k1 * u[1] / grid.periods[1];
      s += t.a * std::cos(ph) + t.b * std::sin(ph);
    }
    return s;
  }
};

ImmersionState flat_lagrangian_torus(const PresetParams& p) {
  const int n = p.intrinsic_dim;
  std::vector<double> periods = p.lattice_periods.empty() ? std::vector<double>(2 * n, 1.0) : p.lattice_periods;
  ImmersionState s;
  s.ambient = AmbientModel::flat_torus(n, periods);
  for (int a = 0; a < n; ++a)
    if (!(periods[2 * a] > 0.0))
      throw Error(ErrorKind::InvalidArgument, "flat_lagrangian_torus needs positive lattice periods along u_k");
  if (p.direction < 1 || p.direction > n)
    throw Error(ErrorKind::InvalidArgument, "perturbation direction must be in 1..n");
  s.grid = make_grid(p, 1.0);
  for (int a = 0; a < n; ++a) s.grid.periods[a] = periods[2 * a];
  const int D = 2 * n;
  const std::size_t N = s.grid.node_count();
  s.points.assign(N * D, 0.0);
  std::mt19937_64 rng(p.seed);
  std::vector<NoiseField> noise;
  if (p.noise != 0.0)
    for (int k = 0; k < n; ++k) noise.emplace_back(rng, n, p.noise);
  for (std::size_t node = 0; node < N; ++node) {
    const auto u = s.grid.parameter(node);
    double* x = &s.points[node * D];
    for (int a = 0; a < n; ++a) x[2 * a] = u[a];
    x[2 * (p.direction - 1) + 1] += p.epsilon * std::sin(mode_phase(s.grid, p, node));
    for (int k = 0; k < static_cast<int>(noise.size()); ++k) x[2 * k + 1] += noise[k](s.grid, node);
  }
  for (int a = 0; a < n; ++a) s.winding[a][2 * a] = periods[2 * a];
  return s;
}

ImmersionState product_circles(const PresetParams& p) {
  const int n = p.intrinsic_dim;
  for (int k = 0; k < n; ++k)
    if (!(p.radii[k] > 0.0)) throw Error(ErrorKind::InvalidArgument, "circle radii must be positive");
  ImmersionState s;
  s.ambient = AmbientModel::flat_torus(n, std::vector<double>(2 * n, 0.0));
  s.grid = make_grid(p, kTwoPi);
  const int D = 2 * n;
  const std::size_t N = s.grid.node_count();
  s.points.assign(N * D, 0.0);
  for (std::size_t node = 0; node < N; ++node) {
    const auto th = s.grid.parameter(node);
    const double f = 1.0 + p.epsilon * std::cos(mode_phase(s.grid, p, node));
    for (int k = 0; k < n; ++k) {
      s.points[node * D + 2 * k] = p.radii[k] * f * std::cos(th[k]);
      s.points[node * D + 2 * k + 1] = p.radii[k] * f * std::sin(th[k]);
    }
  }
  return s;
}

ImmersionState clifford_cp2(const PresetParams& p) {
  if (p.intrinsic_dim != 2) throw Error(ErrorKind::InvalidArgument, "clifford_cp2 is two-dimensional");
  ImmersionState s;
  s.ambient = AmbientModel::fubini_study(2, p.chart_radius_max);
  s.grid = make_grid(p, kTwoPi);
  const std::size_t N = s.grid.node_count();
  s.points.assign(N * 4, 0.0);
  std::mt19937_64 rng(p.seed);
  std::vector<NoiseField> noise;
  if (p.noise != 0.0)
    for (int k = 0; k < 2; ++k) noise.emplace_back(rng, 2, p.noise);
  for (std::size_t node = 0; node < N; ++node) {
    const auto th = s.grid.parameter(node);
    const double f = 1.0 + p.epsilon * std::cos(mode_phase(s.grid, p, node));
    for (int k = 0; k < 2; ++k) {
      const double r = f + (noise.empty() ? 0.0 : noise[k](s.grid, node));
      s.points[node * 4 + 2 * k] = r * std::cos(th[k]);
      s.points[node * 4 + 2 * k + 1] = r * std::sin(th[k]);
    }
  }
  return s;
}

}  // namespace

std::vector<PresetInfo> preset_list() {
  return {
      {"flat_lagrangian_torus",
       "linear Lagrangian torus (u1,0,u2,0) in the flat torus, optional graph perturbation "
       "epsilon*sin(2 pi m.u) along v_direction and seeded smooth noise"},
      {"product_circles", "product of round circles of radii r1, r2 in flat C^n (shrinks to a point at t = r^2/2)"},
      {"clifford_cp2",
       "Clifford torus [1 : e^{ia} : e^{ib}] in one Fubini-Study chart of CP^2, optional radial "
       "perturbation (1 + epsilon cos(m.theta))"},
      {"file", "load an immersion snapshot from preset.path"},
  };
}

ImmersionState preset(const PresetParams& params) {
  ImmersionState s;
  if (params.name == "flat_lagrangian_torus") s = flat_lagrangian_torus(params);
  else if (params.name == "product_circles") s = product_circles(params);
  else if (params.name == "clifford_cp2") s = clifford_cp2(params);
  else if (params.name == "file") s = load_snapshot(params.path);
  else throw Error(ErrorKind::InvalidArgument, "unknown preset '" + params.name + "'");
  s.validate();
  return s;
}

}  // namespace trmcf
