#include "trmcf/flow.hpp"

#include "trmcf/errors.hpp"

#include <algorithm>
#include <cmath>

namespace trmcf {

void FlowConfig::validate() const {
  auto fail = [](const std::string& m) { throw Error(ErrorKind::Config, m); };
  if (!(cfl > 0.0 && cfl <= 0.5)) fail("flow.cfl must lie in (0, 0.5]");
  if (!(t_max >= 0.0) || !std::isfinite(t_max)) fail("flow.t_max must be finite and >= 0");
  if (max_steps < 0) fail("flow.max_steps must be >= 0");
  if (diag_stride < 1) fail("flow.diag_stride must be >= 1");
  if (eig_stride < 1) fail("flow.eig_stride must be >= 1");
  if (!(h_floor >= 0.0)) fail("flow.h_floor must be >= 0");
  if (!(blowup_factor > 1.0)) fail("flow.blowup_factor must be > 1");
  if (!(growth_limit > 0.0)) fail("flow.growth_limit must be > 0");
  if (!(dt_floor > 0.0)) fail("flow.dt_floor must be > 0");
  if (spectrum_modes < 1) fail("flow.spectrum_modes must be >= 1");
  if (!(control_b >= 1.0)) fail("control.b must be >= 1");
  if (!(R > 0.0)) fail("control.R must be > 0");
  if (!(delta > 0.0 && delta < 1.0)) fail("control.delta must lie in (0, 1)");
  if (fit_start >= 0.0 && fit_end >= 0.0 && fit_end <= fit_start) fail("flow.fit_end must exceed flow.fit_start");
}

std::vector<double> velocity(const ImmersionState& state, const GeometryCache& cache) {
  if (cache.nodes() != state.grid.node_count() || cache.D != state.real_dim())
    throw Error(ErrorKind::InvalidArgument, "cache does not match state");
  return cache.velocity;
}

double physical_spacing(const GeometryCache& cache) {
  double h = INFINITY;
  const int n = cache.n;
  for (std::size_t node = 0; node < cache.nodes(); ++node)
    for (int a = 0; a < n; ++a)
      h = std::min(h, std::sqrt(cache.g[node * n * n + a * n + a]) * cache.grid.spacing(a));
  return h;
}

double timestep(const GeometryCache& cache, double cfl) {
  const double h = physical_spacing(cache);
  const double A = std::sqrt(cache.sup(cache.A_sq));
  return cfl * h * h / (1.0 + A * h);
}

namespace {

bool geometric_failure(ErrorKind k) {
  return k == ErrorKind::ChartGuard || k == ErrorKind::Immersion || k == ErrorKind::TotallyReal;
}

// x + c * v on the point array.
ImmersionState shifted(const ImmersionState& s, const std::vector<double>& v, double c) {
  ImmersionState out = s;
  for (std::size_t i = 0; i < out.points.size(); ++i) out.points[i] += c * v[i];
  return out;
}

ImmersionState rk4(const ImmersionState& s, const GeometryCache& c0, double dt) {
  const auto& k1 = c0.velocity;
  const auto c2 = build_geometry(shifted(s, k1, 0.5 * dt), GeometryLevel::Kinematic);
  const auto c3 = build_geometry(shifted(s, c2.velocity, 0.5 * dt), GeometryLevel::Kinematic);
  const auto c4 = build_geometry(shifted(s, c3.velocity, dt), GeometryLevel::Kinematic);
  ImmersionState out = s;
  for (std::size_t i = 0; i < out.points.size(); ++i)
    out.points[i] += dt / 6.0 * (k1[i] + 2.0 * c2.velocity[i] + 2.0 * c3.velocity[i] + c4.velocity[i]);
  out.time = s.time + dt;
  return out;
}

// Attempts steps from dt downward until growth is acceptable. Returns the accepted dt.
double attempt(ImmersionState& state, GeometryCache& cache, double dt, const FlowConfig& cfg, int& rejections) {
  const double A2_old = cache.sup(cache.A_sq);
  while (true) {
    if (dt < cfg.dt_floor)
      throw Error(ErrorKind::BlowUp, "time step fell below the floor at t = " + std::to_string(state.time));
    try {
      ImmersionState next = rk4(state, cache, dt);
      GeometryCache nc = build_geometry(next, GeometryLevel::Kinematic);
      const double A2_new = nc.sup(nc.A_sq);
      if (std::isfinite(A2_new) && A2_new <= (1.0 + cfg.growth_limit) * A2_old + 1e-10) {
        state = std::move(next);
        cache = std::move(nc);
        return dt;
      }
    } catch (const Error& e) {
      if (!geometric_failure(e.kind())) throw;
      if (dt * 0.5 < cfg.dt_floor)
        throw Error(ErrorKind::BlowUp, std::string("geometry degenerated: ") + e.what());
    }
    ++rejections;
    dt *= 0.5;
  }
}

}  // namespace

ImmersionState step(const ImmersionState& state, const FlowConfig& config) {
  ImmersionState s = state;
  GeometryCache c = build_geometry(s, GeometryLevel::Kinematic);
  int rej = 0;
  attempt(s, c, timestep(c, config.cfl), config, rej);
  return s;
}

Stepper::Stepper(ImmersionState state, const FlowConfig& config)
    : state_(std::move(state)), config_(config), cache_(build_geometry(state_, GeometryLevel::Kinematic)) {}

double Stepper::advance() {
  double dt = timestep(cache_, config_.cfl);
  if (config_.t_max > state_.time && state_.time + dt > config_.t_max) dt = config_.t_max - state_.time;
  const double taken = attempt(state_, cache_, dt, config_, rejections_);
  ++steps_;
  return taken;
}

double Stepper::sup_AH() const {
  double s = 0.0;
  for (std::size_t i = 0; i < cache_.nodes(); ++i)
    s = std::max(s, std::sqrt(cache_.A_sq[i] * cache_.H_norm2[i]));
  return s;
}

EvolutionResiduals evolution_consistency(const GeometryCache& prev, const GeometryCache& next, double dt) {
  if (!(dt > 0.0)) throw Error(ErrorKind::InvalidArgument, "evolution consistency needs dt > 0");
  if (!(prev.grid == next.grid)) throw Error(ErrorKind::InvalidArgument, "caches on different grids");
  const int n = prev.n;
  const std::size_t N = prev.nodes();
  EvolutionResiduals r;

  auto metric_rhs = [n](const GeometryCache& c, std::size_t node, int i, int j) {
    double s = 0.0;
    for (int p = 0; p < n; ++p) s += 2.0 * c.H_vec[node * n + p] * c.h[node * n * n * n + (p * n + i) * n + j];
    return s;
  };
  TwoFormField dH0, dH1;
  if (n == 2) {
    dH0 = d1(one_form_field(prev.H, n), prev);
    dH1 = d1(one_form_field(next.H, n), next);
  }
  for (std::size_t node = 0; node < N; ++node) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const std::size_t k = node * n * n + i * n + j;
        const double lhs = (next.g[k] - prev.g[k]) / dt;
        const double rhs = 0.5 * (metric_rhs(prev, node, i, j) + metric_rhs(next, node, i, j));
        r.metric = std::max(r.metric, std::abs(lhs - rhs));
      }
    if (n == 2) {
      const double lhs = (next.omega[node * 4 + 1] - prev.omega[node * 4 + 1]) / dt;
      const double rhs = 0.5 * (dH0.v[node] + dH1.v[node]);
      r.omega = std::max(r.omega, std::abs(lhs - rhs));
    }
    const double lhs = (next.sqrt_det_g[node] - prev.sqrt_det_g[node]) / dt;
    const double rhs = -0.5 * (prev.H_norm2_eta[node] * prev.sqrt_det_g[node] +
                               next.H_norm2_eta[node] * next.sqrt_det_g[node]);
    r.volume_density = std::max(r.volume_density, std::abs(lhs - rhs));
  }
  const double V0 = prev.volume(), V1 = next.volume();
  const double dV = (V1 - V0) / dt;
  r.volume = std::abs(dV + 0.5 * (prev.integrate(prev.H_norm2_eta) + next.integrate(next.H_norm2_eta)));
  r.volume_rate = dV / (0.5 * (V0 + V1));
  return r;
}

double cohomology_integral(const GeometryCache& cache) {
  if (cache.n != 2) return 0.0;
  double s = 0.0;
  for (std::size_t node = 0; node < cache.nodes(); ++node) s += cache.omega[node * 4 + 1];
  return s * cache.cell_volume();
}

double cohomology_integral(const ImmersionState& state) {
  return cohomology_integral(build_geometry(state, GeometryLevel::Kinematic));
}

}  // namespace trmcf
