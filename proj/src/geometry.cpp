#include "trmcf/geometry.hpp"

#include "trmcf/errors.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>

namespace trmcf {

namespace {

template <int N>
void invert(const double (&m)[N][N], double (&inv)[N][N], double& det) {
  if constexpr (N == 1) {
    det = m[0][0];
    inv[0][0] = 1.0 / det;
  } else {
    det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    inv[0][0] = m[1][1] / det;
    inv[1][1] = m[0][0] / det;
    inv[0][1] = -m[0][1] / det;
    inv[1][0] = -m[1][0] / det;
  }
}

template <int N>
double min_eigenvalue(const double (&m)[N][N]) {
  if constexpr (N == 1) {
    return m[0][0];
  } else {
    const double a = m[0][0], d = m[1][1], b = 0.5 * (m[0][1] + m[1][0]);
    return 0.5 * (a + d) - std::sqrt(0.25 * (a - d) * (a - d) + b * b);
  }
}

template <int N>
void compute_node(const ImmersionState& st, GeometryCache& c, std::size_t node, bool full) {
  constexpr int D = 2 * N;
  AmbientFrame fr;
  const double* x = &st.points[node * D];
  evaluate_frame(st.ambient, x, fr, true);
  const double* Fi = &c.Fi[node * N * D];
  const double* Fij = &c.Fij[node * N * N * D];
  auto F = [&](int i, int a) { return Fi[i * D + a]; };

  double GF[N][D], JF[N][D];
  for (int i = 0; i < N; ++i) {
    apply_complex_structure(D, &Fi[i * D], JF[i]);
    for (int a = 0; a < D; ++a) {
      if (fr.flat) {
        GF[i][a] = F(i, a);
      } else {
        double s = 0.0;
        for (int b = 0; b < D; ++b) s += fr.metric[a][b] * F(i, b);
        GF[i][a] = s;
      }
    }
  }
  double g[N][N], om[N][N], gi[N][N], detg;
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) {
      double sg = 0.0, so = 0.0;
      for (int a = 0; a < D; ++a) {
        sg += F(i, a) * GF[j][a];
        so += JF[i][a] * GF[j][a];
      }
      g[i][j] = sg;
      om[i][j] = so;
    }
  if constexpr (N == 2) {
    g[0][1] = g[1][0] = 0.5 * (g[0][1] + g[1][0]);
    om[0][1] = 0.5 * (om[0][1] - om[1][0]);
    om[1][0] = -om[0][1];
    om[0][0] = om[1][1] = 0.0;
  } else {
    om[0][0] = 0.0;
  }
  if (!(min_eigenvalue(g) > 0.0))
    throw Error(ErrorKind::Immersion, "induced metric not positive definite at node " + std::to_string(node));
  invert(g, gi, detg);

  double omup[N][N];  // omega_i^p
  for (int i = 0; i < N; ++i)
    for (int p = 0; p < N; ++p) {
      double s = 0.0;
      for (int q = 0; q < N; ++q) s += om[i][q] * gi[q][p];
      omup[i][p] = s;
    }
  double Nv[N][D], GN[N][D];
  for (int i = 0; i < N; ++i)
    for (int a = 0; a < D; ++a) {
      double s = JF[i][a];
      for (int p = 0; p < N; ++p) s -= omup[i][p] * F(p, a);
      Nv[i][a] = s;
    }
  for (int i = 0; i < N; ++i)
    for (int a = 0; a < D; ++a) {
      if (fr.flat) {
        GN[i][a] = Nv[i][a];
      } else {
        double s = 0.0;
        for (int b = 0; b < D; ++b) s += fr.metric[a][b] * Nv[i][b];
        GN[i][a] = s;
      }
    }
  double eta[N][N], ei[N][N], dete;
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) {
      double s = 0.0;
      for (int a = 0; a < D; ++a) s += Nv[i][a] * GN[j][a];
      eta[i][j] = s;
    }
  if constexpr (N == 2) eta[0][1] = eta[1][0] = 0.5 * (eta[0][1] + eta[1][0]);
  const double eta_min = min_eigenvalue(eta);
  double gtrace = 0.0;
  for (int i = 0; i < N; ++i) gtrace += g[i][i];
  if (!(eta_min > 1e-13 * gtrace))
    throw Error(ErrorKind::TotallyReal,
                "normal metric eta not positive definite (tangent plane contains a complex line) at node " +
                    std::to_string(node));
  invert(eta, ei, dete);

  double nFF[N][N][D];  // nabla-bar_{F_j} F_k
  for (int j = 0; j < N; ++j)
    for (int k = j; k < N; ++k)
      for (int a = 0; a < D; ++a) {
        double s = Fij[(j * N + k) * D + a];
        if (!fr.flat)
          for (int b = 0; b < D; ++b)
            for (int e = 0; e < D; ++e) s += fr.christoffel[a][b][e] * F(j, b) * F(k, e);
        nFF[j][k][a] = s;
        nFF[k][j][a] = s;
      }
  double h[N][N][N];
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      for (int k = j; k < N; ++k) {
        double s = 0.0;
        for (int a = 0; a < D; ++a) s -= GN[i][a] * nFF[j][k][a];
        h[i][j][k] = s;
        h[i][k][j] = s;
      }
  double H[N], Hv[N];
  for (int i = 0; i < N; ++i) {
    double s = 0.0;
    for (int j = 0; j < N; ++j)
      for (int k = 0; k < N; ++k) s += gi[j][k] * h[i][j][k];
    H[i] = s;
  }
  for (int p = 0; p < N; ++p) {
    double s = 0.0;
    for (int m = 0; m < N; ++m) s -= ei[m][p] * H[m];
    Hv[p] = s;
  }
  double hr[N][N][N];  // h_i^{ab}
  for (int i = 0; i < N; ++i)
    for (int a = 0; a < N; ++a)
      for (int b = 0; b < N; ++b) {
        double s = 0.0;
        for (int j = 0; j < N; ++j)
          for (int k = 0; k < N; ++k) s += gi[j][a] * gi[k][b] * h[i][j][k];
        hr[i][a][b] = s;
      }
  double A2 = 0.0;
  for (int i = 0; i < N; ++i)
    for (int p = 0; p < N; ++p)
      for (int a = 0; a < N; ++a)
        for (int b = 0; b < N; ++b) A2 += ei[i][p] * h[i][a][b] * hr[p][a][b];
  double Hg = 0.0, He = 0.0, om2 = 0.0;
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) {
      Hg += gi[i][j] * H[i] * H[j];
      He += ei[i][j] * H[i] * H[j];
      for (int k = 0; k < N; ++k)
        for (int l = 0; l < N; ++l) om2 += 0.5 * om[i][j] * om[k][l] * gi[i][k] * gi[j][l];
    }

  // Store.
  const std::size_t o1 = node * N, o2 = node * N * N, o3 = node * N * N * N, oD = node * D;
  for (int i = 0; i < N; ++i) {
    c.H[o1 + i] = H[i];
    c.H_vec[o1 + i] = Hv[i];
    for (int j = 0; j < N; ++j) {
      c.g[o2 + i * N + j] = g[i][j];
      c.g_inv[o2 + i * N + j] = gi[i][j];
      c.omega[o2 + i * N + j] = om[i][j];
      c.eta[o2 + i * N + j] = eta[i][j];
      c.eta_inv[o2 + i * N + j] = ei[i][j];
      for (int k = 0; k < N; ++k) c.h[o3 + (i * N + j) * N + k] = h[i][j][k];
    }
    for (int a = 0; a < D; ++a) c.normals[(node * N + i) * D + a] = Nv[i][a];
  }
  for (int a = 0; a < D; ++a) {
    double s = 0.0;
    for (int p = 0; p < N; ++p) s += Hv[p] * Nv[p][a];
    c.velocity[oD + a] = s;
  }
  c.sqrt_det_g[node] = std::sqrt(detg);
  c.A_sq[node] = A2;
  c.H_norm2[node] = Hg;
  c.H_norm2_eta[node] = He;
  c.omega_norm2[node] = om2;
  c.eta_min_eig[node] = eta_min;
  if (!full) return;

  for (int a = 0; a < D; ++a)
    for (int b = 0; b < D; ++b) c.ambient_metric[(node * D + a) * D + b] = fr.metric[a][b];
  double Gam[N][N][N];
  for (int l = 0; l < N; ++l)
    for (int j = 0; j < N; ++j)
      for (int k = 0; k < N; ++k) {
        double s = 0.0;
        for (int m = 0; m < N; ++m) {
          double t = 0.0;
          for (int a = 0; a < D; ++a) t += GF[m][a] * nFF[j][k][a];
          s += gi[l][m] * t;
        }
        Gam[l][j][k] = s;
        c.christoffel[o3 + (l * N + j) * N + k] = s;
      }
  for (int i = 0; i < N; ++i) {
    double sx = 0.0, sj = 0.0;
    for (int j = 0; j < N; ++j)
      for (int k = 0; k < N; ++k) {
        sx += gi[k][j] * h[j][i][k];
        sj += ei[j][k] * h[k][i][j];
      }
    c.xi[o1 + i] = sx;
    c.xi_J[o1 + i] = sj;
  }
  for (int s = 0; s < N; ++s)
    for (int j = 0; j < N; ++j)
      for (int p = 0; p < N; ++p) {
        double v = Gam[s][j][p];
        for (int q = 0; q < N; ++q)
          for (int r = 0; r < N; ++r) v += (omup[p][r] * h[q][j][r] - omup[q][r] * h[r][j][p]) * ei[q][s];
        c.normal_connection[o3 + (s * N + j) * N + p] = v;
      }
  if (!c.lagrangian_angle.empty()) {
    std::complex<double> Z[N][N];
    for (int k = 0; k < N; ++k)
      for (int i = 0; i < N; ++i) Z[k][i] = {F(i, 2 * k), F(i, 2 * k + 1)};
    std::complex<double> det;
    if constexpr (N == 1) det = Z[0][0];
    else det = Z[0][0] * Z[1][1] - Z[0][1] * Z[1][0];
    const double m = std::abs(det);
    c.lagrangian_angle[2 * node] = det.real() / m;
    c.lagrangian_angle[2 * node + 1] = det.imag() / m;
  }
}

template <int N>
void compute_all(const ImmersionState& st, GeometryCache& c, bool full) {
  const std::size_t nodes = st.grid.node_count();
  for (std::size_t node = 0; node < nodes; ++node) compute_node<N>(st, c, node, full);
}

}  // namespace

double GeometryCache::integrate(const std::vector<double>& scalar) const {
  double s = 0.0;
  for (std::size_t i = 0; i < nodes(); ++i) s += scalar[i] * sqrt_det_g[i];
  return s * cell_volume();
}

double GeometryCache::volume() const { return integrate(std::vector<double>(nodes(), 1.0)); }

double GeometryCache::sup(const std::vector<double>& scalar) const {
  double m = -std::numeric_limits<double>::infinity();
  for (double v : scalar) m = std::max(m, v);
  return m;
}

GeometryCache build_geometry(const ImmersionState& state, GeometryLevel level) {
  GeometryCache c;
  c.grid = state.grid;
  c.level = level;
  c.n = state.grid.dim;
  c.D = state.real_dim();
  c.ambient_kind = state.ambient.kind;
  c.lambda = state.ambient.ke_constant;
  if (c.n != state.ambient.complex_dimension)
    throw Error(ErrorKind::InvalidArgument, "intrinsic dimension must equal the ambient complex dimension");
  const std::size_t N = state.grid.node_count();
  const int n = c.n, D = c.D;
  derivatives(state, c.Fi, c.Fij);
  const bool full = level == GeometryLevel::Full;
  for (auto* v : {&c.g, &c.g_inv, &c.omega, &c.eta, &c.eta_inv}) v->assign(N * n * n, 0.0);
  c.normals.assign(N * n * D, 0.0);
  c.h.assign(N * n * n * n, 0.0);
  for (auto* v : {&c.H, &c.H_vec}) v->assign(N * n, 0.0);
  for (auto* v : {&c.sqrt_det_g, &c.A_sq, &c.H_norm2, &c.H_norm2_eta, &c.omega_norm2, &c.eta_min_eig})
    v->assign(N, 0.0);
  c.velocity.assign(N * D, 0.0);
  if (full) {
    c.ambient_metric.assign(N * D * D, 0.0);
    c.christoffel.assign(N * n * n * n, 0.0);
    c.normal_connection.assign(N * n * n * n, 0.0);
    c.xi.assign(N * n, 0.0);
    c.xi_J.assign(N * n, 0.0);
    if (state.ambient.kind == AmbientKind::FlatTorus) c.lagrangian_angle.assign(N * 2, 0.0);
  }
  if (n == 1) compute_all<1>(state, c, full);
  else compute_all<2>(state, c, full);
  return c;
}

MetricPair first_fundamental(const ImmersionState& state) {
  GeometryCache c = build_geometry(state, GeometryLevel::Kinematic);
  return {std::move(c.g), std::move(c.g_inv)};
}

std::vector<double> restricted_kahler(const ImmersionState& state) {
  return build_geometry(state, GeometryLevel::Kinematic).omega;
}

NormalFrame normal_frame(const ImmersionState& state) {
  GeometryCache c = build_geometry(state, GeometryLevel::Kinematic);
  return {std::move(c.normals), std::move(c.eta), std::move(c.eta_inv)};
}

SecondFundamental second_fundamental(const ImmersionState& state) {
  GeometryCache c = build_geometry(state, GeometryLevel::Kinematic);
  return {std::move(c.h), std::move(c.A_sq)};
}

MeanCurvature mean_curvature(const ImmersionState& state) {
  GeometryCache c = build_geometry(state, GeometryLevel::Full);
  return {std::move(c.H), std::move(c.H_vec), std::move(c.xi)};
}

std::vector<double> maslov_form(const ImmersionState& state) {
  return build_geometry(state, GeometryLevel::Full).xi_J;
}

std::vector<double> lagrangian_angle(const ImmersionState& state) {
  if (state.ambient.kind != AmbientKind::FlatTorus)
    throw Error(ErrorKind::InvalidArgument, "Lagrangian angle requires the flat ambient (global holomorphic volume form)");
  return build_geometry(state, GeometryLevel::Full).lagrangian_angle;
}

std::vector<double> normal_connection(const ImmersionState& state) {
  return build_geometry(state, GeometryLevel::Full).normal_connection;
}

}  // namespace trmcf
