#include "trmcf/errors.hpp"
#include "trmcf/geometry.hpp"
#include "trmcf/hodge.hpp"

#include <algorithm>
#include <cmath>

namespace trmcf {

namespace {

void require_full(const GeometryCache& c) {
  if (c.level != GeometryLevel::Full) throw Error(ErrorKind::InvalidArgument, "identity needs a full geometry cache");
}

// D_axis of a node-major field with ncomp components.
std::vector<double> D(const GeometryCache& c, const std::vector<double>& f, int ncomp, int axis) {
  return derivative(c.grid, f, ncomp, axis);
}

// Tangent vectors of the pullback: F_i components at a node.
const double* Fvec(const GeometryCache& c, std::size_t node, int i) { return &c.Fi[(node * c.n + i) * c.D]; }
const double* Nvec(const GeometryCache& c, std::size_t node, int i) { return &c.normals[(node * c.n + i) * c.D]; }

double at2(const std::vector<double>& f, int n, std::size_t node, int i, int j) { return f[node * n * n + i * n + j]; }
double at3(const std::vector<double>& f, int n, std::size_t node, int i, int j, int k) {
  return f[node * n * n * n + (i * n + j) * n + k];
}

OneFormField covector(const std::vector<double>& v, int n) { return {n, v}; }

}  // namespace

IdentityReport make_report(const std::string& name, const GeometryCache& cache, const std::vector<double>& residual,
                           int ncomp, double tolerance) {
  IdentityReport r;
  r.name = name;
  r.resolution = {cache.grid.resolution[0], cache.grid.dim > 1 ? cache.grid.resolution[1] : 1};
  r.tolerance = tolerance;
  double l2 = 0.0;
  for (std::size_t node = 0; node < cache.nodes(); ++node) {
    double s = 0.0;
    for (int c = 0; c < ncomp; ++c) s += residual[node * ncomp + c] * residual[node * ncomp + c];
    r.max_norm = std::max(r.max_norm, std::sqrt(s));
    l2 += s * cache.sqrt_det_g[node];
  }
  r.l2 = std::sqrt(l2 * cache.cell_volume());
  r.passed = std::isfinite(r.max_norm) && r.max_norm <= tolerance;
  return r;
}

IdentityReport identity_xi_H_dstar_omega(const GeometryCache& c, double tol) {
  require_full(c);
  const OneFormField ds = codifferential2(kahler_form_field(c), c);
  std::vector<double> r(c.nodes() * c.n);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = c.xi[i] - c.H[i] - ds.v[i];
  return make_report("xi_minus_H_minus_dstar_omega", c, r, c.n, tol);
}

IdentityReport identity_index_commutation(const GeometryCache& c, double tol) {
  require_full(c);
  const int n = c.n;
  std::vector<std::vector<double>> dom(n);
  for (int k = 0; k < n; ++k) dom[k] = D(c, c.omega, n * n, k);
  std::vector<double> r(c.nodes() * n * n * n);
  for (std::size_t node = 0; node < c.nodes(); ++node)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
          double nab = dom[k][node * n * n + j * n + i];
          for (int m = 0; m < n; ++m)
            nab -= at3(c.christoffel, n, node, m, k, j) * at2(c.omega, n, node, m, i) +
                   at3(c.christoffel, n, node, m, k, i) * at2(c.omega, n, node, j, m);
          r[node * n * n * n + (i * n + j) * n + k] =
              at3(c.h, n, node, i, j, k) - at3(c.h, n, node, j, i, k) - nab;
        }
  return make_report("h_ijk_minus_h_jik_minus_nabla_omega", c, r, n * n * n, tol);
}

IdentityReport identity_dxiJ_rho(const ImmersionState& state, const GeometryCache& c, double tol) {
  require_full(c);
  const int n = c.n, Dm = c.D;
  std::vector<double> r(c.nodes(), 0.0);
  if (n == 2) {
    const TwoFormField dx = d1(covector(c.xi_J, n), c);
    for (std::size_t node = 0; node < c.nodes(); ++node) {
      double rho12 = 0.0;
      if (state.ambient.kind != AmbientKind::FlatTorus) {
        const CurvatureData cd = riemann_at(state.ambient, state.point(node));
        const double* F1 = Fvec(c, node, 0);
        const double* F2 = Fvec(c, node, 1);
        for (int a = 0; a < Dm; ++a)
          for (int b = 0; b < Dm; ++b) rho12 += F1[a] * cd.ricci_form(a, b) * F2[b];
      }
      r[node] = dx.v[node] - rho12;
    }
  }
  return make_report("d_xiJ_minus_rho", c, r, 1, tol);
}

IdentityReport identity_normal_metric_compat(const GeometryCache& c, double tol) {
  require_full(c);
  const int n = c.n;
  std::vector<std::vector<double>> de(n);
  for (int k = 0; k < n; ++k) de[k] = D(c, c.eta, n * n, k);
  std::vector<double> r(c.nodes() * n * n * n);
  for (std::size_t node = 0; node < c.nodes(); ++node)
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          double v = de[k][node * n * n + i * n + j];
          for (int s = 0; s < n; ++s)
            v -= at3(c.normal_connection, n, node, s, k, i) * at2(c.eta, n, node, s, j) +
                 at3(c.normal_connection, n, node, s, k, j) * at2(c.eta, n, node, i, s);
          r[node * n * n * n + (k * n + i) * n + j] = v;
        }
  return make_report("nabla_hat_eta", c, r, n * n * n, tol);
}

IdentityReport identity_xi_xiJ_error(const GeometryCache& c, double tol) {
  require_full(c);
  const int n = c.n;
  std::vector<double> r(c.nodes() * n);
  for (std::size_t node = 0; node < c.nodes(); ++node) {
    // P^{jk} = eta^{js} omega_sp g^{pq} omega_qr g^{rk}
    double P[2][2] = {{0, 0}, {0, 0}};
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        double s = 0.0;
        for (int a = 0; a < n; ++a)
          for (int p = 0; p < n; ++p)
            for (int q = 0; q < n; ++q)
              for (int b = 0; b < n; ++b)
                s += at2(c.eta_inv, n, node, j, a) * at2(c.omega, n, node, a, p) * at2(c.g_inv, n, node, p, q) *
                     at2(c.omega, n, node, q, b) * at2(c.g_inv, n, node, b, k);
        P[j][k] = s;
      }
    for (int i = 0; i < n; ++i) {
      double cf = 0.0;
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) cf += P[j][k] * at3(c.h, n, node, j, i, k);
      r[node * n + i] = c.xi[node * n + i] - c.xi_J[node * n + i] - cf;
    }
  }
  return make_report("xi_minus_xiJ_minus_closed_form", c, r, n, tol);
}

IdentityReport identity_dH_formula(const GeometryCache& c, double tol) {
  require_full(c);
  std::vector<double> r(c.nodes(), 0.0);
  if (c.n == 2) {
    const TwoFormField dH = d1(covector(c.H, 2), c);
    const TwoFormField dxi = d1(covector(c.xi, 2), c);
    const TwoFormField dds = d1(codifferential2(kahler_form_field(c), c), c);
    for (std::size_t node = 0; node < c.nodes(); ++node) r[node] = dH.v[node] - (dxi.v[node] - dds.v[node]);
  }
  return make_report("dH_minus_dxi_plus_d_dstar_omega", c, r, 1, tol);
}

IdentityReport identity_hat_vs_levi_civita(const GeometryCache& c, double tol) {
  require_full(c);
  const int n = c.n;
  std::vector<double> r(c.nodes() * n * n);
  for (std::size_t node = 0; node < c.nodes(); ++node) {
    double omup[2][2];
    for (int i = 0; i < n; ++i)
      for (int p = 0; p < n; ++p) {
        double s = 0.0;
        for (int q = 0; q < n; ++q) s += at2(c.omega, n, node, i, q) * at2(c.g_inv, n, node, q, p);
        omup[i][p] = s;
      }
    const double* a = &c.H[node * n];
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        double lhs = 0.0;
        for (int p = 0; p < n; ++p)
          lhs -= (at3(c.normal_connection, n, node, p, j, i) - at3(c.christoffel, n, node, p, j, i)) * a[p];
        double rhs = 0.0;
        for (int q = 0; q < n; ++q)
          for (int s = 0; s < n; ++s)
            for (int rr = 0; rr < n; ++rr)
              rhs += (-omup[i][rr] * at3(c.h, n, node, q, j, rr) + omup[q][rr] * at3(c.h, n, node, rr, j, i)) *
                     at2(c.eta_inv, n, node, q, s) * a[s];
        r[node * n * n + j * n + i] = lhs - rhs;
      }
  }
  return make_report("nabla_hat_minus_nabla_change", c, r, n * n, tol);
}

IdentityReport identity_eta_closed_form(const GeometryCache& c, double tol) {
  const int n = c.n;
  std::vector<double> r(c.nodes() * n * n);
  for (std::size_t node = 0; node < c.nodes(); ++node)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double corr = 0.0;  // omega_j^p omega_pi
        for (int p = 0; p < n; ++p)
          for (int q = 0; q < n; ++q)
            corr += at2(c.omega, n, node, j, q) * at2(c.g_inv, n, node, q, p) * at2(c.omega, n, node, p, i);
        r[node * n * n + i * n + j] = at2(c.eta, n, node, i, j) - (at2(c.g, n, node, i, j) + corr);
      }
  return make_report("eta_minus_closed_form", c, r, n * n, tol);
}

IdentityReport identity_normality(const GeometryCache& c, double tol) {
  require_full(c);
  const int n = c.n, Dm = c.D;
  std::vector<double> r(c.nodes() * n * n);
  for (std::size_t node = 0; node < c.nodes(); ++node) {
    const double* G = &c.ambient_metric[node * Dm * Dm];
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const double* Nv = Nvec(c, node, i);
        const double* F = Fvec(c, node, j);
        double s = 0.0;
        for (int a = 0; a < Dm; ++a)
          for (int b = 0; b < Dm; ++b) s += Nv[a] * G[a * Dm + b] * F[b];
        r[node * n * n + i * n + j] = s;
      }
  }
  return make_report("normal_frame_orthogonality", c, r, n * n, tol);
}

IdentityReport identity_maslov_angle(const GeometryCache& c, double tol) {
  require_full(c);
  if (c.lagrangian_angle.empty())
    throw Error(ErrorKind::InvalidArgument, "Lagrangian angle requires the flat ambient");
  const int n = c.n;
  std::vector<double> cs(c.nodes()), sn(c.nodes());
  for (std::size_t node = 0; node < c.nodes(); ++node) {
    cs[node] = c.lagrangian_angle[2 * node];
    sn[node] = c.lagrangian_angle[2 * node + 1];
  }
  std::vector<double> r(c.nodes() * n);
  for (int i = 0; i < n; ++i) {
    const std::vector<double> dc = D(c, cs, 1, i), ds = D(c, sn, 1, i);
    for (std::size_t node = 0; node < c.nodes(); ++node) {
      const double dtheta = cs[node] * ds[node] - sn[node] * dc[node];
      r[node * n + i] = dtheta + c.xi_J[node * n + i];
    }
  }
  return make_report("d_thetaL_plus_xiJ", c, r, n, tol);
}

IdentityReport ricci_contraction_identity(const ImmersionState& state, const GeometryCache& c, double tol) {
  require_full(c);
  const int n = c.n, Dm = c.D;
  std::vector<double> r(c.nodes() * n * n);
  // Flat ambient: every curvature term and lambda vanish identically.
  if (state.ambient.kind == AmbientKind::FlatTorus) return make_report("ricci_contraction", c, r, n * n, tol);
  for (std::size_t node = 0; node < c.nodes(); ++node) {
    const Tensor4 R = riemann_at(state.ambient, state.point(node)).riemann;
    auto Rm = [&](const double* X, const double* Y, const double* Z, const double* W) {
      double s = 0.0;
      for (int a = 0; a < Dm; ++a)
        for (int b = 0; b < Dm; ++b) {
          const double xy = X[a] * Y[b];
          if (xy == 0.0) continue;
          for (int cc = 0; cc < Dm; ++cc)
            for (int d = 0; d < Dm; ++d) s += xy * R(a, b, cc, d) * Z[cc] * W[d];
        }
      return s;
    };
    double JF[2][kMaxRealDim];
    for (int i = 0; i < n; ++i) apply_complex_structure(Dm, Fvec(c, node, i), JF[i]);
    double omup[2][2], omupper[2][2];
    for (int i = 0; i < n; ++i)
      for (int p = 0; p < n; ++p) {
        double s = 0.0, t = 0.0;
        for (int q = 0; q < n; ++q) {
          s += at2(c.omega, n, node, i, q) * at2(c.g_inv, n, node, q, p);
          for (int m = 0; m < n; ++m)
            t += at2(c.g_inv, n, node, i, q) * at2(c.g_inv, n, node, p, m) * at2(c.omega, n, node, q, m);
        }
        omup[i][p] = s;
        omupper[i][p] = t;
      }
    for (int p = 0; p < n; ++p)
      for (int j = 0; j < n; ++j) {
        const double* Fj = Fvec(c, node, j);
        double T = 0.0;
        for (int i = 0; i < n; ++i)
          for (int k = 0; k < n; ++k) {
            T += at2(c.g_inv, n, node, i, k) * Rm(Nvec(c, node, p), Fj, Fvec(c, node, k), Nvec(c, node, i));
            T += 0.5 * omupper[k][i] * Rm(JF[p], Fj, Fvec(c, node, k), Fvec(c, node, i));
            for (int rr = 0; rr < n; ++rr) {
              T += 0.5 * at2(c.eta_inv, n, node, i, k) * omup[k][rr] *
                   Rm(JF[p], Fj, Nvec(c, node, rr), Nvec(c, node, i));
              T += at2(c.g_inv, n, node, i, k) * omup[p][rr] *
                   Rm(Fvec(c, node, rr), Fj, Fvec(c, node, k), Nvec(c, node, i));
            }
          }
        r[node * n * n + p * n + j] = T - c.lambda * at2(c.g, n, node, p, j);
      }
  }
  return make_report("ricci_contraction", c, r, n * n, tol);
}

double dH_cycle_integral(const GeometryCache& c) {
  if (c.n != 2) return 0.0;
  const TwoFormField dH = d1(covector(c.H, 2), c);
  double s = 0.0;
  for (double v : dH.v) s += v;
  return s * c.cell_volume();
}

SandwichCheck sandwich_check(const GeometryCache& c) {
  SandwichCheck out;
  const double s = c.sup(c.omega_norm2);
  if (!(s < 1.0)) return out;
  out.applicable = true;
  out.max_violation = -std::numeric_limits<double>::infinity();
  for (std::size_t node = 0; node < c.nodes(); ++node) {
    const double hg = c.H_norm2[node], he = c.H_norm2_eta[node];
    if (hg <= 0.0) {
      out.max_violation = std::max(out.max_violation, std::abs(he) > 0.0 ? 1.0 : -1.0);
      continue;
    }
    const double lo = hg / (1.0 + s), hi = hg / (1.0 - s);
    out.max_violation = std::max(out.max_violation, std::max(lo - he, he - hi) / hg);
  }
  return out;
}

std::vector<IdentityReport> identity_suite(const ImmersionState& state, const GeometryCache& cache) {
  std::vector<IdentityReport> out;
  out.push_back(identity_normality(cache));
  out.push_back(identity_eta_closed_form(cache));
  out.push_back(identity_xi_H_dstar_omega(cache));
  out.push_back(identity_index_commutation(cache));
  out.push_back(identity_dxiJ_rho(state, cache));
  out.push_back(identity_normal_metric_compat(cache));
  out.push_back(identity_xi_xiJ_error(cache));
  out.push_back(identity_dH_formula(cache));
  out.push_back(identity_hat_vs_levi_civita(cache));
  out.push_back(ricci_contraction_identity(state, cache));
  if (!cache.lagrangian_angle.empty()) out.push_back(identity_maslov_angle(cache));
  return out;
}

std::array<double, 2> second_fundamental_derivative_norms(const GeometryCache& c) {
  require_full(c);
  const int n = c.n, n3 = n * n * n, n4 = n3 * n;
  const std::size_t N = c.nodes();
  std::vector<std::vector<double>> dh(n);
  for (int l = 0; l < n; ++l) dh[l] = D(c, c.h, n3, l);
  // T[l][i][j][k] = nabla_l h_ijk
  std::vector<double> T(N * n4);
  for (std::size_t node = 0; node < N; ++node)
    for (int l = 0; l < n; ++l)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          for (int k = 0; k < n; ++k) {
            double v = dh[l][node * n3 + (i * n + j) * n + k];
            for (int s = 0; s < n; ++s)
              v -= at3(c.normal_connection, n, node, s, l, i) * at3(c.h, n, node, s, j, k) +
                   at3(c.christoffel, n, node, s, l, j) * at3(c.h, n, node, i, s, k) +
                   at3(c.christoffel, n, node, s, l, k) * at3(c.h, n, node, i, j, s);
            T[node * n4 + ((l * n + i) * n + j) * n + k] = v;
          }
  std::vector<std::vector<double>> dT(n);
  for (int m = 0; m < n; ++m) dT[m] = D(c, T, n4, m);
  double sup1 = 0.0, sup2 = 0.0;
  const int n5 = n4 * n;
  std::vector<double> U(n5), raised(n5);
  for (std::size_t node = 0; node < N; ++node) {
    const double* t = &T[node * n4];
    // |T|^2 with g on l, j, k and eta on i.
    double s1 = 0.0;
    for (int l = 0; l < n; ++l)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          for (int k = 0; k < n; ++k)
            for (int l2 = 0; l2 < n; ++l2)
              for (int i2 = 0; i2 < n; ++i2)
                for (int j2 = 0; j2 < n; ++j2)
                  for (int k2 = 0; k2 < n; ++k2)
                    s1 += at2(c.g_inv, n, node, l, l2) * at2(c.eta_inv, n, node, i, i2) *
                          at2(c.g_inv, n, node, j, j2) * at2(c.g_inv, n, node, k, k2) *
                          t[((l * n + i) * n + j) * n + k] * t[((l2 * n + i2) * n + j2) * n + k2];
    sup1 = std::max(sup1, s1);
    for (int m = 0; m < n; ++m)
      for (int l = 0; l < n; ++l)
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
              double v = dT[m][node * n4 + ((l * n + i) * n + j) * n + k];
              for (int s = 0; s < n; ++s)
                v -= at3(c.christoffel, n, node, s, m, l) * t[((s * n + i) * n + j) * n + k] +
                     at3(c.normal_connection, n, node, s, m, i) * t[((l * n + s) * n + j) * n + k] +
                     at3(c.christoffel, n, node, s, m, j) * t[((l * n + i) * n + s) * n + k] +
                     at3(c.christoffel, n, node, s, m, k) * t[((l * n + i) * n + j) * n + s];
              U[(((m * n + l) * n + i) * n + j) * n + k] = v;
            }
    // raise every index: metric per slot (m, l, j, k -> g; i -> eta)
    raised = U;
    int stride = 1;
    for (int slot = 4; slot >= 0; --slot) {
      const std::vector<double>& M = (slot == 2) ? c.eta_inv : c.g_inv;
      std::vector<double> next(n5, 0.0);
      for (int idx = 0; idx < n5; ++idx) {
        const int a = (idx / stride) % n;
        const int base = idx - a * stride;
        double acc = 0.0;
        for (int b = 0; b < n; ++b) acc += at2(M, n, node, a, b) * raised[base + b * stride];
        next[idx] = acc;
      }
      raised.swap(next);
      stride *= n;
    }
    double s2 = 0.0;
    for (int idx = 0; idx < n5; ++idx) s2 += U[idx] * raised[idx];
    sup2 = std::max(sup2, s2);
  }
  return {sup1, sup2};
}

double sup_grad_H(const GeometryCache& c) {
  require_full(c);
  const int n = c.n;
  std::vector<std::vector<double>> dH(n);
  for (int j = 0; j < n; ++j) dH[j] = D(c, c.H, n, j);
  double sup = 0.0;
  for (std::size_t node = 0; node < c.nodes(); ++node) {
    double T[2][2];
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        double v = dH[j][node * n + i];
        for (int s = 0; s < n; ++s) v -= at3(c.christoffel, n, node, s, j, i) * c.H[node * n + s];
        T[j][i] = v;
      }
    double s = 0.0;
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i)
        for (int a = 0; a < n; ++a)
          for (int b = 0; b < n; ++b) s += at2(c.g_inv, n, node, j, a) * at2(c.g_inv, n, node, i, b) * T[j][i] * T[a][b];
    sup = std::max(sup, std::sqrt(std::max(0.0, s)));
  }
  return sup;
}

}  // namespace trmcf
