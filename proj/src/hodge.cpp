#include "trmcf/hodge.hpp"

#include "trmcf/errors.hpp"

#include <cmath>

namespace trmcf {

namespace {

void require_match(const GeometryCache& cache, std::size_t size, int ncomp) {
  if (size != cache.nodes() * static_cast<std::size_t>(ncomp))
    throw Error(ErrorKind::InvalidArgument, "form field does not match the grid");
}

}  // namespace

OneFormField one_form_field(const std::vector<double>& values, int n) { return {n, values}; }

TwoFormField kahler_form_field(const GeometryCache& cache) {
  TwoFormField w{cache.n, {}};
  if (cache.n == 2) {
    w.v.resize(cache.nodes());
    for (std::size_t i = 0; i < cache.nodes(); ++i) w.v[i] = cache.omega[i * 4 + 1];
  }
  return w;
}

OneFormField d0(const ScalarField& f, const GeometryCache& cache) {
  require_match(cache, f.v.size(), 1);
  const int n = cache.n;
  const std::size_t N = cache.nodes();
  OneFormField out{n, std::vector<double>(N * n)};
  std::vector<double> tmp(N);
  for (int i = 0; i < n; ++i) {
    differentiate(cache.grid, f.v, 1, i, tmp);
    for (std::size_t node = 0; node < N; ++node) out.v[node * n + i] = tmp[node];
  }
  return out;
}

TwoFormField d1(const OneFormField& alpha, const GeometryCache& cache) {
  require_match(cache, alpha.v.size(), cache.n);
  TwoFormField out{cache.n, {}};
  if (cache.n < 2) return out;
  const std::size_t N = cache.nodes();
  std::vector<double> a1(N), a2(N), d1a2(N), d2a1(N);
  for (std::size_t node = 0; node < N; ++node) {
    a1[node] = alpha.v[node * 2];
    a2[node] = alpha.v[node * 2 + 1];
  }
  differentiate(cache.grid, a2, 1, 0, d1a2);
  differentiate(cache.grid, a1, 1, 1, d2a1);
  out.v.resize(N);
  for (std::size_t node = 0; node < N; ++node) out.v[node] = d1a2[node] - d2a1[node];
  return out;
}

ScalarField codifferential1(const OneFormField& alpha, const GeometryCache& cache) {
  require_match(cache, alpha.v.size(), cache.n);
  const int n = cache.n;
  const std::size_t N = cache.nodes();
  ScalarField out{std::vector<double>(N, 0.0)};
  std::vector<double> flux(N), div(N);
  for (int i = 0; i < n; ++i) {
    for (std::size_t node = 0; node < N; ++node) {
      double s = 0.0;
      for (int j = 0; j < n; ++j) s += cache.g_inv[node * n * n + i * n + j] * alpha.v[node * n + j];
      flux[node] = cache.sqrt_det_g[node] * s;
    }
    differentiate(cache.grid, flux, 1, i, div);
    for (std::size_t node = 0; node < N; ++node) out.v[node] -= div[node] / cache.sqrt_det_g[node];
  }
  return out;
}

OneFormField codifferential2(const TwoFormField& w, const GeometryCache& cache) {
  const int n = cache.n;
  const std::size_t N = cache.nodes();
  OneFormField out{n, std::vector<double>(N * n, 0.0)};
  if (n < 2) return out;
  require_match(cache, w.v.size(), 1);
  // sqrt(g) w^{12} = w_12 / sqrt(g)
  std::vector<double> b(N), db1(N), db2(N);
  for (std::size_t node = 0; node < N; ++node) b[node] = w.v[node] / cache.sqrt_det_g[node];
  differentiate(cache.grid, b, 1, 0, db1);
  differentiate(cache.grid, b, 1, 1, db2);
  for (std::size_t node = 0; node < N; ++node) {
    const double s = cache.sqrt_det_g[node];
    const double v1 = -db2[node] / s;  // (1/sqrt g) D_k(sqrt g w^{k1}) = -(1/sqrt g) D_2 b
    const double v2 = db1[node] / s;
    const double* g = &cache.g[node * 4];
    out.v[node * 2] = -(g[0] * v1 + g[1] * v2);
    out.v[node * 2 + 1] = -(g[2] * v1 + g[3] * v2);
  }
  return out;
}

OneFormField hodge_laplacian1(const OneFormField& alpha, const GeometryCache& cache) {
  OneFormField a = d0(codifferential1(alpha, cache), cache);
  const OneFormField b = codifferential2(d1(alpha, cache), cache);
  for (std::size_t i = 0; i < a.v.size(); ++i) a.v[i] += b.v[i];
  return a;
}

double inner(const ScalarField& a, const ScalarField& b, const GeometryCache& cache) {
  double s = 0.0;
  for (std::size_t node = 0; node < cache.nodes(); ++node) s += a.v[node] * b.v[node] * cache.sqrt_det_g[node];
  return s * cache.cell_volume();
}

double inner(const OneFormField& a, const OneFormField& b, const GeometryCache& cache) {
  const int n = cache.n;
  double s = 0.0;
  for (std::size_t node = 0; node < cache.nodes(); ++node) {
    double t = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) t += a.v[node * n + i] * cache.g_inv[node * n * n + i * n + j] * b.v[node * n + j];
    s += t * cache.sqrt_det_g[node];
  }
  return s * cache.cell_volume();
}

double inner(const TwoFormField& a, const TwoFormField& b, const GeometryCache& cache) {
  if (cache.n < 2) return 0.0;
  double s = 0.0;
  for (std::size_t node = 0; node < cache.nodes(); ++node) s += a.v[node] * b.v[node] / cache.sqrt_det_g[node];
  return s * cache.cell_volume();
}

}  // namespace trmcf
