#include "trmcf/hodge.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace trmcf;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kFourPi2 = 4.0 * kPi * kPi;

GeometryCache flat_cache(int res, double eps = 0.0, std::vector<double> periods = {}) {
  PresetParams p;
  p.name = "flat_lagrangian_torus";
  p.resolution = res;
  p.epsilon = eps;
  p.mode = {1, 1};
  p.lattice_periods = std::move(periods);
  return build_geometry(preset(p));
}

// Smooth random trigonometric polynomial with modes |k|_inf <= 2.
ScalarField smooth_scalar(const GridSpec& grid, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  ScalarField f;
  f.v.assign(grid.node_count(), 0.0);
  for (int k0 = -2; k0 <= 2; ++k0)
    for (int k1 = -2; k1 <= 2; ++k1) {
      const double a = nd(rng), b = nd(rng);
      for (std::size_t node = 0; node < grid.node_count(); ++node) {
        const auto u = grid.parameter(node);
        const double ph = 2 * kPi * (k0 * u[0] / grid.periods[0] + k1 * u[1] / grid.periods[1]);
        f.v[node] += a * std::cos(ph) + b * std::sin(ph);
      }
    }
  return f;
}

OneFormField smooth_one_form(const GridSpec& grid, std::uint64_t seed) {
  const ScalarField a = smooth_scalar(grid, seed), b = smooth_scalar(grid, seed + 100);
  OneFormField w;
  w.n = 2;
  w.v.resize(2 * grid.node_count());
  for (std::size_t node = 0; node < grid.node_count(); ++node) {
    w.v[2 * node] = a.v[node];
    w.v[2 * node + 1] = b.v[node];
  }
  return w;
}

double sup_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

TEST_CASE("d after d vanishes to round-off") {
  for (double eps : {0.0, 0.05}) {
    const GeometryCache c = flat_cache(32, eps);
    const ScalarField f = smooth_scalar(c.grid, 1);
    const TwoFormField ddf = d1(d0(f, c), c);
    CHECK(sup_abs(ddf.v) < 1e-13 * sup_abs(f.v));
  }
}

TEST_CASE("exterior derivative against the symbolic oracle") {
  const GeometryCache c = flat_cache(64);
  ScalarField f;
  f.v.resize(c.nodes());
  for (std::size_t node = 0; node < c.nodes(); ++node) f.v[node] = std::sin(2 * kPi * c.grid.parameter(node)[0]);
  const OneFormField df = d0(f, c);
  double err = 0.0;
  for (std::size_t node = 0; node < c.nodes(); ++node) {
    err = std::max(err, std::abs(df.v[2 * node] - 2 * kPi * std::cos(2 * kPi * c.grid.parameter(node)[0])));
    err = std::max(err, std::abs(df.v[2 * node + 1]));
  }
  CHECK(err < 1e-4);

  OneFormField du1;
  du1.n = 2;
  du1.v.assign(2 * c.nodes(), 0.0);
  for (std::size_t node = 0; node < c.nodes(); ++node) du1.v[2 * node] = 1.0;
  CHECK(sup_abs(d1(du1, c).v) < 1e-13);
}

TEST_CASE("codifferentials of constant-coefficient forms vanish on the flat torus") {
  const GeometryCache c = flat_cache(32);
  OneFormField a;
  a.n = 2;
  a.v.assign(2 * c.nodes(), 0.0);
  for (std::size_t node = 0; node < c.nodes(); ++node) {
    a.v[2 * node] = 0.7;
    a.v[2 * node + 1] = -1.3;
  }
  CHECK(sup_abs(codifferential1(a, c).v) < 1e-12);
  TwoFormField w;
  w.n = 2;
  w.v.assign(c.nodes(), 2.5);
  CHECK(sup_abs(codifferential2(w, c).v) < 1e-12);
}

TEST_CASE("codifferentials are adjoint to d in the metric L2 product") {
  const GeometryCache c = flat_cache(64, 0.05);
  const ScalarField f = smooth_scalar(c.grid, 3);
  const OneFormField a = smooth_one_form(c.grid, 5);
  const double lhs0 = inner(d0(f, c), a, c), rhs0 = inner(f, codifferential1(a, c), c);
  CHECK(std::abs(lhs0 - rhs0) < 1e-6 * std::max(1.0, std::abs(lhs0)));

  TwoFormField w;
  w.n = 2;
  w.v = smooth_scalar(c.grid, 7).v;
  const double lhs1 = inner(d1(a, c), w, c), rhs1 = inner(a, codifferential2(w, c), c);
  CHECK(std::abs(lhs1 - rhs1) < 1e-6 * std::max(1.0, std::abs(lhs1)));
}

TEST_CASE("codifferential of omega matches xi - H") {
  const GeometryCache c = flat_cache(64, 0.02);
  const OneFormField ds = codifferential2(kahler_form_field(c), c);
  double err = 0.0, scale = 0.0;
  for (std::size_t k = 0; k < ds.v.size(); ++k) {
    err = std::max(err, std::abs(ds.v[k] - (c.xi[k] - c.H[k])));
    scale = std::max(scale, std::abs(ds.v[k]));
  }
  CHECK(scale > 0.1);
  CHECK(err < 1e-4 * scale);
}

TEST_CASE("Hodge Laplacian on flat forms") {
  const GeometryCache c = flat_cache(64);
  OneFormField du1, a;
  du1.n = a.n = 2;
  du1.v.assign(2 * c.nodes(), 0.0);
  a.v.assign(2 * c.nodes(), 0.0);
  for (std::size_t node = 0; node < c.nodes(); ++node) {
    du1.v[2 * node] = 1.0;
    a.v[2 * node] = std::cos(2 * kPi * c.grid.parameter(node)[0]);
  }
  CHECK(sup_abs(hodge_laplacian1(du1, c).v) < 1e-10);
  const OneFormField la = hodge_laplacian1(a, c);
  double err = 0.0;
  for (std::size_t k = 0; k < la.v.size(); ++k) err = std::max(err, std::abs(la.v[k] - kFourPi2 * a.v[k]));
  CHECK(err < 1e-3 * kFourPi2);
}

TEST_CASE("Hodge Laplacian is symmetric and nonnegative") {
  const GeometryCache c = flat_cache(64, 0.05);
  const OneFormField a = smooth_one_form(c.grid, 11), b = smooth_one_form(c.grid, 12);
  const double ab = inner(hodge_laplacian1(a, c), b, c), ba = inner(a, hodge_laplacian1(b, c), c);
  CHECK(std::abs(ab - ba) < 1e-8 * std::max(1.0, std::abs(ab)));
  for (std::uint64_t seed : {21u, 22u, 23u}) {
    const OneFormField x = smooth_one_form(c.grid, seed);
    CHECK(inner(hodge_laplacian1(x, c), x, c) >= -1e-10);
  }
}

TEST_CASE("spectrum of the flat unit square torus") {
  const GeometryCache c = flat_cache(64);
  const SpectrumResult s = spectrum(c);
  CHECK(s.lambda0 == doctest::Approx(kFourPi2).epsilon(0.01));
  CHECK(s.lambda11 == doctest::Approx(kFourPi2).epsilon(0.01));
  CHECK(s.harmonic_dimension == 2);
  CHECK(s.lambda11 == doctest::Approx(std::min(s.lambda0, s.rho1)).epsilon(1e-12));
  CHECK(s.lambda11_mixed == doctest::Approx(s.lambda11).epsilon(1e-8));
  CHECK(s.lambda0 > s.deflation_threshold);
  CHECK(s.rho1 > s.deflation_threshold);
  CHECK(s.residual_lambda0 < 1e-8);
  CHECK(s.residual_rho1 < 1e-8);
  CHECK(s.residual_mixed < 1e-8);
  CHECK(eigen_lambda0(c) == doctest::Approx(s.lambda0).epsilon(1e-12));
  CHECK(eigen_rho1(c) == doctest::Approx(s.rho1).epsilon(1e-12));
}

TEST_CASE("spectrum of the flat (1, 2) torus") {
  const GeometryCache c = flat_cache(64, 0.0, {1.0, 1.0, 2.0, 1.0});
  const SpectrumResult s = spectrum(c);
  CHECK(s.lambda11 == doctest::Approx(kPi * kPi).epsilon(0.01));
  CHECK(s.harmonic_dimension == 2);
}

TEST_CASE("spectrum without the mixed form") {
  SpectrumOptions o;
  o.mixed_form = false;
  const SpectrumResult s = spectrum(flat_cache(32, 0.02), o);
  CHECK(s.harmonic_dimension == -1);
  CHECK(s.lambda11 == doctest::Approx(std::min(s.lambda0, s.rho1)));
}

TEST_CASE("spectral lower bound for exact forms") {
  for (double eps : {0.0, 0.05}) {
    const GeometryCache c = flat_cache(64, eps);
    const double l11 = spectrum(c).lambda11;
    for (std::uint64_t seed : {31u, 32u}) {
      const OneFormField beta = smooth_one_form(c.grid, seed);
      const TwoFormField w = d1(beta, c);
      const OneFormField dsw = codifferential2(w, c);
      CHECK(inner(dsw, dsw, c) >= 0.98 * l11 * inner(w, w, c));
    }
  }
}

TEST_CASE("L2 products are vol_g weighted") {
  const GeometryCache c = flat_cache(32, 0.05);
  ScalarField one;
  one.v.assign(c.nodes(), 1.0);
  CHECK(inner(one, one, c) == doctest::Approx(c.volume()));
  CHECK(c.volume() > 1.0);
}
