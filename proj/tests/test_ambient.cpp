#include "trmcf/ambient.hpp"
#include "trmcf/errors.hpp"

#include <doctest.h>

#include <array>
#include <cmath>
#include <random>
#include <vector>

using namespace trmcf;

namespace {

std::vector<double> random_point(std::mt19937_64& rng, double radius) {
  std::uniform_real_distribution<double> u(-radius, radius);
  return {u(rng), u(rng), u(rng), u(rng)};
}

double kahler_potential(const std::vector<double>& p) {
  double r2 = 0.0;
  for (double x : p) r2 += x * x;
  return std::log1p(r2);
}

// Metric from the potential through central second differences:
// g = 2 Re h with h = d dbar K: g(du_j, du_k) = (K_{u_j u_k} + K_{v_j v_k}) / 2,
// g(du_j, dv_k) = (K_{u_j v_k} - K_{v_j u_k}) / 2.
Eigen::MatrixXd potential_metric(const std::vector<double>& p) {
  const double h = 1e-4;
  auto K2 = [&](int a, int b) {
    auto q = p;
    auto f = [&](double sa, double sb) {
      auto r = q;
      r[a] += sa;
      r[b] += sb;
      return kahler_potential(r);
    };
    return (f(h, h) - f(h, -h) - f(-h, h) + f(-h, -h)) / (4 * h * h);
  };
  Eigen::MatrixXd g(4, 4);
  for (int j = 0; j < 2; ++j)
    for (int k = 0; k < 2; ++k) {
      const int uj = 2 * j, vj = 2 * j + 1, uk = 2 * k, vk = 2 * k + 1;
      g(uj, uk) = g(vj, vk) = 0.5 * (K2(uj, uk) + K2(vj, vk));
      g(uj, vk) = 0.5 * (K2(uj, vk) - K2(vj, uk));
      g(vj, uk) = -g(uj, vk);
    }
  return g;
}

Tensor3 levi_civita_from_metric(const AmbientModel& m, const std::vector<double>& p) {
  const int D = 4;
  const double h = 1e-5;
  std::vector<Eigen::MatrixXd> dg(D);
  for (int c = 0; c < D; ++c) {
    auto a = p, b = p;
    a[c] += h;
    b[c] -= h;
    dg[c] = (metric_at(m, a) - metric_at(m, b)) / (2 * h);
  }
  const Eigen::MatrixXd ginv = metric_at(m, p).inverse();
  Tensor3 G(D);
  for (int c = 0; c < D; ++c)
    for (int a = 0; a < D; ++a)
      for (int b = 0; b < D; ++b) {
        double s = 0.0;
        for (int d = 0; d < D; ++d) s += ginv(c, d) * (dg[a](b, d) + dg[b](a, d) - dg[d](a, b));
        G(c, a, b) = 0.5 * s;
      }
  return G;
}

Eigen::MatrixXd standard_J() {
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(4, 4);
  J(1, 0) = 1;
  J(0, 1) = -1;
  J(3, 2) = 1;
  J(2, 3) = -1;
  return J;
}

}  // namespace

TEST_CASE("flat torus metric, complex structure, connection and curvature") {
  const AmbientModel m = AmbientModel::flat_torus(2);
  CHECK(m.ke_constant == 0.0);
  const std::vector<double> p{0.3, -1.2, 4.0, 0.7};
  CHECK(metric_at(m, p).isApprox(Eigen::MatrixXd::Identity(4, 4)));
  CHECK((complex_structure_at(m, p) - standard_J()).norm() == 0.0);
  const Tensor3 G = christoffel_at(m, p);
  for (double x : G.data) CHECK(x == 0.0);
  const CurvatureData R = riemann_at(m, p);
  for (double x : R.riemann.data) CHECK(x == 0.0);
  CHECK(R.ricci.norm() == 0.0);
}

TEST_CASE("complex structure squares to minus identity at random points") {
  std::mt19937_64 rng(11);
  for (const AmbientModel& m : {AmbientModel::flat_torus(2), AmbientModel::fubini_study(2)}) {
    for (int k = 0; k < 100; ++k) {
      const auto p = random_point(rng, 2.0);
      const Eigen::MatrixXd J = complex_structure_at(m, p);
      CHECK((J * J + Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-14);
      CHECK((J - standard_J()).norm() == 0.0);
    }
  }
}

TEST_CASE("Fubini-Study metric at the chart origin is twice the identity") {
  const AmbientModel m = AmbientModel::fubini_study(2);
  CHECK(m.ke_constant == doctest::Approx(3.0));
  const std::vector<double> o(4, 0.0);
  CHECK((metric_at(m, o) - 2.0 * Eigen::MatrixXd::Identity(4, 4)).norm() < 1e-15);
  for (double x : christoffel_at(m, o).data) CHECK(std::abs(x) < 1e-15);
}

TEST_CASE("Fubini-Study metric matches the Hessian of the Kahler potential") {
  const AmbientModel m = AmbientModel::fubini_study(2);
  const std::vector<double> p{0.3, 0.0, 0.0, 0.1};  // w = (0.3, 0.1 i)
  CHECK((metric_at(m, p) - potential_metric(p)).cwiseAbs().maxCoeff() < 1e-6);
  std::mt19937_64 rng(5);
  for (int k = 0; k < 10; ++k) {
    const auto q = random_point(rng, 1.5);
    CHECK((metric_at(m, q) - potential_metric(q)).cwiseAbs().maxCoeff() < 1e-6);
  }
}

TEST_CASE("Fubini-Study Christoffel symbols match finite differences of the metric") {
  const AmbientModel m = AmbientModel::fubini_study(2);
  const std::vector<double> p{0.2, 0.0, 0.0, 0.0};
  const Tensor3 G = christoffel_at(m, p), ref = levi_civita_from_metric(m, p);
  for (std::size_t i = 0; i < G.data.size(); ++i) CHECK(G.data[i] == doctest::Approx(ref.data[i]).epsilon(1e-8).scale(1));
  // Symmetric in the lower indices.
  for (int c = 0; c < 4; ++c)
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) CHECK(G(c, a, b) == G(c, b, a));
}

TEST_CASE("metric invariants at random chart points") {
  std::mt19937_64 rng(3);
  for (const AmbientModel& m : {AmbientModel::flat_torus(2), AmbientModel::fubini_study(2)}) {
    for (int k = 0; k < 50; ++k) {
      const auto p = random_point(rng, 3.0);
      const Eigen::MatrixXd g = metric_at(m, p), J = complex_structure_at(m, p);
      CHECK((g - g.transpose()).norm() < 1e-15);
      CHECK(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(g).eigenvalues().minCoeff() > 0.0);
      CHECK((J.transpose() * g * J - g).cwiseAbs().maxCoeff() < 1e-12);
      const Eigen::MatrixXd w = J.transpose() * g;  // omega(X, Y) = g(JX, Y)
      CHECK((w + w.transpose()).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("Fubini-Study curvature: Einstein constant, symmetries, Bianchi") {
  const AmbientModel m = AmbientModel::fubini_study(2);
  std::mt19937_64 rng(17);
  double ric_err = 0.0, sym_err = 0.0, bianchi = 0.0;
  for (int k = 0; k < 100; ++k) {
    const auto p = random_point(rng, 2.0);
    const CurvatureData R = riemann_at(m, p);
    const Eigen::MatrixXd g = metric_at(m, p), ginv = g.inverse();
    const auto& Rm = R.riemann;
    for (int b = 0; b < 4; ++b)
      for (int c = 0; c < 4; ++c) {
        double ric = 0.0;
        for (int a = 0; a < 4; ++a)
          for (int d = 0; d < 4; ++d) ric += ginv(a, d) * Rm(a, b, c, d);
        ric_err = std::max(ric_err, std::abs(ric - 3.0 * g(b, c)) / g.norm());
        ric_err = std::max(ric_err, std::abs(R.ricci(b, c) - 3.0 * g(b, c)) / g.norm());
      }
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b)
        for (int c = 0; c < 4; ++c)
          for (int d = 0; d < 4; ++d) {
            sym_err = std::max({sym_err, std::abs(Rm(a, b, c, d) + Rm(b, a, c, d)),
                                std::abs(Rm(a, b, c, d) + Rm(a, b, d, c)), std::abs(Rm(a, b, c, d) - Rm(c, d, a, b))});
            bianchi = std::max(bianchi, std::abs(Rm(a, b, c, d) + Rm(b, c, a, d) + Rm(c, a, b, d)));
          }
    CHECK((R.ricci - R.ricci.transpose()).norm() < 1e-12);
  }
  CHECK(ric_err < 1e-10);
  CHECK(sym_err < 1e-12);
  CHECK(bianchi < 1e-12);
}

TEST_CASE("Fubini-Study curvature agrees with finite differences of the Christoffel symbols") {
  const AmbientModel m = AmbientModel::fubini_study(2);
  const std::vector<double> p{0.4, -0.2, 0.1, 0.3};
  const double h = 1e-5;
  std::vector<Tensor3> dG;
  for (int e = 0; e < 4; ++e) {
    auto a = p, b = p;
    a[e] += h;
    b[e] -= h;
    Tensor3 d(4), ga = christoffel_at(m, a), gb = christoffel_at(m, b);
    for (std::size_t i = 0; i < d.data.size(); ++i) d.data[i] = (ga.data[i] - gb.data[i]) / (2 * h);
    dG.push_back(d);
  }
  const Tensor3 G = christoffel_at(m, p);
  const Eigen::MatrixXd g = metric_at(m, p);
  const CurvatureData R = riemann_at(m, p);
  double err = 0.0;
  // R(e_a, e_b) e_c = R^e_{abc} e_e with R^e_{abc} = d_a G^e_bc - d_b G^e_ac + G^e_af G^f_bc - G^e_bf G^f_ac.
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int c = 0; c < 4; ++c)
        for (int d = 0; d < 4; ++d) {
          double s = 0.0;
          for (int e = 0; e < 4; ++e) {
            double r = dG[a](e, b, c) - dG[b](e, a, c);
            for (int f = 0; f < 4; ++f) r += G(e, a, f) * G(f, b, c) - G(e, b, f) * G(f, a, c);
            s += r * g(e, d);
          }
          err = std::max(err, std::abs(s - R.riemann(a, b, c, d)));
        }
  CHECK(err < 1e-7);
}

TEST_CASE("chart guard") {
  const AmbientModel m = AmbientModel::fubini_study(2, 2.0);
  const std::vector<double> inside{1.0, 0.0, 0.0, 0.5}, outside{2.5, 0.0, 0.0, 0.0};
  CHECK(chart_margin(m, inside) > 0.0);
  CHECK(chart_margin(m, outside) < 0.0);
  CHECK_NOTHROW(check_chart(m, inside));
  try {
    metric_at(m, outside);
    FAIL("expected a chart-guard error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ChartGuard);
  }
  CHECK(std::isinf(chart_margin(AmbientModel::flat_torus(2), outside)));
}

TEST_CASE("verify_ke reports") {
  const KeReport flat = verify_ke(AmbientModel::flat_torus(2), 20);
  CHECK(flat.ricci_residual == 0.0);
  for (double c : flat.curvature_norm) CHECK(c == 0.0);

  const KeReport a = verify_ke(AmbientModel::fubini_study(2), 40, 1);
  const KeReport b = verify_ke(AmbientModel::fubini_study(2), 40, 2);
  CHECK(a.ricci_residual < 1e-10);
  CHECK(std::isfinite(a.curvature_norm[0]));
  CHECK(a.curvature_norm[0] > 0.0);
  CHECK(a.rm_norm_max - a.rm_norm_min < 1e-9 * a.rm_norm_max);
  CHECK(a.curvature_norm[0] == doctest::Approx(b.curvature_norm[0]).epsilon(1e-9));
  CHECK(a.curvature_norm[1] < 1e-5);
  CHECK(a.satisfies_local_bounds(a.curvature_norm[0]));
}

TEST_CASE("model validation and naming") {
  CHECK(std::string(to_string(AmbientKind::FubiniStudy)) == "fubini-study");
  CHECK(ambient_kind_from_string("flat-torus") == AmbientKind::FlatTorus);
  CHECK_THROWS_AS(ambient_kind_from_string("hyperbolic"), Error);
  AmbientModel bad = AmbientModel::flat_torus(2);
  bad.ke_constant = 1.0;
  CHECK_THROWS_AS(bad.validate(), Error);
}
