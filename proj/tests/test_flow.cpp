#include "trmcf/errors.hpp"
#include "trmcf/flow.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace trmcf;

namespace {

constexpr double kPi = std::numbers::pi;

ImmersionState flat(int res, double eps = 0.0) {
  PresetParams p;
  p.name = "flat_lagrangian_torus";
  p.resolution = res;
  p.epsilon = eps;
  return preset(p);
}

ImmersionState circles(int res, double r = 1.0) {
  PresetParams p;
  p.name = "product_circles";
  p.resolution = res;
  p.radii = {r, r};
  return preset(p);
}

ImmersionState clifford(int res, double eps) {
  PresetParams p;
  p.name = "clifford_cp2";
  p.resolution = res;
  p.epsilon = eps;
  p.mode = {1, 1};
  return preset(p);
}

double mean_radius_sq(const ImmersionState& s) {
  double r2 = 0.0;
  for (std::size_t i = 0; i < s.grid.node_count(); ++i) {
    auto x = s.point(i);
    r2 += 0.5 * (x[0] * x[0] + x[1] * x[1] + x[2] * x[2] + x[3] * x[3]);
  }
  return r2 / static_cast<double>(s.grid.node_count());
}

FlowConfig quick(double t_max, double cfl = 0.2) {
  FlowConfig c;
  c.cfl = cfl;
  c.t_max = t_max;
  c.diag_stride = 5;
  c.eig_stride = 20;
  return c;
}

}  // namespace

TEST_CASE("flow config validation") {
  FlowConfig c;
  CHECK_NOTHROW(c.validate());
  c.cfl = 0.0;
  CHECK_THROWS_AS(c.validate(), Error);
  c = {};
  c.cfl = 0.6;
  CHECK_THROWS_AS(c.validate(), Error);
  c = {};
  c.diag_stride = 0;
  CHECK_THROWS_AS(c.validate(), Error);
  c = {};
  c.eig_stride = 0;
  try {
    c.validate();
    FAIL("expected a config error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Config);
  }
}

TEST_CASE("velocity") {
  const ImmersionState f = flat(16);
  const GeometryCache cf = build_geometry(f, GeometryLevel::Kinematic);
  for (double v : velocity(f, cf)) CHECK(std::abs(v) < 1e-12);

  const double r = 0.8;
  const ImmersionState s = circles(64, r);
  const GeometryCache c = build_geometry(s, GeometryLevel::Kinematic);
  const auto V = velocity(s, c);
  for (std::size_t node = 0; node < s.grid.node_count(); ++node) {
    auto x = s.point(node);
    for (int k = 0; k < 2; ++k) {
      // Inward radial velocity of magnitude 1/r in each factor.
      const double radial = (V[node * 4 + 2 * k] * x[2 * k] + V[node * 4 + 2 * k + 1] * x[2 * k + 1]) / r;
      CHECK(radial == doctest::Approx(-1.0 / r).epsilon(1e-5));
    }
  }
}

TEST_CASE("velocity is normal on all presets") {
  for (const ImmersionState& s : {flat(32, 0.05), circles(32), clifford(32, 0.02)}) {
    const GeometryCache c = build_geometry(s);
    CHECK(identity_normality(c).max_norm < 1e-12);
    const auto V = velocity(s, c);
    double worst = 0.0;
    for (std::size_t node = 0; node < s.grid.node_count(); ++node)
      for (int i = 0; i < 2; ++i) {
        double dot = 0.0;
        for (int a = 0; a < 4; ++a)
          for (int b = 0; b < 4; ++b)
            dot += c.ambient_metric[node * 16 + a * 4 + b] * V[node * 4 + a] * c.Fi[node * 8 + i * 4 + b];
        worst = std::max(worst, std::abs(dot));
      }
    CHECK(worst < 1e-12);
  }
}

TEST_CASE("timestep law") {
  const GeometryCache c = build_geometry(circles(32), GeometryLevel::Kinematic);
  const double h = physical_spacing(c);
  CHECK(h == doctest::Approx(2 * kPi / 32).epsilon(1e-4));
  const double supA = std::sqrt(c.sup(c.A_sq));
  CHECK(timestep(c, 0.05) == doctest::Approx(0.05 * h * h / (1 + supA * h)));
}

TEST_CASE("flat torus is a fixed point of the stepper") {
  const ImmersionState s = flat(16);
  FlowConfig fc;
  ImmersionState x = s;
  for (int k = 0; k < 5; ++k) {
    const ImmersionState y = step(x, fc);
    double d = 0.0;
    for (std::size_t i = 0; i < y.points.size(); ++i) d = std::max(d, std::abs(y.points[i] - x.points[i]));
    CHECK(d < 1e-12);
    CHECK(y.time > x.time);
    x = y;
  }
}

TEST_CASE("shrinking product circles follow r^2 = r0^2 - 2t") {
  Stepper st(circles(32), quick(0.3));
  while (st.state().time < 0.3) st.advance();
  CHECK(st.state().time == doctest::Approx(0.3));
  CHECK(mean_radius_sq(st.state()) == doctest::Approx(1.0 - 2 * 0.3).epsilon(1e-3));
}

TEST_CASE("perturbed flat torus: sup |omega| decreases") {
  Stepper st(flat(32, 0.05), quick(1.0));
  double prev = st.cache().sup(st.cache().omega_norm2);
  for (int k = 0; k < 10; ++k) {
    for (int j = 0; j < 20; ++j) st.advance();
    const double now = st.cache().sup(st.cache().omega_norm2);
    CHECK(now < prev);
    prev = now;
  }
  CHECK(st.rejections() == 0);
  CHECK(st.sup_AH() > 0.0);
}

TEST_CASE("evolution consistency") {
  {
    const GeometryCache a = build_geometry(flat(16)), b = build_geometry(step(flat(16), FlowConfig{}));
    const EvolutionResiduals r = evolution_consistency(a, b, 1e-3);
    CHECK(r.metric < 1e-12);
    CHECK(r.omega < 1e-12);
    CHECK(r.volume < 1e-12);
    CHECK(r.volume_density < 1e-12);
  }
  {
    // Volume rate of product circles at r = 1: -|H|^2_eta = -2.
    FlowConfig fc = quick(1e-4, 0.05);
    Stepper st(circles(64), fc);
    while (st.state().time < fc.t_max) st.advance();
    const GeometryCache a = build_geometry(circles(64)), b = build_geometry(st.state());
    const EvolutionResiduals r = evolution_consistency(a, b, st.state().time);
    CHECK(r.volume_rate == doctest::Approx(-2.0 / (1.0 - 2 * 0.5e-4)).epsilon(1e-3));
  }
  CHECK_THROWS_AS(evolution_consistency(build_geometry(flat(16)), build_geometry(flat(16)), 0.0), Error);
}

TEST_CASE("omega evolves by dH: second order in the time difference") {
  FlowConfig fc = quick(0.02);
  Stepper st(flat(32, 0.05), fc);
  while (st.state().time < fc.t_max) st.advance();
  const ImmersionState start = st.state();
  const GeometryCache c0 = build_geometry(start);
  auto residual = [&](double window) {
    FlowConfig f = fc;
    f.t_max = start.time + window;
    Stepper s(start, f);
    while (s.state().time < f.t_max) s.advance();
    return evolution_consistency(c0, build_geometry(s.state()), window);
  };
  const EvolutionResiduals a = residual(4e-3), b = residual(2e-3);
  CHECK(a.omega / b.omega > 3.5);
  CHECK(a.metric / b.metric > 3.3);
  CHECK(a.volume / b.volume > 3.3);
}

TEST_CASE("cohomology integral") {
  CHECK(std::abs(cohomology_integral(flat(32, 0.05))) < 1e-10);
  CHECK(cohomology_integral(flat(16)) == 0.0);
  Stepper st(clifford(16, 0.02), quick(1.0));
  const double c0 = cohomology_integral(st.cache());
  for (int k = 0; k < 50; ++k) st.advance();
  CHECK(std::abs(cohomology_integral(st.cache()) - c0) < 1e-10);
}

TEST_CASE("mu accumulation") {
  const std::vector<double> t{0.0, 0.1, 0.25, 0.7};
  CHECK(mu_accumulate(t, {0, 0, 0, 0}) == std::vector<double>{0, 0, 0, 0});
  const auto mu = mu_accumulate(t, {1.5, 1.5, 1.5, 1.5});
  for (std::size_t k = 0; k < t.size(); ++k) CHECK(mu[k] == doctest::Approx(2 * 1.5 * t[k]).epsilon(1e-15));

  // sup|A||H| = e^{-alpha t / 2}: mu(inf) = 4 / alpha.
  const double alpha = 10.0;
  std::vector<double> tt, v;
  for (int k = 0; k <= 20000; ++k) {
    tt.push_back(k * 5e-4);
    v.push_back(std::exp(-alpha * tt.back() / 2));
  }
  const auto m = mu_accumulate(tt, v);
  CHECK(m.back() == doctest::Approx(4.0 / alpha).epsilon(0.01));
  for (std::size_t k = 1; k < m.size(); ++k) CHECK(m[k] >= m[k - 1]);
  CHECK_THROWS_AS(mu_accumulate({0.0, 1.0}, {1.0}), Error);
}

TEST_CASE("envelopes") {
  const auto k0 = kappa_envelope(2.0, {0.0, 0.0}, 2);
  CHECK(k0 == std::vector<double>{2.0, 2.0});
  const auto k = kappa_envelope(1.0, {0.1}, 2);
  CHECK(k[0] == doctest::Approx(std::exp(-0.3)));
  const EigenEnvelope e0 = eigen_envelope(5.0, {0.0});
  CHECK(e0.lower[0] == 5.0);
  CHECK(e0.upper[0] == 5.0);
  const EigenEnvelope e = eigen_envelope(5.0, {0.2});
  CHECK(e.lower[0] == doctest::Approx(5.0 * std::exp(-0.6)));
  CHECK(e.upper[0] == doctest::Approx(5.0 * std::exp(0.6)));
}

TEST_CASE("sup from L2 bound") {
  CHECK(sup_from_l2(1, 1, 1, 1, 2) == doctest::Approx(4.0));
  double prev = INFINITY;
  for (double m : {1.0, 1e-2, 1e-4, 1e-8, 1e-12}) {
    const double b = sup_from_l2(1, m, 1, 1, 2);
    CHECK(b < prev);
    prev = b;
  }
  CHECK(prev < 1e-2);
  CHECK_THROWS_AS(sup_from_l2(0, 1, 1, 1, 2), Error);
  CHECK_THROWS_AS(sup_from_l2(1, 1, -1, 1, 2), Error);
}

TEST_CASE("kappa estimate on the flat unit torus") {
  const GeometryCache c = build_geometry(flat(32), GeometryLevel::Kinematic);
  const double r0 = default_r0(c);
  CHECK(r0 == doctest::Approx(0.5));
  const double k = kappa_estimate(c, r0);
  // Euclidean discs have Vol(B_r)/r^2 = pi; the graph metric is slightly longer.
  CHECK(k > 2.5);
  CHECK(k < kPi * 1.05);
  CHECK_THROWS_AS(kappa_estimate(c, 0.0), Error);
}

TEST_CASE("decay fit") {
  std::vector<double> t, v, flatv;
  for (int k = 0; k < 30; ++k) {
    t.push_back(0.05 * k);
    v.push_back(std::exp(-3.0 * t.back()));
    flatv.push_back(0.7);
  }
  const DecayFit f = decay_fit(t, v);
  CHECK(f.rate == doctest::Approx(3.0).epsilon(1e-10));
  CHECK(f.r_squared == doctest::Approx(1.0));
  CHECK(f.samples == 30);
  CHECK(decay_fit(t, flatv).rate == doctest::Approx(0.0).scale(1));
  const DecayFit w = decay_fit(t, v, 0.5, 1.225);
  CHECK(w.samples == 15);
  CHECK(w.t_start == doctest::Approx(0.5));
  auto bad = v;
  bad[3] = 0.0;
  CHECK_THROWS_AS(decay_fit(t, bad), Error);
  CHECK_THROWS_AS(decay_fit(t, v, 0.0, 0.3), Error);  // fewer than 10 samples
}

TEST_CASE("epsilon budget") {
  Baseline b;
  b.n = 2;
  b.Lambda = b.V = b.a = b.kappa = b.r0 = b.R = 1.0;
  b.lambda = 0.0;
  b.lambda11 = 1.0;
  const EpsilonBudget e = epsilon_budget(b);
  CHECK(e.B0 == 1.0);
  CHECK(e.B1 == 1.0);
  CHECK(e.B2 == 1.0);
  CHECK(e.B3 == 1.0);
  CHECK(e.first == doctest::Approx(1.0));
  CHECK(e.second == doctest::Approx(1.0));
  CHECK(e.caveat.find("constant C") != std::string::npos);

  Baseline d = b;
  d.Lambda = 2.0;
  const EpsilonBudget e2 = epsilon_budget(d);
  CHECK(e2.first < e.first);
  CHECK(e2.second < e.second);
  CHECK(e2.bound < e.bound);

  // Ambient rescaling g -> c^2 g: Lambda, a scale by c^-2, V by c^n, r0 by c.
  Baseline s;
  s.n = 2;
  s.Lambda = 3.0;
  s.V = 1.7;
  s.a = 20.0;
  s.kappa = 2.5;
  s.r0 = 0.4;
  s.lambda = 0.0;
  s.lambda11 = 20.0;
  Baseline r = s;
  const double c = 3.0;
  r.Lambda /= c * c;
  r.a /= c * c;
  r.lambda11 /= c * c;
  r.V *= c * c;
  r.r0 *= c;
  const EpsilonBudget es = epsilon_budget(s), er = epsilon_budget(r);
  CHECK(er.B0 == doctest::Approx(es.B0));
  CHECK(er.B1 == doctest::Approx(es.B1));
  CHECK(er.B2 == doctest::Approx(es.B2));
  CHECK(er.B3 == doctest::Approx(es.B3));
}

TEST_CASE("control certificates") {
  Baseline b;
  b.n = 2;
  b.Lambda = 0.0;
  b.V = 1.0;
  b.a = b.lambda11 = 4 * kPi * kPi;
  b.kappa = 3.0;
  b.r0 = 0.5;
  DiagnosticsRecord r;
  r.vol = 1.0;
  r.lambda0 = r.rho1 = r.lambda11 = b.lambda11;
  r.eig_exact = true;
  r.kappa_measured = r.kappa_lower = 3.0;
  ControlParams p;
  p.b = 1.0;
  p.epsilon = 0.3;
  const ControlCertificate c = control_check(r, b, p);
  for (bool clause : c.clause) CHECK(clause);
  CHECK(certificate_consistent(c));
  CHECK(c.l2ctl != L2ControlVerdict::Violated);

  DiagnosticsRecord missing = r;
  missing.lambda11 = kNaN;
  missing.eig_exact = false;
  CHECK_THROWS_AS(control_check(missing, b, p), Error);

  ControlCertificate tampered = c;
  tampered.c1_lhs = 10.0;
  CHECK_FALSE(certificate_consistent(tampered));

  CHECK(within(1.0, 1.0));
  CHECK(within(1.0 + 1e-12, 1.0));
  CHECK_FALSE(within(1.001, 1.0));
}

TEST_CASE("flat torus run is static") {
  FlowConfig fc = quick(1e-3);
  const RunResult r = run(flat(16), fc);
  CHECK_FALSE(r.blew_up);
  CHECK(r.stop_reason == "t_max");
  CHECK(r.records.size() >= 2);
  for (const auto& rec : r.records) {
    CHECK(rec.vol == doctest::Approx(1.0));
    CHECK(rec.sup_H2 < 1e-24);
    CHECK(rec.sup_omega2 < 1e-26);
    CHECK(rec.mu < 1e-12);
  }
  CHECK(std::isnan(r.fit.rate));
}

TEST_CASE("perturbed flat run: records, certificates and monitors") {
  FlowConfig fc = quick(0.15);
  fc.h_floor = 1e-9;
  int observed = 0;
  const RunResult r = run(flat(32, 0.02), fc, [&](const DiagnosticsRecord&) { ++observed; });
  CHECK(observed == static_cast<int>(r.records.size()));
  CHECK(r.records.size() > 10);
  CHECK_FALSE(r.certificates.empty());
  for (const auto& c : r.certificates) CHECK(certificate_consistent(c));
  CHECK(r.certificates.front().clause[4]);  // epsilon measured at t = 0
  for (std::size_t k = 1; k < r.records.size(); ++k) {
    CHECK(r.records[k].vol <= r.records[k - 1].vol * (1 + 1e-13));
    CHECK(r.records[k].mu >= r.records[k - 1].mu);
    CHECK(r.records[k].t > r.records[k - 1].t);
  }
  const MonitorSummary m = summarize_monitors(r);
  CHECK(m.all_ok());
  CHECK(m.l2ctl_violated == 0);
  CHECK(m.l2ctl_transition_ok);
  CHECK(m.cohomology_drift < 1e-12);
  CHECK(r.fit.samples >= 10);
  CHECK(r.fit.rate > r.baseline.a / 20);
  CHECK(r.baseline.lambda11 == doctest::Approx(4 * kPi * kPi).epsilon(0.02));
  CHECK(r.quantitatively_totally_real);
  const auto& cols = diagnostics_columns();
  CHECK(cols.size() == diagnostics_row(r.records[0]).size());
  const std::vector<std::string> head{"t",      "dt",          "vol",    "sup_A2",  "sup_H2", "sup_omega2", "int_H2",
                                      "int_omega2", "lambda0", "rho1", "lambda11", "mu",     "kappa_lower"};
  for (std::size_t k = 0; k < head.size(); ++k) CHECK(cols[k] == head[k]);
}

TEST_CASE("product circles run ends in blow-up near t = 1/2") {
  FlowConfig fc = quick(0.6);
  fc.diag_stride = 100;
  fc.eig_stride = 1000;
  const RunResult r = run(circles(16), fc);
  CHECK(r.blew_up);
  CHECK(r.stop_reason == "blow-up");
  CHECK_FALSE(r.blowup_message.empty());
  CHECK(r.final_state.time > 0.45);
  CHECK(r.final_state.time < 0.55);
}
