#include "trmcf/flow.hpp"

#include "trmcf/errors.hpp"

#include <algorithm>
#include <cmath>

namespace trmcf {

namespace {

constexpr double kCohomologyTol = 1e-8;

}  // namespace

const char* to_string(L2ControlVerdict v) noexcept {
  switch (v) {
    case L2ControlVerdict::Satisfied: return "satisfied";
    case L2ControlVerdict::Violated: return "violated";
    case L2ControlVerdict::Vacuous: return "vacuous";
  }
  return "unknown";
}

bool within(double lhs, double rhs) { return lhs <= rhs * (1.0 + 1e-9) + 1e-12; }

EpsilonBudget epsilon_budget(const Baseline& b) {
  EpsilonBudget e;
  const int n = b.n;
  const double p = n + 2.0;
  e.B0 = std::pow(b.Lambda, n) * b.V * b.V;
  e.B1 = b.a / b.Lambda;
  e.B2 = b.kappa * std::pow(b.r0, n) / b.V;
  e.B3 = std::min(1.0, (b.lambda11 - b.lambda) / b.lambda11);
  const double k2 = b.kappa * b.kappa;
  e.first = std::min({b.R * b.R, std::pow(e.B3, 2.0 * p), std::pow(std::pow(e.B1, 6) * e.B3, p), k2 / e.B0,
                      std::pow(e.B2, p / (n + 1.0)), k2 * e.B1 * e.B1 * e.B3 / e.B0});
  e.second = std::min({std::pow(std::pow(e.B1, 2.0 * p) * k2 / e.B0, p), std::pow(e.B2 * e.B1 * e.B1, 2.0 * p),
                       std::pow(e.B1 * e.B2 * e.B3, p / (n + 1.0))});
  e.bound = std::min(e.first, e.second);
  e.caveat = "up to an unspecified dimensional constant C (evaluated with C = 1)";
  return e;
}

namespace {

void evaluate(ControlCertificate& c) {
  c.clause[0] = within(c.c1_lhs, c.c1_rhs);
  c.clause[1] = within(c.c2_lo, c.c2_vol) && within(c.c2_vol, c.c2_hi);
  c.clause[2] = within(c.c3_rhs, c.c3_lhs);
  c.clause[3] = within(c.c4_rhs, c.c4_lhs);
  c.clause[4] = within(c.c5_lhs, c.c5_rhs);
  c.line1 = c.decay_applicable && c.line1_lhs < c.line1_rhs;
  c.line2 = c.decay_applicable && c.line2_lhs < c.line2_rhs;
}

L2ControlVerdict l2_control_verdict(const ControlCertificate& c) {
  if (c.l2ctl_lambda == 0.0 && !(std::abs(c.l2ctl_cohomology) <= kCohomologyTol)) return L2ControlVerdict::Vacuous;
  if (!(c.l2ctl_hyp_lhs <= c.l2ctl_hyp_rhs)) return L2ControlVerdict::Vacuous;
  return within(c.l2ctl_lhs, c.l2ctl_rhs) ? L2ControlVerdict::Satisfied : L2ControlVerdict::Violated;
}

}  // namespace

ControlCertificate control_check(const DiagnosticsRecord& r, const Baseline& base, const ControlParams& params) {
  if (!std::isfinite(r.lambda11)) throw Error(ErrorKind::InvalidArgument, "control_check needs a spectrum");
  ControlCertificate c;
  c.t = r.t;
  c.b = params.b;
  c.epsilon = params.epsilon;
  const double b = params.b;
  const double lam = base.lambda;

  c.c1_lhs = r.sup_A2;
  c.c1_rhs = b * base.Lambda;
  c.c2_vol = r.vol;
  c.c2_lo = 1.0 / (b * base.V);
  c.c2_hi = b * base.V;
  c.c3_lhs = r.lambda11 - lam;
  c.c3_rhs = base.a / b;
  c.c4_lhs = r.kappa_lower;
  c.c4_rhs = base.kappa / b;
  c.c5_lhs = (base.Lambda > 0.0 ? r.sup_H2 / base.Lambda : 0.0) + r.sup_omega2;
  c.c5_rhs = params.epsilon;

  // Decay hypothesis over the elapsed interval (t0, t].
  const double Lambda = std::isfinite(params.Lambda_run) ? params.Lambda_run : r.sup_A2;
  const double a = lam < 0.0 ? -lam : (std::isfinite(params.a_run) ? params.a_run : r.lambda11 - lam);
  c.a = a;
  c.Lambda = Lambda;
  const bool class_ok = lam != 0.0 || std::abs(r.cohomology) <= kCohomologyTol;
  c.decay_applicable = r.t > params.t0 && params.t0 > 0.0 && a > 0.0 && Lambda > 0.0 && class_ok;
  const double ratio = (r.lambda11 - lam) / r.lambda11;
  if (Lambda > 0.0 && params.t0 > 0.0) {
    c.Psi = std::sqrt(Lambda / params.t0) + Lambda;
    c.B = 3380.0 * Lambda / a;
    c.q = std::min(a * a / (1600.0 * c.Psi), a / 16.0) * std::min(1.0, ratio);
    c.line1_lhs = std::sqrt(r.sup_H2 / Lambda) + std::sqrt(r.sup_omega2);
    c.line1_rhs = std::min(1.0, a / Lambda) * std::min({1.0, std::sqrt(a / c.Psi), a * a / (Lambda * c.Psi)}) *
                  std::min(1.0, std::sqrt(std::max(ratio, 0.0)));
  }
  c.line2_lhs = r.sup_omega2;
  c.line2_rhs = std::abs(a / (2.0 * lam + a));

  // L2 control of omega at the current time.
  const double a_now = lam < 0.0 ? -lam : r.lambda11 - lam;
  c.l2ctl_lambda = lam;
  c.l2ctl_cohomology = r.cohomology;
  c.l2ctl_hyp_lhs = r.sup_omega2;
  c.l2ctl_hyp_rhs = r.sup_A2 > 0.0 ? std::min(ratio, 1.0) * a_now / (4.0 * r.sup_A2) : INFINITY;
  c.l2ctl_lhs = a_now * r.int_omega2;
  c.l2ctl_rhs = 4.0 * std::max(1.0, r.lambda11 / (r.lambda11 - lam)) * r.int_H2;
  c.l2ctl = l2_control_verdict(c);

  c.budget = epsilon_budget(base);
  evaluate(c);
  return c;
}

bool certificate_consistent(const ControlCertificate& c) {
  ControlCertificate d = c;
  evaluate(d);
  return d.clause == c.clause && d.line1 == c.line1 && d.line2 == c.line2 && l2_control_verdict(c) == c.l2ctl;
}

}  // namespace trmcf
