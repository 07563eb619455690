#include "trmcf/flow.hpp"

#include "trmcf/errors.hpp"

#include <algorithm>
#include <cmath>

namespace trmcf {

const std::vector<std::string>& diagnostics_columns() {
  static const std::vector<std::string> cols = {
      "t", "dt", "vol", "sup_A2", "sup_H2", "sup_omega2", "int_H2", "int_omega2", "lambda0", "rho1", "lambda11",
      "mu", "kappa_lower", "res_xi_H_dstar", "res_index", "res_dxiJ_rho", "res_ricci", "evo_metric", "evo_omega",
      "evo_volume", "chart_margin", "step", "int_H2_eta", "eig_exact", "harmonic_dimension", "kappa_measured",
      "lambda_env_lower", "lambda_env_upper", "sup_AH", "sup_grad_H", "sup_H_bound", "cohomology", "sandwich",
      "smoothing1", "smoothing2"};
  return cols;
}

std::vector<double> diagnostics_row(const DiagnosticsRecord& r) {
  return {r.t, r.dt, r.vol, r.sup_A2, r.sup_H2, r.sup_omega2, r.int_H2, r.int_omega2, r.lambda0, r.rho1,
          r.lambda11, r.mu, r.kappa_lower, r.res_xi_H_dstar, r.res_index, r.res_dxiJ_rho, r.res_ricci,
          r.evo_metric, r.evo_omega, r.evo_volume, r.chart_margin, static_cast<double>(r.step), r.int_H2_eta,
          r.eig_exact ? 1.0 : 0.0, static_cast<double>(r.harmonic_dimension), r.kappa_measured,
          r.lambda_env_lower, r.lambda_env_upper, r.sup_AH, r.sup_grad_H, r.sup_H_bound, r.cohomology,
          r.sandwich, r.smoothing1, r.smoothing2};
}

namespace {

double sup_AH_of(const GeometryCache& c) {
  double s = 0.0;
  for (std::size_t i = 0; i < c.nodes(); ++i) s = std::max(s, std::sqrt(c.A_sq[i] * c.H_norm2[i]));
  return s;
}

void fill_basic(DiagnosticsRecord& r, const ImmersionState& s, const GeometryCache& c) {
  r.t = s.time;
  r.vol = c.volume();
  r.sup_A2 = c.sup(c.A_sq);
  r.sup_H2 = c.sup(c.H_norm2);
  r.sup_omega2 = c.sup(c.omega_norm2);
  r.int_H2 = c.integrate(c.H_norm2);
  r.int_omega2 = c.integrate(c.omega_norm2);
  r.int_H2_eta = c.integrate(c.H_norm2_eta);
  r.chart_margin = chart_margin(s);
  r.sup_AH = sup_AH_of(c);
  r.cohomology = cohomology_integral(c);
}

}  // namespace

RunResult run(const ImmersionState& initial, const FlowConfig& cfg, const RecordObserver& observer) {
  cfg.validate();
  initial.validate();
  RunResult out;
  const int n = initial.grid.dim;

  GeometryCache c0 = build_geometry(initial, GeometryLevel::Full);
  Baseline& base = out.baseline;
  base.n = n;
  base.Lambda = c0.sup(c0.A_sq);
  base.V = c0.volume();
  base.lambda = c0.lambda;
  base.R = cfg.R;
  base.r0 = cfg.r0 > 0.0 ? cfg.r0 : default_r0(c0);
  base.kappa = kappa_estimate(c0, base.r0);
  const SpectrumOptions sopt{cfg.spectrum_modes, true};
  if (cfg.spectra) {
    out.initial_spectrum = spectrum(c0, sopt);
    base.lambda11 = out.initial_spectrum.lambda11;
    base.a = base.lambda < 0.0 ? -base.lambda : base.lambda11 - base.lambda;
  } else {
    base.lambda11 = kNaN;
    base.a = kNaN;
  }
  const double sup_H2_0 = c0.sup(c0.H_norm2);
  const double sup_om2_0 = c0.sup(c0.omega_norm2);
  out.epsilon_used = cfg.control_epsilon >= 0.0
                         ? cfg.control_epsilon
                         : (base.Lambda > 0.0 ? sup_H2_0 / base.Lambda : 0.0) + sup_om2_0;
  out.l2_smallness = (base.Lambda > 0.0 ? c0.integrate(c0.H_norm2) / std::sqrt(base.Lambda) : 0.0) +
                     c0.integrate(c0.omega_norm2);
  out.quantitatively_totally_real = sup_om2_0 < 1.0 - cfg.delta;
  if (cfg.identities) out.initial_identities = identity_suite(initial, c0);

  const double blowup_level = cfg.blowup_factor * std::max(base.Lambda, 1.0);
  double t0 = cfg.t0 >= 0.0 ? cfg.t0 : INFINITY;
  double a_run = INFINITY, Lambda_run = base.Lambda;
  long last_eig_step = -1;
  double mu = 0.0;
  GeometryCache prev_cache;
  double prev_time = 0.0;
  bool have_prev = false;

  auto record = [&](const ImmersionState& s, long step, double dt, bool final_record) {
    GeometryCache c = build_geometry(s, GeometryLevel::Full);
    DiagnosticsRecord r;
    r.step = step;
    r.dt = dt;
    fill_basic(r, s, c);
    r.mu = mu;
    r.kappa_lower = base.kappa * std::exp(-(n + 1) * mu);
    if (cfg.identities) {
      r.res_xi_H_dstar = identity_xi_H_dstar_omega(c).max_norm;
      r.res_index = identity_index_commutation(c).max_norm;
      r.res_dxiJ_rho = identity_dxiJ_rho(s, c).max_norm;
      r.res_ricci = ricci_contraction_identity(s, c).max_norm;
    }
    if (cfg.evolution && have_prev && s.time > prev_time) {
      const auto e = evolution_consistency(prev_cache, c, s.time - prev_time);
      r.evo_metric = e.metric;
      r.evo_omega = e.omega;
      r.evo_volume = e.volume;
    }
    const auto sw = sandwich_check(c);
    r.sandwich = sw.applicable ? sw.max_violation : kNaN;
    r.sup_grad_H = sup_grad_H(c);
    r.sup_H_bound = (r.sup_grad_H > 0.0 && r.int_H2 > 0.0)
                        ? sup_from_l2(r.sup_grad_H, r.int_H2, r.kappa_lower, base.r0, n)
                        : kNaN;
    if (cfg.smoothing && base.Lambda > 0.0 && s.time > 0.0) {
      const auto dA = second_fundamental_derivative_norms(c);
      r.smoothing1 = s.time * dA[0] / base.Lambda;
      r.smoothing2 = s.time * s.time * dA[1] / base.Lambda;
    }
    if (!std::isfinite(t0) && step >= 10) t0 = s.time;
    const bool eig_due = step == 0 || final_record || step - last_eig_step >= cfg.eig_stride;
    if (cfg.spectra && eig_due) {
      const SpectrumResult sr = spectrum(c, sopt);
      r.lambda0 = sr.lambda0;
      r.rho1 = sr.rho1;
      r.lambda11 = sr.lambda11;
      r.harmonic_dimension = sr.harmonic_dimension;
      r.eig_exact = true;
      r.kappa_measured = kappa_estimate(c, base.r0);
      last_eig_step = step;
    }
    if (cfg.spectra) {
      r.lambda_env_lower = base.lambda11 * std::exp(-3.0 * mu);
      r.lambda_env_upper = base.lambda11 * std::exp(3.0 * mu);
    }
    Lambda_run = std::max(Lambda_run, r.sup_A2);
    if (r.eig_exact) {
      if (r.t > t0 || !std::isfinite(a_run)) {
        const double a_now = base.lambda < 0.0 ? -base.lambda : r.lambda11 - base.lambda;
        a_run = r.t > t0 ? std::min(a_run, a_now) : a_now;
      }
      ControlParams p{cfg.control_b, out.epsilon_used, t0, a_run, Lambda_run};
      out.certificates.push_back(control_check(r, base, p));
    }
    out.records.push_back(r);
    if (observer) observer(r);
    prev_cache = std::move(c);
    prev_time = s.time;
    have_prev = true;
  };

  Stepper st(initial, cfg);
  record(st.state(), 0, 0.0, cfg.t_max <= initial.time || cfg.max_steps == 0);
  long last_record_step = 0;
  auto stop_reason = [&]() -> std::string {
    if (st.state().time >= cfg.t_max * (1.0 - 1e-14)) return "t_max";
    if (st.steps() >= cfg.max_steps) return "max_steps";
    if (cfg.h_floor > 0.0 && std::sqrt(st.cache().sup(st.cache().H_norm2)) < cfg.h_floor) return "h_floor";
    if (st.cache().sup(st.cache().A_sq) > blowup_level) return "blow-up";
    return {};
  };
  std::string reason = stop_reason();
  double last_dt = 0.0;
  while (reason.empty()) {
    const double ah_old = st.sup_AH();
    try {
      last_dt = st.advance();
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::BlowUp) throw;
      reason = "blow-up";
      out.blowup_message = e.what();
      if (st.steps() != last_record_step) {
        try {
          record(st.state(), st.steps(), last_dt, true);
        } catch (const Error&) {
          // the last accepted state is already degenerate
        }
      }
      break;
    }
    mu += last_dt * (ah_old + st.sup_AH());
    Lambda_run = std::max(Lambda_run, st.cache().sup(st.cache().A_sq));
    reason = stop_reason();
    if (reason == "blow-up")
      out.blowup_message = "sup|A|^2 = " + std::to_string(st.cache().sup(st.cache().A_sq)) +
                           " exceeded " + std::to_string(blowup_level) + " at t = " +
                           std::to_string(st.state().time);
    const bool final_record = !reason.empty();
    if (final_record || st.steps() - last_record_step >= cfg.diag_stride) {
      try {
        record(st.state(), st.steps(), last_dt, final_record);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::Immersion && e.kind() != ErrorKind::TotallyReal &&
            e.kind() != ErrorKind::ChartGuard)
          throw;
        reason = "blow-up";
        out.blowup_message = e.what();
      }
      last_record_step = st.steps();
    }
  }
  out.blew_up = reason == "blow-up";
  out.stop_reason = reason;
  out.final_state = st.state();
  out.t0 = t0;

  // Linear interpolation of the spectrum between exact evaluations.
  auto& R = out.records;
  for (std::size_t i = 0; i < R.size(); ++i) {
    if (R[i].eig_exact || !cfg.spectra) continue;
    std::size_t lo = i, hi = i;
    while (lo > 0 && !R[lo].eig_exact) --lo;
    while (hi + 1 < R.size() && !R[hi].eig_exact) ++hi;
    if (!R[lo].eig_exact || !R[hi].eig_exact) continue;
    const double w = (R[i].t - R[lo].t) / (R[hi].t - R[lo].t);
    R[i].lambda0 = (1 - w) * R[lo].lambda0 + w * R[hi].lambda0;
    R[i].rho1 = (1 - w) * R[lo].rho1 + w * R[hi].rho1;
    R[i].lambda11 = (1 - w) * R[lo].lambda11 + w * R[hi].lambda11;
  }

  if (cfg.identities) {
    try {
      out.final_identities = identity_suite(out.final_state, build_geometry(out.final_state, GeometryLevel::Full));
    } catch (const Error&) {
      // degenerate final geometry: nothing to report
    }
  }

  if (cfg.decay) {
    std::vector<double> t, v;
    const double floor = R.empty() ? 0.0 : 1e-16 * R.front().int_H2;
    for (const auto& r : R)
      if (r.int_H2 > floor && r.int_H2 > 0.0) {
        t.push_back(r.t);
        v.push_back(r.int_H2);
      }
    const double start = cfg.fit_start >= 0.0 ? cfg.fit_start : (std::isfinite(t0) ? t0 : 0.0);
    const double end = cfg.fit_end >= 0.0 ? cfg.fit_end : INFINITY;
    try {
      out.fit = decay_fit(t, v, start, end);
    } catch (const Error&) {
      out.fit = DecayFit{};
      out.fit.rate = kNaN;
      out.fit.r_squared = kNaN;
    }
  }
  return out;
}

}  // namespace trmcf
