#pragma once

#include "trmcf/geometry.hpp"
#include "trmcf/hodge.hpp"

#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace trmcf {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct FlowConfig {
  double cfl = 0.05;                 // dt = cfl h^2 / (1 + sup|A| h), h = smallest physical spacing
  double t_max = 1.0;
  long max_steps = 10'000'000;
  int diag_stride = 10;
  int eig_stride = 10;
  double h_floor = 0.0;              // stop once sup|H| falls below this
  double blowup_factor = 1e3;        // blow-up once sup|A|^2 > factor * max(Lambda_0, 1)
  double growth_limit = 0.2;         // reject steps growing sup|A|^2 by more than this fraction
  double dt_floor = 1e-12;
  double fit_start = -1.0;           // decay-fit window; negative = automatic
  double fit_end = -1.0;
  double t0 = -1.0;                  // smoothing onset; negative = first record after 10 steps
  int spectrum_modes = 6;
  double control_b = 4.0;
  double control_epsilon = -1.0;     // negative = measured at t = 0
  double r0 = -1.0;                  // non-collapsing scale; negative = half the shortest physical period
  double R = 1.0;                    // curvature-ball radius entering the epsilon budget
  double delta = 0.5;                // quantitative totally real margin sup|omega|^2 < 1 - delta
  bool identities = true;
  bool evolution = true;
  bool spectra = true;
  bool decay = true;
  bool smoothing = true;

  void validate() const;
};

// Mean curvature vector field H = -eta^{mp} H_m N_p per node (real_dim values each).
std::vector<double> velocity(const ImmersionState& state, const GeometryCache& cache);

// dt law evaluated on a cache.
double timestep(const GeometryCache& cache, double cfl);
double physical_spacing(const GeometryCache& cache);

// One classical RK4 step with rejection; throws Error(BlowUp) when dt drops below the floor
// or the geometry degenerates.
ImmersionState step(const ImmersionState& state, const FlowConfig& config);

class Stepper {
 public:
  Stepper(ImmersionState state, const FlowConfig& config);
  // One accepted step; returns the dt taken.
  double advance();
  const ImmersionState& state() const { return state_; }
  const GeometryCache& cache() const { return cache_; }
  long steps() const { return steps_; }
  int rejections() const { return rejections_; }
  // sup over nodes of |A| |H| at the current state.
  double sup_AH() const;

 private:
  ImmersionState state_;
  FlowConfig config_;
  GeometryCache cache_;
  long steps_ = 0;
  int rejections_ = 0;
};

struct EvolutionResiduals {
  double metric = 0.0;          // |dg/dt - 2 H^p h_pij|_inf
  double omega = 0.0;           // |d omega_ij/dt - (d_i H_j - d_j H_i)|_inf
  double volume_density = 0.0;  // |d sqrt(g)/dt + |H|_eta^2 sqrt(g)|_inf
  double volume = 0.0;          // |dV/dt + int |H|_eta^2|
  double volume_rate = 0.0;     // (dV/dt) / V from the time difference
};

// Central time difference between two states against the trapezoidal average of the right sides.
EvolutionResiduals evolution_consistency(const GeometryCache& prev, const GeometryCache& next, double dt);

// Quadrature of omega over the fundamental 2-cycle (n_L = 2).
double cohomology_integral(const GeometryCache& cache);
double cohomology_integral(const ImmersionState& state);

// Monitors.
std::vector<double> mu_accumulate(const std::vector<double>& t, const std::vector<double>& sup_AH);
std::vector<double> kappa_envelope(double kappa0, const std::vector<double>& mu, int n);
struct EigenEnvelope { std::vector<double> lower, upper; };
EigenEnvelope eigen_envelope(double lambda11_0, const std::vector<double>& mu);
double sup_from_l2(double C0, double m, double kappa, double r0, int n);

// Geodesic-ball non-collapsing proxy: min over fixed centers and radii r in [r0/4, r0] of
// Vol(B_r) / r^n, distances by Dijkstra on a 16-neighbour grid graph.
double kappa_estimate(const GeometryCache& cache, double r0);
double default_r0(const GeometryCache& cache);

struct DecayFit {
  double rate = 0.0;      // alpha in int|H|^2 ~ exp(-alpha t)
  double r_squared = 0.0;
  int samples = 0;
  double t_start = 0.0, t_end = 0.0;
};
DecayFit decay_fit(const std::vector<double>& t, const std::vector<double>& values, double t_start = -INFINITY,
                   double t_end = INFINITY);

// Baseline parameters (i)-(v) measured on the initial state.
struct Baseline {
  int n = 2;
  double Lambda = 0.0;     // sup |A|^2
  double V = 0.0;          // volume
  double a = 0.0;          // lambda_1^1 - lambda (or -lambda if lambda < 0)
  double kappa = 0.0;
  double r0 = 0.0;
  double lambda = 0.0;     // Kahler-Einstein constant
  double lambda11 = 0.0;   // lambda_1^1 at t = 0
  double R = 1.0;
};

struct DiagnosticsRecord {
  long step = 0;
  double t = 0.0, dt = 0.0, vol = 0.0;
  double sup_A2 = 0.0, sup_H2 = 0.0, sup_omega2 = 0.0;
  double int_H2 = 0.0, int_omega2 = 0.0, int_H2_eta = 0.0;
  double lambda0 = kNaN, rho1 = kNaN, lambda11 = kNaN;
  bool eig_exact = false;
  int harmonic_dimension = -1;
  double mu = 0.0, kappa_lower = kNaN, kappa_measured = kNaN;
  double lambda_env_lower = kNaN, lambda_env_upper = kNaN;
  double res_xi_H_dstar = kNaN, res_index = kNaN, res_dxiJ_rho = kNaN, res_ricci = kNaN;
  double evo_metric = kNaN, evo_omega = kNaN, evo_volume = kNaN;
  double chart_margin = 0.0;
  double sup_AH = 0.0, sup_grad_H = kNaN, sup_H_bound = kNaN;
  double cohomology = 0.0;
  double sandwich = kNaN;  // max relative violation; NaN when not applicable
  double smoothing1 = kNaN, smoothing2 = kNaN;
};

// Column names in CSV order.
const std::vector<std::string>& diagnostics_columns();
std::vector<double> diagnostics_row(const DiagnosticsRecord& r);

enum class L2ControlVerdict { Satisfied, Violated, Vacuous };
const char* to_string(L2ControlVerdict v) noexcept;

struct ControlParams {
  double b = 4.0;
  double epsilon = 1.0;
  double t0 = 0.0;
  double a_run = kNaN;        // inf of lambda_1^1 - lambda over the elapsed run (after t0)
  double Lambda_run = kNaN;   // sup of sup|A|^2 over the elapsed run
};

struct EpsilonBudget {
  double B0 = 0.0, B1 = 0.0, B2 = 0.0, B3 = 0.0;
  double first = 0.0, second = 0.0;  // both min-expressions with C = 1
  double bound = 0.0;                // min of the two
  std::string caveat;
};

struct ControlCertificate {
  double t = 0.0;
  double b = 0.0, epsilon = 0.0;
  // Clauses of (b, epsilon)-control, each with the compared quantities.
  std::array<bool, 5> clause{};
  double c1_lhs = 0.0, c1_rhs = 0.0;                 // sup|A|^2 <= b Lambda
  double c2_vol = 0.0, c2_lo = 0.0, c2_hi = 0.0;     // (bV)^-1 <= vol <= bV
  double c3_lhs = 0.0, c3_rhs = 0.0;                 // lambda_1^1 - lambda >= a / b
  double c4_lhs = 0.0, c4_rhs = 0.0;                 // kappa(t) >= kappa / b
  double c5_lhs = 0.0, c5_rhs = 0.0;                 // sup Lambda^-1 |H|^2 + sup |omega|^2 <= epsilon
  // Decay hypothesis (strict tier, C = 1).
  bool decay_applicable = false;
  double a = 0.0, Lambda = 0.0, Psi = 0.0, B = 0.0, q = 0.0;
  double line1_lhs = 0.0, line1_rhs = 0.0, line2_lhs = 0.0, line2_rhs = 0.0;
  bool line1 = false, line2 = false;
  // L2 control of omega.
  L2ControlVerdict l2ctl = L2ControlVerdict::Vacuous;
  double l2ctl_cohomology = 0.0;   // integral of omega; must vanish when lambda = 0
  double l2ctl_lambda = 0.0;
  double l2ctl_hyp_lhs = 0.0, l2ctl_hyp_rhs = 0.0, l2ctl_lhs = 0.0, l2ctl_rhs = 0.0;
  EpsilonBudget budget;
  std::string caveat = "decay hypothesis and budget use C = 1; the paper's dimensional constant is unspecified";
};

// Comparison slack used by every clause: lhs <= rhs (1 + 1e-9) + 1e-12.
bool within(double lhs, double rhs);

ControlCertificate control_check(const DiagnosticsRecord& record, const Baseline& baseline,
                                 const ControlParams& params);
// Re-derives every boolean of a certificate from its stored numbers.
bool certificate_consistent(const ControlCertificate& c);
EpsilonBudget epsilon_budget(const Baseline& baseline);

struct RunResult {
  std::vector<DiagnosticsRecord> records;
  std::vector<ControlCertificate> certificates;
  ImmersionState final_state;
  Baseline baseline;
  std::vector<IdentityReport> initial_identities, final_identities;
  DecayFit fit;
  bool blew_up = false;
  std::string stop_reason;
  std::string blowup_message;
  double epsilon_used = 0.0;
  double t0 = 0.0;
  SpectrumResult initial_spectrum;
  double l2_smallness = 0.0;   // int Lambda^-1/2 |H|^2 + int |omega|^2 at t = 0
  bool quantitatively_totally_real = false;  // sup|omega|^2 < 1 - delta at t = 0
};

// Inequality monitors evaluated over a finished run.
struct MonitorSummary {
  int l2ctl_satisfied = 0, l2ctl_violated = 0, l2ctl_vacuous = 0;
  bool l2ctl_transition_ok = true;  // never violated, and never returns to vacuous after being satisfied
  int sandwich_checked = 0, sandwich_violations = 0;
  int sup_bound_checked = 0, sup_bound_violations = 0;
  int volume_increases = 0;
  int kappa_checked = 0, kappa_violations = 0;
  int lambda_checked = 0, lambda_violations = 0;
  int inconsistent_certificates = 0;
  double cohomology_drift = 0.0;
  bool all_ok() const {
    return l2ctl_violated == 0 && sandwich_violations == 0 && sup_bound_violations == 0 && volume_increases == 0 &&
           kappa_violations == 0 && lambda_violations == 0 && inconsistent_certificates == 0;
  }
};

MonitorSummary summarize_monitors(const RunResult& result);

using RecordObserver = std::function<void(const DiagnosticsRecord&)>;

// Runs to t_max, the sup|H| floor, max_steps, or blow-up. Blow-up does not throw: the
// result carries blew_up = true and everything recorded so far.
RunResult run(const ImmersionState& initial, const FlowConfig& config, const RecordObserver& observer = {});

}  // namespace trmcf
