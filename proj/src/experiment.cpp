#include "trmcf/errors.hpp"
#include "trmcf/experiment.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

namespace trmcf {

namespace fs = std::filesystem;
using nlohmann::json;
using ordered = nlohmann::ordered_json;

namespace {

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(ErrorKind::Io, "cannot write '" + path.string() + "'");
  f << content;
  f.flush();
  if (!f) throw Error(ErrorKind::Io, "write failed for '" + path.string() + "'");
}

void prepare_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot create output directory '" + dir + "': " + ec.message());
}

std::string num(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// JSON number or null for non-finite values.
ordered jnum(double x) { return std::isfinite(x) ? ordered(x) : ordered(nullptr); }

ordered report_json(const IdentityReport& r) {
  return ordered{{"name", r.name},
                 {"max_norm", jnum(r.max_norm)},
                 {"l2", jnum(r.l2)},
                 {"resolution", {r.resolution[0], r.resolution[1]}},
                 {"tolerance", r.tolerance},
                 {"passed", r.passed}};
}

ordered spectrum_json(const SpectrumResult& s) {
  return ordered{{"lambda0", jnum(s.lambda0)},
                 {"rho1", jnum(s.rho1)},
                 {"lambda11", jnum(s.lambda11)},
                 {"harmonic_dimension", s.harmonic_dimension},
                 {"lambda11_mixed", jnum(s.lambda11_mixed)},
                 {"basis_size", s.basis_size},
                 {"iterations", s.iterations},
                 {"deflation_threshold", s.deflation_threshold},
                 {"residual_lambda0", jnum(s.residual_lambda0)},
                 {"residual_rho1", jnum(s.residual_rho1)},
                 {"residual_mixed", jnum(s.residual_mixed)}};
}

ordered budget_json(const EpsilonBudget& b) {
  return ordered{{"B0", jnum(b.B0)},       {"B1", jnum(b.B1)},         {"B2", jnum(b.B2)},
                 {"B3", jnum(b.B3)},       {"first", jnum(b.first)},   {"second", jnum(b.second)},
                 {"bound", jnum(b.bound)}, {"caveat", b.caveat}};
}

std::string csv(const std::vector<DiagnosticsRecord>& records) {
  std::string s;
  const auto& cols = diagnostics_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) s += (i ? "," : "") + cols[i];
  s += "\n";
  for (const auto& r : records) {
    const auto row = diagnostics_row(r);
    for (std::size_t i = 0; i < row.size(); ++i) s += (i ? "," : "") + num(row[i]);
    s += "\n";
  }
  return s;
}

ordered summary_json(const ExperimentConfig& cfg, const RunResult& r) {
  const auto& b = r.baseline;
  const auto mon = summarize_monitors(r);
  const DiagnosticsRecord last = r.records.empty() ? DiagnosticsRecord{} : r.records.back();
  ordered j;
  j["preset"] = cfg.preset.name;
  j["stop_reason"] = r.stop_reason;
  j["blew_up"] = r.blew_up;
  j["t_final"] = r.final_state.time;
  j["steps"] = last.step;
  j["records"] = r.records.size();
  j["t0"] = jnum(r.t0);
  j["baseline"] = ordered{{"n", b.n},           {"Lambda", b.Lambda},     {"V", b.V},
                          {"a", jnum(b.a)},     {"kappa", b.kappa},       {"r0", b.r0},
                          {"lambda", b.lambda}, {"lambda11", jnum(b.lambda11)}, {"R", b.R}};
  j["epsilon"] = r.epsilon_used;
  j["epsilon_budget"] = budget_json(epsilon_budget(b));
  j["initial_spectrum"] = spectrum_json(r.initial_spectrum);
  j["l2_smallness"] = r.l2_smallness;
  j["quantitatively_totally_real"] = r.quantitatively_totally_real;
  j["delta"] = cfg.flow.delta;
  j["final"] = ordered{{"sup_H", std::sqrt(last.sup_H2)},
                       {"sup_omega", std::sqrt(last.sup_omega2)},
                       {"sup_A2", last.sup_A2},
                       {"int_H2", last.int_H2},
                       {"vol", last.vol},
                       {"mu", last.mu}};
  j["decay_fit"] = ordered{{"rate", jnum(r.fit.rate)},
                           {"r_squared", jnum(r.fit.r_squared)},
                           {"samples", r.fit.samples},
                           {"t_start", r.fit.samples ? jnum(r.fit.t_start) : ordered(nullptr)},
                           {"t_end", r.fit.samples ? jnum(r.fit.t_end) : ordered(nullptr)},
                           {"rate_floor_a_over_20", jnum(b.a / 20.0)},
                           {"linearized_2_lambda11", jnum(2.0 * b.lambda11)}};
  j["monitors"] = ordered{{"l2ctl_satisfied", mon.l2ctl_satisfied},
                          {"l2ctl_violated", mon.l2ctl_violated},
                          {"l2ctl_vacuous", mon.l2ctl_vacuous},
                          {"l2ctl_transition_ok", mon.l2ctl_transition_ok},
                          {"sandwich_checked", mon.sandwich_checked},
                          {"sandwich_violations", mon.sandwich_violations},
                          {"sup_bound_checked", mon.sup_bound_checked},
                          {"sup_bound_violations", mon.sup_bound_violations},
                          {"volume_increases", mon.volume_increases},
                          {"kappa_checked", mon.kappa_checked},
                          {"kappa_violations", mon.kappa_violations},
                          {"lambda_checked", mon.lambda_checked},
                          {"lambda_violations", mon.lambda_violations},
                          {"inconsistent_certificates", mon.inconsistent_certificates},
                          {"cohomology_drift", mon.cohomology_drift},
                          {"all_ok", mon.all_ok()}};
  j["spectrum_policy"] = "recomputed every eig_stride steps, linearly interpolated in between (eig_exact column)";
  return j;
}

}  // namespace

std::string identity_reports_json(const std::vector<IdentityReport>& reports, int indent) {
  ordered a = ordered::array();
  for (const auto& r : reports) a.push_back(report_json(r));
  return a.dump(indent);
}

std::string certificate_json(const ControlCertificate& c) {
  ordered j;
  j["t"] = c.t;
  j["b"] = c.b;
  j["epsilon"] = c.epsilon;
  j["clauses"] = {c.clause[0], c.clause[1], c.clause[2], c.clause[3], c.clause[4]};
  j["clause1"] = ordered{{"sup_A2", c.c1_lhs}, {"b_Lambda", c.c1_rhs}};
  j["clause2"] = ordered{{"vol", c.c2_vol}, {"lower", c.c2_lo}, {"upper", jnum(c.c2_hi)}};
  j["clause3"] = ordered{{"lambda11_minus_lambda", jnum(c.c3_lhs)}, {"a_over_b", jnum(c.c3_rhs)}};
  j["clause4"] = ordered{{"kappa_t", jnum(c.c4_lhs)}, {"kappa_over_b", jnum(c.c4_rhs)}};
  j["clause5"] = ordered{{"sup_sum", c.c5_lhs}, {"epsilon", c.c5_rhs}};
  j["decay_hypothesis"] = ordered{{"applicable", c.decay_applicable},
                                  {"a", jnum(c.a)},
                                  {"Lambda", jnum(c.Lambda)},
                                  {"Psi", jnum(c.Psi)},
                                  {"B", jnum(c.B)},
                                  {"q", jnum(c.q)},
                                  {"line1", c.line1},
                                  {"line1_lhs", jnum(c.line1_lhs)},
                                  {"line1_rhs", jnum(c.line1_rhs)},
                                  {"line2", c.line2},
                                  {"line2_lhs", jnum(c.line2_lhs)},
                                  {"line2_rhs", jnum(c.line2_rhs)}};
  j["l2_omega_control"] = ordered{{"verdict", to_string(c.l2ctl)},
                                  {"hypothesis_lhs", jnum(c.l2ctl_hyp_lhs)},
                                  {"hypothesis_rhs", jnum(c.l2ctl_hyp_rhs)},
                                  {"lhs", jnum(c.l2ctl_lhs)},
                                  {"rhs", jnum(c.l2ctl_rhs)},
                                  {"cohomology", c.l2ctl_cohomology}};
  j["budget"] = budget_json(c.budget);
  j["caveat"] = c.caveat;
  return j.dump();
}

std::string plot_script(const std::string& csv_name) {
  std::ostringstream s;
  s << "# gnuplot script for " << csv_name << "\n"
    << "set datafile separator ','\n"
    << "set key autotitle columnhead\n"
    << "set terminal pngcairo size 1000,700\n"
    << "set xlabel 't'\n"
    << "set logscale y\n"
    << "set output 'decay.png'\n"
    << "set title 'L2 mean curvature and restricted Kahler form'\n"
    << "plot '" << csv_name << "' using (column('t')):(column('int_H2')) with lines title 'int |H|^2', \\\n"
    << "     '' using (column('t')):(column('int_omega2')) with lines title 'int |omega|^2'\n"
    << "set output 'sup.png'\n"
    << "set title 'sup norms'\n"
    << "plot '" << csv_name << "' using (column('t')):(column('sup_A2')) with lines title 'sup |A|^2', \\\n"
    << "     '' using (column('t')):(column('sup_H2')) with lines title 'sup |H|^2', \\\n"
    << "     '' using (column('t')):(column('sup_omega2')) with lines title 'sup |omega|^2'\n"
    << "unset logscale y\n"
    << "set output 'spectrum.png'\n"
    << "set title 'first eigenvalues and envelopes'\n"
    << "plot '" << csv_name << "' using (column('t')):(column('lambda11')) with lines title 'lambda_1^1', \\\n"
    << "     '' using (column('t')):(column('lambda0')) with lines title 'lambda_1^0', \\\n"
    << "     '' using (column('t')):(column('lambda_env_lower')) with lines dt 2 title 'lower envelope', \\\n"
    << "     '' using (column('t')):(column('lambda_env_upper')) with lines dt 2 title 'upper envelope'\n"
    << "set output 'volume.png'\n"
    << "set title 'volume, mu and kappa envelope'\n"
    << "plot '" << csv_name << "' using (column('t')):(column('vol')) with lines title 'vol', \\\n"
    << "     '' using (column('t')):(column('mu')) with lines title 'mu', \\\n"
    << "     '' using (column('t')):(column('kappa_lower')) with lines title 'kappa lower'\n";
  return s.str();
}

std::string snapshot_summary_json(const ImmersionState& s) {
  ordered j;
  j["time"] = s.time;
  j["ambient"] = ordered{{"kind", to_string(s.ambient.kind)},
                         {"complex_dimension", s.ambient.complex_dimension},
                         {"ke_constant", s.ambient.ke_constant}};
  j["grid"] = ordered{{"dim", s.grid.dim},
                      {"resolution", {s.grid.resolution[0], s.grid.resolution[1]}},
                      {"periods", {s.grid.periods[0], s.grid.periods[1]}},
                      {"fd_order", s.grid.fd_order}};
  j["nodes"] = s.grid.node_count();
  try {
    const auto c = build_geometry(s, GeometryLevel::Kinematic);
    j["vol"] = c.volume();
    j["sup_A2"] = c.sup(c.A_sq);
    j["sup_H2"] = c.sup(c.H_norm2);
    j["sup_omega2"] = c.sup(c.omega_norm2);
    j["int_H2"] = c.integrate(c.H_norm2);
    j["min_eta_eigenvalue"] = *std::min_element(c.eta_min_eig.begin(), c.eta_min_eig.end());
    j["cohomology_integral"] = cohomology_integral(c);
    j["chart_margin"] = jnum(chart_margin(s));
    j["totally_real"] = true;
  } catch (const Error& e) {
    j["totally_real"] = false;
    j["geometry_error"] = e.what();
  }
  return j.dump(2);
}

ImmersionState initial_state(const ExperimentConfig& config) {
  PresetParams p = config.preset;
  try {
    ImmersionState s = preset(p);
    if (p.name != "file" && s.ambient.kind != config.ambient_kind)
      throw Error(ErrorKind::Config, "preset '" + p.name + "' does not live in ambient " +
                                         to_string(config.ambient_kind));
    return s;
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::InvalidArgument) throw Error(ErrorKind::Config, e.what());
    throw;
  }
}

ExperimentOutcome run_experiment(const ExperimentConfig& config, std::ostream* log) {
  ExperimentOutcome out;
  try {
    const ImmersionState s0 = initial_state(config);
    prepare_dir(config.output_dir);
    const fs::path dir(config.output_dir);
    write_file(dir / "config.resolved.txt", resolved_text(config));

    RecordObserver obs;
    if (log)
      obs = [log](const DiagnosticsRecord& r) {
        char buf[200];
        std::snprintf(buf, sizeof buf, "step %8ld  t %.6e  sup|A|^2 %.4e  sup|H| %.4e  int|H|^2 %.4e\n", r.step,
                      r.t, r.sup_A2, std::sqrt(r.sup_H2), r.int_H2);
        *log << buf << std::flush;
      };
    out.result = run(s0, config.flow, obs);
    const RunResult& r = out.result;

    write_file(dir / "diagnostics.csv", csv(r.records));
    std::string certs;
    for (const auto& c : r.certificates) certs += certificate_json(c) + "\n";
    write_file(dir / "certificates.jsonl", certs);
    ordered ids;
    ids["initial"] = json::parse(identity_reports_json(r.initial_identities));
    ids["final"] = json::parse(identity_reports_json(r.final_identities));
    write_file(dir / "identities.json", ids.dump(2) + "\n");
    save_snapshot(r.final_state, (dir / "final.snap").string());
    write_file(dir / "plot.gp", plot_script("diagnostics.csv"));
    write_file(dir / "summary.json", summary_json(config, r).dump(2) + "\n");
    if (r.blew_up) {
      const auto& last = r.records.back();
      ordered b{{"t", r.final_state.time},
                {"message", r.blowup_message},
                {"sup_A2", last.sup_A2},
                {"threshold", config.flow.blowup_factor * std::max(r.baseline.Lambda, 1.0)},
                {"steps", last.step}};
      write_file(dir / "blowup.json", b.dump(2) + "\n");
      out.exit_code = exit_code(ErrorKind::BlowUp);
      out.message = "blow-up: " + r.blowup_message;
    } else {
      out.message = "completed (" + r.stop_reason + ")";
    }
  } catch (const Error& e) {
    out.exit_code = exit_code(e.kind());
    out.message = std::string(to_string(e.kind())) + " error: " + e.what();
  }
  if (log) *log << out.message << "\n";
  return out;
}

VerificationReport verify_ladder(const ExperimentConfig& config) {
  VerificationReport rep;
  rep.resolutions = config.ladder;
  rep.fd_order = config.preset.fd_order;
  std::map<std::string, std::size_t> index;
  for (int res : config.ladder) {
    ExperimentConfig c = config;
    c.preset.resolution = res;
    const ImmersionState s = initial_state(c);
    const GeometryCache cache = build_geometry(s, GeometryLevel::Full);
    if (config.suites.identities) {
      for (const auto& r : identity_suite(s, cache)) {
        if (!index.count(r.name)) {
          index[r.name] = rep.identities.size();
          rep.identities.push_back({r.name, {}, {}, r.tolerance, false});
        }
        rep.identities[index[r.name]].residuals.push_back(r.max_norm);
      }
    }
    if (config.suites.spectrum) rep.spectra.push_back(spectrum(cache, {config.flow.spectrum_modes, true}));
  }
  rep.passed = true;
  for (auto& e : rep.identities) {
    bool orders_ok = true;
    for (std::size_t i = 0; i + 1 < e.residuals.size(); ++i) {
      const double r0 = e.residuals[i], r1 = e.residuals[i + 1];
      double order = NAN;
      if (r0 >= kRoundoffFloor && r1 >= kRoundoffFloor)
        order = std::log(r0 / r1) / std::log(static_cast<double>(config.ladder[i + 1]) / config.ladder[i]);
      e.orders.push_back(order);
      if (std::isfinite(order) && order < rep.fd_order - 1) orders_ok = false;
    }
    const double finest = e.residuals.back();
    e.passed = finest <= e.tolerance && (orders_ok || finest < kRoundoffFloor);
    rep.passed = rep.passed && e.passed;
  }
  return rep;
}

std::string verification_json(const VerificationReport& rep) {
  ordered j;
  j["resolutions"] = rep.resolutions;
  j["fd_order"] = rep.fd_order;
  j["required_order"] = rep.fd_order - 1;
  j["roundoff_floor"] = kRoundoffFloor;
  ordered ids = ordered::array();
  for (const auto& e : rep.identities) {
    ordered o;
    o["name"] = e.name;
    o["residuals"] = ordered::array();
    for (double r : e.residuals) o["residuals"].push_back(jnum(r));
    o["orders"] = ordered::array();
    for (double r : e.orders) o["orders"].push_back(jnum(r));
    o["tolerance"] = e.tolerance;
    o["passed"] = e.passed;
    ids.push_back(o);
  }
  j["identities"] = ids;
  ordered sp = ordered::array();
  for (const auto& s : rep.spectra) sp.push_back(spectrum_json(s));
  j["spectra"] = sp;
  j["passed"] = rep.passed;
  return j.dump(2);
}

ExperimentOutcome verify(const ExperimentConfig& config, std::ostream* log) {
  ExperimentOutcome out;
  try {
    const VerificationReport rep = verify_ladder(config);
    prepare_dir(config.output_dir);
    const fs::path dir(config.output_dir);
    write_file(dir / "config.resolved.txt", resolved_text(config));
    write_file(dir / "verification.json", verification_json(rep) + "\n");
    if (log) {
      for (const auto& e : rep.identities) {
        *log << (e.passed ? "PASS " : "FAIL ") << e.name << "  residuals";
        for (double r : e.residuals) *log << " " << num(r);
        *log << "  orders";
        for (double o : e.orders) *log << " " << num(o);
        *log << "\n";
      }
      for (std::size_t i = 0; i < rep.spectra.size(); ++i)
        *log << "spectrum N=" << rep.resolutions[i] << "  lambda0 " << num(rep.spectra[i].lambda0) << "  rho1 "
             << num(rep.spectra[i].rho1) << "  lambda11 " << num(rep.spectra[i].lambda11) << "  harmonic "
             << rep.spectra[i].harmonic_dimension << "\n";
    }
    out.exit_code = rep.passed ? 0 : 1;
    out.message = rep.passed ? "verification passed" : "verification failed";
  } catch (const Error& e) {
    out.exit_code = exit_code(e.kind());
    out.message = std::string(to_string(e.kind())) + " error: " + e.what();
  }
  if (log) *log << out.message << "\n";
  return out;
}

}  // namespace trmcf
