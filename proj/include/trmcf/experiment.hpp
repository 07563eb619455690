#pragma once

#include "trmcf/flow.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace trmcf {

struct Suites {
  bool identities = true;
  bool evolution = true;
  bool spectrum = true;
  bool decay = true;
};

inline PresetParams default_preset() {
  PresetParams p;
  p.name = "flat_lagrangian_torus";
  return p;
}

struct ExperimentConfig {
  PresetParams preset = default_preset();
  AmbientKind ambient_kind = AmbientKind::FlatTorus;  // resolved from the preset when not given
  int complex_dimension = 2;                           // equals grid.dim
  FlowConfig flow;
  Suites suites;
  std::string output_dir = "out";
  std::vector<int> ladder{32, 64, 128};  // verify refinement ladder
};

// Flat dotted key = value text; '#' starts a comment. Throws Error(Config) listing every
// problem with its line number.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);
// Applies one key = value override with the same validation as the parser.
void apply_override(ExperimentConfig& config, const std::string& key, const std::string& value);
// Canonical text with every key; parse_config(resolved_text(c)) reproduces c.
std::string resolved_text(const ExperimentConfig& config);
// Documented key list with defaults.
std::vector<std::pair<std::string, std::string>> config_schema();

ImmersionState initial_state(const ExperimentConfig& config);

struct ExperimentOutcome {
  int exit_code = 0;
  std::string message;
  RunResult result;
};

// Runs and writes config.resolved.txt, diagnostics.csv, certificates.jsonl, identities.json,
// final.snap, plot.gp, summary.json (and blowup.json) under config.output_dir.
ExperimentOutcome run_experiment(const ExperimentConfig& config, std::ostream* log = nullptr);

struct LadderEntry {
  std::string name;
  std::vector<double> residuals;  // max norm per ladder resolution
  std::vector<double> orders;     // between consecutive resolutions
  double tolerance = 0.0;
  bool passed = false;
};

struct VerificationReport {
  std::vector<int> resolutions;
  int fd_order = 4;
  std::vector<LadderEntry> identities;
  std::vector<SpectrumResult> spectra;
  bool passed = false;
};

// Residual floor below which a ladder entry counts as round-off regardless of order.
inline constexpr double kRoundoffFloor = 1e-10;

VerificationReport verify_ladder(const ExperimentConfig& config);
// Runs verify_ladder and writes verification.json under config.output_dir.
ExperimentOutcome verify(const ExperimentConfig& config, std::ostream* log = nullptr);

std::string identity_reports_json(const std::vector<IdentityReport>& reports, int indent = 2);
std::string certificate_json(const ControlCertificate& c);
std::string verification_json(const VerificationReport& report);
std::string plot_script(const std::string& csv_name);
std::string snapshot_summary_json(const ImmersionState& state);

}  // namespace trmcf
