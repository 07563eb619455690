#include "trmcf/errors.hpp"
#include "trmcf/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

namespace trmcf {

namespace {

struct BadValue : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string fmt(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

double to_real(const std::string& v) {
  const char* b = v.c_str();
  char* e = nullptr;
  const double x = std::strtod(b, &e);
  if (v.empty() || *e != '\0' || std::isnan(x)) throw BadValue("expected a real number, got '" + v + "'");
  return x;
}

long to_int(const std::string& v) {
  const char* b = v.c_str();
  char* e = nullptr;
  const long x = std::strtol(b, &e, 10);
  if (v.empty() || *e != '\0') throw BadValue("expected an integer, got '" + v + "'");
  return x;
}

bool to_bool(const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw BadValue("expected true or false, got '" + v + "'");
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : v) {
    if (ch == ' ' || ch == '\t' || ch == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

// "auto" maps to a negative sentinel.
double to_real_or_auto(const std::string& v) { return v == "auto" ? -1.0 : to_real(v); }
std::string auto_or(double x) { return x < 0.0 ? "auto" : fmt(x); }

struct Key {
  std::string name;
  std::string doc;
  std::function<void(ExperimentConfig&, const std::string&)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

template <class T>
Key real_key(const std::string& name, const std::string& doc, T ExperimentConfig::*outer, double T::*field) {
  return {name, doc, [=](ExperimentConfig& c, const std::string& v) { (c.*outer).*field = to_real(v); },
          [=](const ExperimentConfig& c) { return fmt((c.*outer).*field); }};
}
template <class T, class I>
Key int_key(const std::string& name, const std::string& doc, T ExperimentConfig::*outer, I T::*field) {
  return {name, doc, [=](ExperimentConfig& c, const std::string& v) { (c.*outer).*field = static_cast<I>(to_int(v)); },
          [=](const ExperimentConfig& c) { return std::to_string((c.*outer).*field); }};
}
Key flow_bool(const std::string& name, const std::string& doc, bool FlowConfig::*field) {
  return {name, doc, [=](ExperimentConfig& c, const std::string& v) { c.flow.*field = to_bool(v); },
          [=](const ExperimentConfig& c) { return std::string(c.flow.*field ? "true" : "false"); }};
}
Key flow_auto(const std::string& name, const std::string& doc, double FlowConfig::*field) {
  return {name, doc, [=](ExperimentConfig& c, const std::string& v) { c.flow.*field = to_real_or_auto(v); },
          [=](const ExperimentConfig& c) { return auto_or(c.flow.*field); }};
}

const std::vector<Key>& keys() {
  using E = ExperimentConfig;
  using F = FlowConfig;
  using P = PresetParams;
  static const std::vector<Key> k = {
      {"preset.name", "flat_lagrangian_torus | product_circles | clifford_cp2 | file",
       [](E& c, const std::string& v) { c.preset.name = v; }, [](const E& c) { return c.preset.name; }},
      real_key("preset.epsilon", "perturbation amplitude", &E::preset, &P::epsilon),
      {"preset.mode", "perturbation wave vector (two integers)",
       [](E& c, const std::string& v) {
         const auto parts = split_list(v);
         if (parts.empty() || parts.size() > 2) throw BadValue("expected one or two integers, got '" + v + "'");
         c.preset.mode = {static_cast<int>(to_int(parts[0])), parts.size() > 1 ? static_cast<int>(to_int(parts[1])) : 0};
       },
       [](const E& c) { return std::to_string(c.preset.mode[0]) + " " + std::to_string(c.preset.mode[1]); }},
      int_key("preset.direction", "graph perturbation acts on v_direction (1-based)", &E::preset, &P::direction),
      {"preset.radii", "product_circles radii (two reals)",
       [](E& c, const std::string& v) {
         const auto parts = split_list(v);
         if (parts.empty() || parts.size() > 2) throw BadValue("expected one or two reals, got '" + v + "'");
         c.preset.radii = {to_real(parts[0]), parts.size() > 1 ? to_real(parts[1]) : to_real(parts[0])};
       },
       [](const E& c) { return fmt(c.preset.radii[0]) + " " + fmt(c.preset.radii[1]); }},
      real_key("preset.noise", "seeded smooth noise amplitude", &E::preset, &P::noise),
      {"preset.seed", "noise seed",
       [](E& c, const std::string& v) {
         const long s = to_int(v);
         if (s < 0) throw BadValue("expected a nonnegative integer, got '" + v + "'");
         c.preset.seed = static_cast<std::uint64_t>(s);
       },
       [](const E& c) { return std::to_string(c.preset.seed); }},
      {"preset.path", "snapshot path for the file preset", [](E& c, const std::string& v) { c.preset.path = v; },
       [](const E& c) { return c.preset.path; }},
      int_key("grid.dim", "intrinsic dimension n_L (1 or 2)", &E::preset, &P::intrinsic_dim),
      int_key("grid.resolution", "nodes per axis (>= 8)", &E::preset, &P::resolution),
      int_key("grid.fd_order", "finite-difference order (2 or 4)", &E::preset, &P::fd_order),
      {"ambient.kind", "flat-torus | fubini-study (default: implied by the preset)",
       [](E& c, const std::string& v) {
         try {
           c.ambient_kind = ambient_kind_from_string(v);
         } catch (const Error&) {
           throw BadValue("expected flat-torus or fubini-study, got '" + v + "'");
         }
       },
       [](const E& c) { return std::string(to_string(c.ambient_kind)); }},
      {"ambient.complex_dimension", "complex dimension n (must equal grid.dim)",
       [](E& c, const std::string& v) { c.complex_dimension = static_cast<int>(to_int(v)); },
       [](const E& c) { return std::to_string(c.complex_dimension); }},
      {"ambient.lattice_periods", "flat lattice periods per real coordinate (empty: all 1)",
       [](E& c, const std::string& v) {
         c.preset.lattice_periods.clear();
         for (const auto& p : split_list(v)) c.preset.lattice_periods.push_back(to_real(p));
       },
       [](const E& c) {
         std::string s;
         for (double p : c.preset.lattice_periods) s += (s.empty() ? "" : " ") + fmt(p);
         return s;
       }},
      real_key("ambient.chart_radius_max", "Fubini-Study chart guard radius", &E::preset, &P::chart_radius_max),
      real_key("flow.cfl", "dt = cfl h^2 / (1 + sup|A| h)", &E::flow, &F::cfl),
      real_key("flow.t_max", "final time", &E::flow, &F::t_max),
      int_key("flow.max_steps", "step limit", &E::flow, &F::max_steps),
      int_key("flow.diag_stride", "steps between diagnostic records", &E::flow, &F::diag_stride),
      int_key("flow.eig_stride", "steps between spectrum evaluations", &E::flow, &F::eig_stride),
      real_key("flow.h_floor", "stop once sup|H| drops below (0: off)", &E::flow, &F::h_floor),
      real_key("flow.blowup_factor", "blow-up once sup|A|^2 > factor max(Lambda_0, 1)", &E::flow, &F::blowup_factor),
      real_key("flow.growth_limit", "reject steps growing sup|A|^2 by more than this fraction", &E::flow,
               &F::growth_limit),
      real_key("flow.dt_floor", "smallest admissible step", &E::flow, &F::dt_floor),
      flow_auto("flow.t0", "smoothing onset (auto: first record after 10 steps)", &F::t0),
      flow_auto("flow.fit_start", "decay fit window start (auto: t0)", &F::fit_start),
      flow_auto("flow.fit_end", "decay fit window end (auto: last resolved sample)", &F::fit_end),
      int_key("flow.spectrum_modes", "Fourier trial space |k| <= modes", &E::flow, &F::spectrum_modes),
      flow_bool("flow.smoothing", "report t^m |nabla^m A|^2 / Lambda", &F::smoothing),
      real_key("control.b", "control factor b", &E::flow, &F::control_b),
      flow_auto("control.epsilon", "control epsilon (auto: measured at t = 0)", &F::control_epsilon),
      flow_auto("control.r0", "non-collapsing scale (auto: half the shortest period)", &F::r0),
      real_key("control.R", "curvature ball radius in the epsilon budget", &E::flow, &F::R),
      real_key("control.delta", "quantitative totally real margin", &E::flow, &F::delta),
      {"suites", "all | comma list of identities, evolution, spectrum, decay",
       [](E& c, const std::string& v) {
         Suites s{false, false, false, false};
         for (const auto& w : split_list(v)) {
           if (w == "all") s = Suites{};
           else if (w == "identities") s.identities = true;
           else if (w == "evolution") s.evolution = true;
           else if (w == "spectrum") s.spectrum = true;
           else if (w == "decay") s.decay = true;
           else throw BadValue("unknown suite '" + w + "'");
         }
         c.suites = s;
         c.flow.identities = s.identities;
         c.flow.evolution = s.evolution;
         c.flow.spectra = s.spectrum;
         c.flow.decay = s.decay;
       },
       [](const E& c) {
         const Suites& s = c.suites;
         if (s.identities && s.evolution && s.spectrum && s.decay) return std::string("all");
         std::string out;
         auto add = [&](bool on, const char* n) {
           if (on) out += (out.empty() ? "" : ",") + std::string(n);
         };
         add(s.identities, "identities");
         add(s.evolution, "evolution");
         add(s.spectrum, "spectrum");
         add(s.decay, "decay");
         return out;
       }},
      {"output.dir", "output directory", [](E& c, const std::string& v) { c.output_dir = v; },
       [](const E& c) { return c.output_dir; }},
      {"verify.ladder", "verify refinement resolutions",
       [](E& c, const std::string& v) {
         c.ladder.clear();
         for (const auto& p : split_list(v)) c.ladder.push_back(static_cast<int>(to_int(p)));
       },
       [](const E& c) {
         std::string s;
         for (int r : c.ladder) s += (s.empty() ? "" : " ") + std::to_string(r);
         return s;
       }},
  };
  return k;
}

const Key* find_key(const std::string& name) {
  for (const auto& k : keys())
    if (k.name == name) return &k;
  return nullptr;
}

bool is_flat_preset(const std::string& name) {
  return name == "flat_lagrangian_torus" || name == "product_circles";
}

// Cross-reference validation. `line` maps keys to their source line (0 when defaulted).
void cross_check(ExperimentConfig& c, const std::map<std::string, int>& line, std::vector<std::string>& errors) {
  auto at = [&](const std::string& key) {
    const auto it = line.find(key);
    return it == line.end() ? key + " (default)" : key + " (line " + std::to_string(it->second) + ")";
  };
  const auto& P = c.preset;
  const bool kind_set = line.count("ambient.kind") > 0;
  if (P.name == "clifford_cp2") {
    if (kind_set && c.ambient_kind != AmbientKind::FubiniStudy)
      errors.push_back(at("preset.name") + " = clifford_cp2 requires " + at("ambient.kind") + " = fubini-study");
    if (!kind_set) c.ambient_kind = AmbientKind::FubiniStudy;
    if (!line.count("preset.mode")) c.preset.mode = {1, 1};
    if (P.intrinsic_dim != 2) errors.push_back(at("grid.dim") + ": clifford_cp2 needs grid.dim = 2");
  } else if (is_flat_preset(P.name)) {
    if (kind_set && c.ambient_kind != AmbientKind::FlatTorus)
      errors.push_back(at("preset.name") + " = " + P.name + " requires " + at("ambient.kind") + " = flat-torus");
    if (!kind_set) c.ambient_kind = AmbientKind::FlatTorus;
  } else if (P.name == "file") {
    if (P.path.empty()) errors.push_back(at("preset.name") + " = file requires preset.path");
  } else {
    errors.push_back(at("preset.name") + ": unknown preset '" + P.name + "'");
  }
  if (P.fd_order != 2 && P.fd_order != 4) errors.push_back(at("grid.fd_order") + ": must be even (2 or 4)");
  if (P.intrinsic_dim != 1 && P.intrinsic_dim != 2) errors.push_back(at("grid.dim") + ": must be 1 or 2");
  if (P.resolution < 8) errors.push_back(at("grid.resolution") + ": must be >= 8");
  if (!line.count("ambient.complex_dimension")) c.complex_dimension = P.intrinsic_dim;
  else if (c.complex_dimension != P.intrinsic_dim)
    errors.push_back(at("ambient.complex_dimension") + " must equal " + at("grid.dim"));
  if (!P.lattice_periods.empty() && static_cast<int>(P.lattice_periods.size()) != 2 * P.intrinsic_dim)
    errors.push_back(at("ambient.lattice_periods") + ": needs 2 * grid.dim values");
  if (P.direction < 1 || P.direction > P.intrinsic_dim)
    errors.push_back(at("preset.direction") + ": must lie in 1..grid.dim");
  if (!(P.chart_radius_max > 0.0)) errors.push_back(at("ambient.chart_radius_max") + ": must be > 0");
  if (c.ladder.empty()) errors.push_back(at("verify.ladder") + ": needs at least one resolution");
  for (std::size_t i = 0; i < c.ladder.size(); ++i) {
    if (c.ladder[i] < 8) errors.push_back(at("verify.ladder") + ": resolutions must be >= 8");
    if (i > 0 && c.ladder[i] <= c.ladder[i - 1])
      errors.push_back(at("verify.ladder") + ": resolutions must increase");
  }
  if (c.output_dir.empty()) errors.push_back(at("output.dir") + ": must not be empty");
  try {
    c.flow.validate();
  } catch (const Error& e) {
    std::string m = e.what();
    const auto key = m.substr(0, m.find(' '));
    errors.push_back(line.count(key) ? at(key) + m.substr(key.size()) : m);
  }
}

[[noreturn]] void fail(const std::vector<std::string>& errors) {
  std::string m = "invalid configuration:";
  for (const auto& e : errors) m += "\n  " + e;
  throw Error(ErrorKind::Config, m);
}

ExperimentConfig parse_lines(const std::string& text, std::map<std::string, int>& line_of) {
  ExperimentConfig c;
  std::vector<std::string> errors;
  std::istringstream in(text);
  std::string raw;
  int ln = 0;
  while (std::getline(in, raw)) {
    ++ln;
    const auto hash = raw.find('#');
    const std::string s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq == std::string::npos) {
      errors.push_back("line " + std::to_string(ln) + ": expected key = value");
      continue;
    }
    const std::string key = trim(s.substr(0, eq));
    std::string value = trim(s.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
    const Key* k = find_key(key);
    if (!k) {
      errors.push_back("line " + std::to_string(ln) + ": unknown key '" + key + "'");
      continue;
    }
    if (line_of.count(key)) {
      errors.push_back("line " + std::to_string(ln) + ": duplicate key '" + key + "' (first on line " +
                       std::to_string(line_of[key]) + ")");
      continue;
    }
    line_of[key] = ln;
    try {
      k->set(c, value);
    } catch (const BadValue& e) {
      errors.push_back("line " + std::to_string(ln) + ": " + key + ": " + e.what());
    }
  }
  if (!errors.empty()) fail(errors);
  return c;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  std::map<std::string, int> line_of;
  ExperimentConfig c = parse_lines(text, line_of);
  std::vector<std::string> errors;
  cross_check(c, line_of, errors);
  if (!errors.empty()) fail(errors);
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorKind::Config, "cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

void apply_override(ExperimentConfig& config, const std::string& key, const std::string& value) {
  // Re-parse from the resolved text so cross-reference rules see the override.
  std::string text = resolved_text(config);
  if (!find_key(key)) throw Error(ErrorKind::Config, "unknown key '" + key + "'");
  std::string out;
  std::istringstream in(text);
  std::string l;
  while (std::getline(in, l)) {
    const auto eq = l.find('=');
    if (eq != std::string::npos && trim(l.substr(0, eq)) == key) continue;
    out += l + "\n";
  }
  out += key + " = " + value + "\n";
  config = parse_config(out);
}

std::string resolved_text(const ExperimentConfig& config) {
  std::string s;
  for (const auto& k : keys()) s += k.name + " = " + k.get(config) + "\n";
  return s;
}

std::vector<std::pair<std::string, std::string>> config_schema() {
  std::vector<std::pair<std::string, std::string>> out;
  const ExperimentConfig d;
  for (const auto& k : keys()) out.emplace_back(k.name + " = " + k.get(d), k.doc);
  return out;
}

}  // namespace trmcf
