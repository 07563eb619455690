#include "trmcf/trmcf.h"

#include "trmcf/errors.hpp"
#include "trmcf/experiment.hpp"

#include <iostream>
#include <string>

struct trmcf_config {
  trmcf::ExperimentConfig config;
  std::string resolved;
};

struct trmcf_state {
  trmcf::ImmersionState state;
  std::string summary;
};

namespace {

thread_local std::string g_error;

int fail(int code, const std::string& message) {
  g_error = message;
  return code;
}

template <class F>
int guarded(F&& f) {
  try {
    f();
    g_error.clear();
    return TRMCF_OK;
  } catch (const trmcf::Error& e) {
    return fail(trmcf::exit_code(e.kind()), e.what());
  } catch (const std::exception& e) {
    return fail(TRMCF_ERR_GENERIC, e.what());
  }
}

int null_arg() { return fail(TRMCF_ERR_GENERIC, "null argument"); }

}  // namespace

extern "C" {

const char* trmcf_last_error(void) { return g_error.c_str(); }

int trmcf_config_parse(const char* text, trmcf_config** out) {
  if (!text || !out) return null_arg();
  return guarded([&] { *out = new trmcf_config{trmcf::parse_config(text), {}}; });
}

int trmcf_config_load(const char* path, trmcf_config** out) {
  if (!path || !out) return null_arg();
  return guarded([&] { *out = new trmcf_config{trmcf::load_config(path), {}}; });
}

int trmcf_config_default(trmcf_config** out) {
  if (!out) return null_arg();
  return guarded([&] { *out = new trmcf_config{trmcf::parse_config(""), {}}; });
}

int trmcf_config_set(trmcf_config* config, const char* key, const char* value) {
  if (!config || !key || !value) return null_arg();
  return guarded([&] { trmcf::apply_override(config->config, key, value); });
}

const char* trmcf_config_resolved(trmcf_config* config) {
  if (!config) return "";
  config->resolved = trmcf::resolved_text(config->config);
  return config->resolved.c_str();
}

void trmcf_config_free(trmcf_config* config) { delete config; }

int trmcf_run(const trmcf_config* config, int quiet) {
  if (!config) return null_arg();
  const auto o = trmcf::run_experiment(config->config, quiet ? nullptr : &std::cerr);
  if (o.exit_code != 0) return fail(o.exit_code, o.message);
  g_error.clear();
  return TRMCF_OK;
}

int trmcf_verify(const trmcf_config* config, int quiet) {
  if (!config) return null_arg();
  const auto o = trmcf::verify(config->config, quiet ? nullptr : &std::cerr);
  if (o.exit_code != 0) return fail(o.exit_code, o.message);
  g_error.clear();
  return TRMCF_OK;
}

size_t trmcf_preset_count(void) { return trmcf::preset_list().size(); }

const char* trmcf_preset_name(size_t index) {
  static const auto list = trmcf::preset_list();
  return index < list.size() ? list[index].name.c_str() : nullptr;
}

const char* trmcf_preset_description(size_t index) {
  static const auto list = trmcf::preset_list();
  return index < list.size() ? list[index].description.c_str() : nullptr;
}

int trmcf_state_from_config(const trmcf_config* config, trmcf_state** out) {
  if (!config || !out) return null_arg();
  return guarded([&] { *out = new trmcf_state{trmcf::initial_state(config->config), {}}; });
}

int trmcf_state_load(const char* path, trmcf_state** out) {
  if (!path || !out) return null_arg();
  return guarded([&] { *out = new trmcf_state{trmcf::load_snapshot(path), {}}; });
}

int trmcf_state_save(const trmcf_state* state, const char* path) {
  if (!state || !path) return null_arg();
  return guarded([&] { trmcf::save_snapshot(state->state, path); });
}

int trmcf_state_step(trmcf_state* state, const trmcf_config* config, double* dt) {
  if (!state || !config) return null_arg();
  return guarded([&] {
    const double t = state->state.time;
    state->state = trmcf::step(state->state, config->config.flow);
    if (dt) *dt = state->state.time - t;
  });
}

double trmcf_state_time(const trmcf_state* state) { return state ? state->state.time : 0.0; }

size_t trmcf_state_node_count(const trmcf_state* state) { return state ? state->state.grid.node_count() : 0; }

int trmcf_state_real_dim(const trmcf_state* state) { return state ? state->state.real_dim() : 0; }

int trmcf_state_points(const trmcf_state* state, double* buffer, size_t count) {
  if (!state || !buffer) return null_arg();
  if (count < state->state.points.size()) return fail(TRMCF_ERR_GENERIC, "buffer too small");
  std::copy(state->state.points.begin(), state->state.points.end(), buffer);
  g_error.clear();
  return TRMCF_OK;
}

const char* trmcf_state_summary(trmcf_state* state) {
  if (!state) return "";
  state->summary = trmcf::snapshot_summary_json(state->state);
  return state->summary.c_str();
}

void trmcf_state_free(trmcf_state* state) { delete state; }

}  // extern "C"
