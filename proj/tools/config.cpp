#include "config.hpp"

#include <fstream>
#include <set>

namespace morreylab {

using nlohmann::json;

morrey::GridSpec RunConfig::grid_spec() const {
  if (n_s == 0) return morrey::GridSpec::per_octave(r_min, r_max, cells_per_octave, n_phi);
  return morrey::GridSpec{r_min, r_max, n_s, n_phi};
}

morrey::SolverConfig RunConfig::solver_config() const {
  morrey::SolverConfig s;
  s.eps_schedule = eps_schedule;
  s.grad_tol = grad_tol;
  s.energy_rel_tol = energy_rel_tol;
  s.max_iters_per_stage = max_iters;
  return s;
}

json to_json(const RunConfig& c) {
  json j;
  j["command"] = c.command;
  j["p"] = c.p;
  j["out_dir"] = c.out_dir;
  j["threads"] = c.threads;
  j["p_values"] = c.p_values;
  j["kappa"] = c.kappa ? json(*c.kappa) : json(nullptr);
  j["L"] = c.L ? json(*c.L) : json(nullptr);
  j["samples"] = c.samples;
  j["r_min"] = c.r_min;
  j["r_max"] = c.r_max;
  j["cells_per_octave"] = c.cells_per_octave;
  j["n_s"] = c.n_s;
  j["n_phi"] = c.n_phi;
  j["eps_schedule"] = c.eps_schedule;
  j["grad_tol"] = c.grad_tol;
  j["energy_rel_tol"] = c.energy_rel_tol;
  j["max_iters"] = c.max_iters;
  j["checkpoint"] = c.checkpoint;
  j["window_lo"] = c.window_lo;
  j["window_hi"] = c.window_hi;
  j["budget"] = c.budget;
  j["barrier_r0"] = c.barrier_r0;
  j["mode"] = c.mode;
  return j;
}

namespace {

template <class T>
void take(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config key '") + key + "': " + e.what());
  }
}

void take_optional(const json& j, const char* key, std::optional<double>& out) {
  if (!j.contains(key)) return;
  if (j.at(key).is_null()) {
    out.reset();
    return;
  }
  double v = 0.0;
  take(j, key, v);
  out = v;
}

}  // namespace

RunConfig from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  static const std::set<std::string> known{
      "command",  "p",         "out_dir",   "threads",    "p_values",  "kappa",
      "L",        "samples",   "r_min",     "r_max",      "cells_per_octave",
      "n_s",      "n_phi",     "eps_schedule", "grad_tol", "energy_rel_tol",
      "max_iters", "checkpoint", "window_lo", "window_hi", "budget",  "barrier_r0",
      "mode"};
  for (const auto& item : j.items()) {
    if (!known.count(item.key())) throw ConfigError("unknown config key '" + item.key() + "'");
  }
  RunConfig c;
  take(j, "command", c.command);
  take(j, "p", c.p);
  take(j, "out_dir", c.out_dir);
  take(j, "threads", c.threads);
  take(j, "p_values", c.p_values);
  take_optional(j, "kappa", c.kappa);
  take_optional(j, "L", c.L);
  take(j, "samples", c.samples);
  take(j, "r_min", c.r_min);
  take(j, "r_max", c.r_max);
  take(j, "cells_per_octave", c.cells_per_octave);
  take(j, "n_s", c.n_s);
  take(j, "n_phi", c.n_phi);
  take(j, "eps_schedule", c.eps_schedule);
  take(j, "grad_tol", c.grad_tol);
  take(j, "energy_rel_tol", c.energy_rel_tol);
  take(j, "max_iters", c.max_iters);
  take(j, "checkpoint", c.checkpoint);
  take(j, "window_lo", c.window_lo);
  take(j, "window_hi", c.window_hi);
  take(j, "budget", c.budget);
  take(j, "barrier_r0", c.barrier_r0);
  take(j, "mode", c.mode);
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file " + path);
  json j;
  try {
    j = json::parse(is);
  } catch (const json::parse_error& e) {
    throw ConfigError("config file " + path + ": " + e.what());
  }
  return from_json(j);
}

void save_config(const std::string& path, const RunConfig& cfg) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path);
  os << to_json(cfg).dump(2) << '\n';
}

}  // namespace morreylab
