// Run parameters of morreylab and their JSON form.

#ifndef MORREYLAB_CONFIG_HPP_
#define MORREYLAB_CONFIG_HPP_

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "morrey/grid.hpp"
#include "morrey/solver.hpp"

namespace morreylab {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct RunConfig {
  std::string command;
  double p = 4.0;
  std::string out_dir = ".";
  int threads = 1;

  // beta-table
  std::vector<double> p_values{2.5, 3.0, 4.0, 8.0, 16.0, 1e3, 1e6};

  // aronsson
  std::optional<double> kappa;
  std::optional<double> L;
  std::size_t samples = 1001;

  // solve
  double r_min = 1.0 / 64;
  double r_max = 4096.0;
  std::size_t cells_per_octave = 32;
  std::size_t n_s = 0;  // 0: derived from cells_per_octave
  std::size_t n_phi = 65;
  std::vector<double> eps_schedule = morrey::SolverConfig{}.eps_schedule;
  double grad_tol = morrey::SolverConfig{}.grad_tol;
  double energy_rel_tol = morrey::SolverConfig{}.energy_rel_tol;
  std::size_t max_iters = morrey::SolverConfig{}.max_iters_per_stage;

  // analyze
  std::string checkpoint;
  double window_lo = 4.0;
  double window_hi = 0.0;  // 0: r_max / 8
  std::size_t budget = 4096;
  double barrier_r0 = 2.0;

  // verify
  std::string mode = "quick";

  bool operator==(const RunConfig&) const = default;

  morrey::GridSpec grid_spec() const;
  morrey::SolverConfig solver_config() const;
};

nlohmann::json to_json(const RunConfig& cfg);

/// Missing keys keep their defaults; unknown keys and wrong types throw
/// ConfigError.
RunConfig from_json(const nlohmann::json& j);

RunConfig load_config(const std::string& path);
void save_config(const std::string& path, const RunConfig& cfg);

}  // namespace morreylab

#endif  // MORREYLAB_CONFIG_HPP_
