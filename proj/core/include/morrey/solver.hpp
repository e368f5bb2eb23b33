// Discrete Morrey extremal on the upper half-plane.
//
// Minimises the regularised p-Dirichlet energy over fields that vanish on the
// boundary of the log-polar grid and take the value 1 at the node e_2. The
// point measure at e_2 is the Lagrange multiplier of the pin. Antisymmetry is
// built in by solving on {x_2 >= 0} only; mirror_to_fullplane extends oddly.

#ifndef MORREY_SOLVER_HPP_
#define MORREY_SOLVER_HPP_

#include <cstddef>
#include <string>
#include <vector>

#include "morrey/grid.hpp"

namespace morrey {

struct SolverConfig {
  /// Strictly decreasing positive regularisation lengths; each stage warm
  /// starts from the previous one.
  std::vector<double> eps_schedule{1e-2, 1e-3, 1e-4, 1e-5, 1e-6};
  /// Bound on max_i |dE/du_i| / (d^2E/du_i^2) over free nodes, i.e. the
  /// diagonally preconditioned gradient in units of u.
  double grad_tol = 1e-9;
  /// A stage also ends after three consecutive steps that change the energy
  /// by less than this fraction without halving the scaled gradient.
  double energy_rel_tol = 1e-12;
  std::size_t max_iters_per_stage = 100;
  /// Value imposed at e_2. Zero gives the homogeneous control problem.
  double pin_value = 1.0;

  /// Throws std::invalid_argument on an empty or non-decreasing schedule or
  /// non-positive tolerances.
  void validate() const;
};

struct StageReport {
  double eps = 0.0;
  std::size_t iterations = 0;
  std::size_t line_search_failures = 0;
  double final_grad_norm = 0.0;
  double final_energy = 0.0;
  bool converged = false;
  std::string stop_reason;
  /// Energy after every accepted step, starting with the stage's initial value
  /// and advanced by the cellwise energy change of each step.
  std::vector<double> energies;
};

struct SolveResult {
  ScalarField field;
  double p = 0.0;
  double energy = 0.0;
  std::vector<StageReport> stages;
  /// Final stage met grad_tol.
  bool converged = false;
  SolverConfig config;
};

/// min(1, r^{-beta_p}) sin(phi) with the boundary data and pin applied.
ScalarField initial_guess(const LogPolarGrid& grid, double p, double pin_value);

SolveResult solve_extremal(const GridSpec& spec, double p, const SolverConfig& config);

/// Same, starting from `start` (its pin and boundary values are reimposed).
SolveResult solve_extremal(ScalarField start, double p, const SolverConfig& config);

/// Max over free nodes of |g_i| / H_ii.
double scaled_gradient_norm(const ScalarField& field, const EnergyParams& params);

/// Odd extension of a half-plane field to the whole plane. Zero outside the
/// annulus r_min <= |x| <= r_max, where the truncated field vanishes.
class FullPlaneField {
 public:
  explicit FullPlaneField(ScalarField half);

  double operator()(double x1, double x2) const;
  const ScalarField& half_plane() const { return half_; }

 private:
  ScalarField half_;
};

FullPlaneField mirror_to_fullplane(const SolveResult& result);

}  // namespace morrey

#endif  // MORREY_SOLVER_HPP_
