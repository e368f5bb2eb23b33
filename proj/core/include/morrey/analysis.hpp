// Post-processing of solved fields: radial sup profiles and power-law fits,
// Hölder quotients, the gradient L^p norm and the exterior barrier test.

#ifndef MORREY_ANALYSIS_HPP_
#define MORREY_ANALYSIS_HPP_

#include <cstddef>
#include <functional>
#include <vector>

#include "morrey/grid.hpp"
#include "morrey/solver.hpp"

namespace morrey {

struct DecayProfile {
  std::vector<double> radii;  // increasing
  std::vector<double> sup_values;
  /// Every value equals the max of the values at the same or larger radii.
  bool tail_sup_attained = false;
};

/// Arc maxima of |u| on the grid rows with r >= 1.
DecayProfile decay_profile(const ScalarField& field);
DecayProfile decay_profile(const SolveResult& result);

/// Arc maxima of the cell-centre |grad u| on cell rows with centre radius >= r_from.
DecayProfile gradient_profile(const ScalarField& field, double r_from = 2.0);

struct FitWindow {
  double lo = 0.0;
  double hi = 0.0;
};

/// [4, r_max / 8].
FitWindow default_window(const GridSpec& spec);

struct DecayFit {
  double beta_hat = 0.0;
  double C_hat = 0.0;
  FitWindow window;
  std::size_t points = 0;
  /// Root mean square of the residuals of ln S about the fitted line.
  double rms_residual = 0.0;
};

/// Least-squares line through (ln r, ln S) for radii inside the window.
/// Throws std::invalid_argument when fewer than 10 radii fall inside and
/// std::domain_error on non-positive values.
DecayFit fit_exponent(const DecayProfile& profile, FitWindow window);

struct Point2 {
  double x1 = 0.0;
  double x2 = 0.0;
  bool operator==(const Point2&) const = default;
};

struct HolderResult {
  double seminorm = 0.0;
  Point2 x;
  Point2 y;
  std::size_t samples = 0;
};

/// Hölder quotient |u(x) - u(y)| / |x - y|^alpha; zero for x == y.
double holder_quotient(const FullPlaneField& u, double alpha, Point2 x, Point2 y);

/// Largest Hölder quotient found by: the pair (e_2, -e_2); every pair of a
/// strided subset of the grid nodes and their mirror images, at most
/// `sample_budget` points; compass search in polar coordinates started from
/// the best pair of each stride level. Levels are nested, so a larger budget
/// never gives a smaller value. Throws std::invalid_argument for alpha outside
/// (0, 1) or a budget below 2.
HolderResult holder_seminorm(const FullPlaneField& u, double alpha, std::size_t sample_budget);

struct HolderResult1D {
  double seminorm = 0.0;
  double x = 0.0;
  double y = 0.0;
};

/// One-dimensional version on [lo, hi]: nested dyadic samples of the
/// interval (at most `sample_budget` of them) followed by compass search.
HolderResult1D holder_seminorm_1d(const std::function<double(double)>& u, double alpha,
                                  double lo, double hi, std::size_t sample_budget);

/// (integral of |grad u|^p over the mirrored plane)^{1/p}.
double lp_gradient_norm(const ScalarField& field, double p);

struct MorreyEstimate {
  double alpha = 0.0;
  double seminorm = 0.0;
  double grad_norm = 0.0;
  double C_estimate = 0.0;
  Point2 x;
  Point2 y;
};

/// Seminorm over gradient norm: a lower bound for the optimal constant, up to
/// discretisation error. Throws std::domain_error when the gradient vanishes.
MorreyEstimate estimate_morrey_constant(const ScalarField& field, double p,
                                        std::size_t sample_budget = 4096);
MorreyEstimate estimate_morrey_constant(const SolveResult& result,
                                        std::size_t sample_budget = 4096);

struct BarrierReport {
  double beta = 0.0;
  double tau = 0.0;
  double kappa = 0.0;     // beta + tau
  double aperture = 0.0;  // cone opening / pi, > 1
  double eps = 0.0;
  double r0 = 0.0;
  double c_f = 0.0;        // min of the angular factor over the half-plane
  double S_r0 = 0.0;       // arc max of u at r0
  double eps_min = 0.0;    // smallest eps with eps * c_f * r0^{-kappa} >= S_r0
  bool eps_admissible = false;
  std::size_t nodes_checked = 0;
  std::size_t violations = 0;
  double max_violation = 0.0;  // max of u - v, clipped at 0
};

/// Compares u with v = eps * w on the grid nodes with r >= r0, where w is the
/// (-kappa)-homogeneous cone solution, kappa = beta + tau, whose cone contains
/// the closed upper half-plane. r0 must be a grid radius. Throws
/// std::invalid_argument unless tau > 0, beta + tau < beta_p(p) and eps > 0.
BarrierReport barrier_check(const ScalarField& field, double p, double beta, double tau,
                            double eps, double r0 = 2.0);

/// eps_min from barrier_check, the amplitude matched to the arc max at r0.
double admissible_barrier_eps(const ScalarField& field, double p, double kappa, double r0);

}  // namespace morrey

#endif  // MORREY_ANALYSIS_HPP_
