// Separable p-harmonic functions u = r^{-kappa} f(phi) in plane cones.
//
// The profile is parametrised by an auxiliary angle theta in [-pi/2, pi/2]:
//
//   phi(theta) = theta - (1 + 1/kappa) mu atan(mu tan theta)
//   f(theta)   = (1 + cos^2 theta / (a kappa))^{-(kappa+1)/2} cos theta
//   f'(theta)  = kappa (1 + cos^2 theta / (a kappa))^{-(kappa+1)/2} sin theta
//
// with a = (p-1)/(p-2) and mu = sqrt(a kappa / (a kappa + 1)). Here f' is the
// derivative with respect to phi. The map theta -> phi is strictly decreasing
// and sends [-pi/2, pi/2] onto the closed cone [-pi L/2, pi L/2], where L is
// the aperture measured in units of pi (L = 1 is the half-plane). The angle
// phi = 0 is the symmetry axis of the cone.

#ifndef MORREY_ARONSSON_HPP_
#define MORREY_ARONSSON_HPP_

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace morrey {

/// Critical decay exponent
///   beta_p = -1/3 + 2/(3(p-1)) + sqrt((-1/3 + 2/(3(p-1)))^2 + 1/3).
/// Accepts p >= 2; p = 2 evaluates the closed form (value 1) even though the
/// decay statement only concerns p > 2.
double beta_p(double p);

/// a = (p-1)/(p-2).
double exponent_a(double p);

/// Cone aperture L(kappa, p) = mu (1 + 1/kappa) - 1.
double aperture_L(double kappa, double p);

/// Inverse of aperture_L in kappa. Throws UnattainableAperture when no
/// kappa > 0 yields L.
double kappa_of_L(double L, double p);

struct ConeParams {
  double p = 0.0;
  double kappa = 0.0;
  double a = 0.0;
  double mu = 0.0;
  double aperture_L = 0.0;

  static ConeParams make(double kappa, double p);

  /// Opening angle of the cone in radians, pi * L.
  double opening() const;
  /// Boundary rays sit at phi = +/- half_opening().
  double half_opening() const;
};

/// Values of the separable solution at one theta.
struct ThetaPoint {
  double theta = 0.0;
  double phi = 0.0;
  double f = 0.0;
  double fprime = 0.0;
  double g = 0.0;
};

ThetaPoint evaluate_theta(const ConeParams& params, double theta);
double phi_of_theta(const ConeParams& params, double theta);

/// dphi/dtheta = (cos^2 theta - a) / (cos^2 theta + a kappa), always < 0.
double dphi_dtheta(const ConeParams& params, double theta);

/// Inverts phi(theta) on the closed cone. Throws std::domain_error outside.
double theta_of_phi(const ConeParams& params, double phi);

struct AngularProfile {
  ConeParams params;
  std::vector<double> theta;
  std::vector<double> phi;
  std::vector<double> f;
  std::vector<double> fprime;
  std::vector<double> g;

  std::size_t size() const { return theta.size(); }
};

/// Samples the profile on a Chebyshev-type theta grid that includes both
/// endpoints and clusters near them.
AngularProfile angular_profile(double kappa, double p, std::size_t n_samples);

/// Residuals of the identities the exact profile must satisfy.
struct ProfileDiagnostics {
  /// max |(f')^2 + kappa^2 f^2 - kappa^2 (1 + cos^2/(a kappa))^{-kappa-1}|
  double energy_identity_residual = 0.0;
  /// max |g - kappa^2 (1 + cos^2/(a kappa))^{-kappa}|
  double g_identity_residual = 0.0;
  double g_min = 0.0;
  /// [(f')^2 + kappa^2 f^2]^{-kappa} |g|^{kappa+1}: mean and relative spread.
  double separation_constant = 0.0;
  double separation_spread = 0.0;
  /// |(L+1)^2 (kappa^2 + kappa/a) - (kappa+1)^2|
  double aperture_identity_residual = 0.0;
  bool phi_strictly_decreasing = false;
  bool f_positive_inside = false;
  /// max |phi(-theta) + phi(theta)|, |f(-theta) - f(theta)|, |f'(-theta) + f'(theta)|
  double symmetry_residual = 0.0;
};

ProfileDiagnostics diagnose(const AngularProfile& profile);

/// w(r, phi) = r^{-kappa} f(phi) with f obtained by exact inversion of phi(theta).
/// Zero on the boundary rays, std::domain_error outside the closed cone.
double evaluate_w(const ConeParams& params, double r, double phi);
double evaluate_w(const AngularProfile& profile, double r, double phi);

struct PolarPoint {
  double r = 0.0;
  double phi = 0.0;
};

/// A field given in polar coordinates (r, phi), phi measured from the axis.
using PolarField = std::function<double(double r, double phi)>;

/// Discrete p-Laplacian div(|grad w|^{p-2} grad w) at one point, using the
/// conservative nine-point stencil with step h in Cartesian coordinates.
double discrete_p_laplacian(const PolarField& w, double p, PolarPoint at, double h);

/// Max over the samples of |discrete p-Laplacian of w|. Every sample must stay
/// at least `margin` (Euclidean) away from the boundary rays, and the stencil
/// reach must fit inside that margin (2h <= margin); otherwise
/// std::invalid_argument.
double pharmonic_residual(const PolarField& w, double p, double half_opening,
                          std::span<const PolarPoint> samples, double h, double margin);

double pharmonic_residual(const AngularProfile& profile, double p,
                          std::span<const PolarPoint> samples, double h, double margin);

}  // namespace morrey

#endif  // MORREY_ARONSSON_HPP_
