#include "morrey/aronsson.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "morrey/error.hpp"

namespace morrey {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kHalfPi = std::numbers::pi / 2.0;

void require_p(double p) {
  if (!std::isfinite(p) || !(p > 2.0)) {
    std::ostringstream os;
    os << "exponent p must be finite and > 2, got " << p;
    throw std::invalid_argument(os.str());
  }
}

void require_kappa(double kappa) {
  if (!std::isfinite(kappa) || !(kappa > 0.0)) {
    std::ostringstream os;
    os << "cone exponent kappa must be finite and > 0, got " << kappa;
    throw std::invalid_argument(os.str());
  }
}

double dL_dkappa(double kappa, double a) {
  return std::sqrt(a) * (kappa * (1.0 - 2.0 * a) - 1.0) /
         (2.0 * std::pow(kappa, 1.5) * std::pow(a * kappa + 1.0, 1.5));
}

double mu_of(double kappa, double a) {
  return std::sqrt(a * kappa) / std::sqrt(a * kappa + 1.0);
}

// (1 + cos^2 theta / (a kappa))
double stretch(const ConeParams& c, double cos_theta) {
  return 1.0 + cos_theta * cos_theta / (c.a * c.kappa);
}

}  // namespace

double beta_p(double p) {
  if (!std::isfinite(p) || !(p >= 2.0)) {
    std::ostringstream os;
    os << "beta_p requires finite p >= 2, got " << p;
    throw std::invalid_argument(os.str());
  }
  const double t = -1.0 / 3.0 + 2.0 / (3.0 * (p - 1.0));
  return t + std::sqrt(t * t + 1.0 / 3.0);
}

double exponent_a(double p) {
  require_p(p);
  return (p - 1.0) / (p - 2.0);
}

double aperture_L(double kappa, double p) {
  require_kappa(kappa);
  const double a = exponent_a(p);
  return mu_of(kappa, a) * (1.0 + 1.0 / kappa) - 1.0;
}

double kappa_of_L(double L, double p) {
  require_p(p);
  // L(kappa) decreases from +inf (kappa -> 0) to 0 (kappa -> inf).
  if (!std::isfinite(L) || !(L > 0.0)) {
    std::ostringstream os;
    os << "aperture L = " << L << " is not attained by any kappa > 0 (range is (0, inf))";
    throw UnattainableAperture(os.str());
  }
  const double a = exponent_a(p);
  double lo = 1e-6;
  double hi = 1e3;
  while (aperture_L(lo, p) < L) {
    lo /= 10.0;
    if (lo < 1e-300) throw UnattainableAperture("kappa_of_L: lower bracket not found");
  }
  while (aperture_L(hi, p) > L) {
    hi *= 10.0;
    if (hi > 1e300) throw UnattainableAperture("kappa_of_L: upper bracket not found");
  }
  // Bisect until the bracket stops shrinking.
  for (int it = 0; it < 2000; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (aperture_L(mid, p) > L) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  double kappa = 0.5 * (lo + hi);
  const double step = (aperture_L(kappa, p) - L) / dL_dkappa(kappa, a);
  const double polished = kappa - step;
  if (polished > 0.0 &&
      std::abs(aperture_L(polished, p) - L) < std::abs(aperture_L(kappa, p) - L)) {
    kappa = polished;
  }
  return kappa;
}

ConeParams ConeParams::make(double kappa, double p) {
  require_kappa(kappa);
  ConeParams c;
  c.p = p;
  c.kappa = kappa;
  c.a = exponent_a(p);
  c.mu = mu_of(kappa, c.a);
  c.aperture_L = c.mu * (1.0 + 1.0 / kappa) - 1.0;
  return c;
}

double ConeParams::opening() const { return kPi * aperture_L; }
double ConeParams::half_opening() const { return kHalfPi * aperture_L; }

double phi_of_theta(const ConeParams& c, double theta) {
  if (theta >= kHalfPi) return kHalfPi - (1.0 / c.kappa + 1.0) * c.mu * kHalfPi;
  if (theta <= -kHalfPi) return -kHalfPi + (1.0 / c.kappa + 1.0) * c.mu * kHalfPi;
  return theta - (1.0 / c.kappa + 1.0) * c.mu * std::atan(c.mu * std::tan(theta));
}

double dphi_dtheta(const ConeParams& c, double theta) {
  const double c2 = std::cos(theta) * std::cos(theta);
  return (c2 - c.a) / (c2 + c.a * c.kappa);
}

ThetaPoint evaluate_theta(const ConeParams& c, double theta) {
  ThetaPoint pt;
  pt.theta = std::clamp(theta, -kHalfPi, kHalfPi);
  pt.phi = phi_of_theta(c, pt.theta);
  const bool endpoint = std::abs(pt.theta) >= kHalfPi;
  const double cos_t = endpoint ? 0.0 : std::cos(pt.theta);
  const double sin_t = endpoint ? std::copysign(1.0, pt.theta) : std::sin(pt.theta);
  const double s = stretch(c, cos_t);
  const double amp = std::pow(s, -(c.kappa + 1.0) / 2.0);
  pt.f = amp * cos_t;
  pt.fprime = c.kappa * amp * sin_t;
  pt.g = pt.fprime * pt.fprime + (1.0 + 1.0 / (c.a * c.kappa)) * c.kappa * c.kappa * pt.f * pt.f;
  return pt;
}

double theta_of_phi(const ConeParams& c, double phi) {
  const double edge = c.half_opening();
  const double tol = 1e-14 * std::max(1.0, edge);
  if (!std::isfinite(phi) || std::abs(phi) > edge + tol) {
    std::ostringstream os;
    os << "angle " << phi << " lies outside the cone [" << -edge << ", " << edge << "]";
    throw std::domain_error(os.str());
  }
  if (phi >= edge) return -kHalfPi;
  if (phi <= -edge) return kHalfPi;
  // phi(theta) is decreasing: phi(lo) >= target >= phi(hi).
  double lo = -kHalfPi;
  double hi = kHalfPi;
  while (hi - lo > 1e-13) {
    const double mid = 0.5 * (lo + hi);
    if (phi_of_theta(c, mid) > phi) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  double theta = 0.5 * (lo + hi);
  for (int k = 0; k < 3; ++k) {
    const double next = theta - (phi_of_theta(c, theta) - phi) / dphi_dtheta(c, theta);
    if (!(next > lo - 1e-13 && next < hi + 1e-13) || next == theta) break;
    theta = next;
  }
  return theta;
}

AngularProfile angular_profile(double kappa, double p, std::size_t n_samples) {
  require_p(p);
  if (n_samples < 3) throw std::invalid_argument("angular_profile needs at least 3 samples");
  AngularProfile prof;
  prof.params = ConeParams::make(kappa, p);
  prof.theta.resize(n_samples);
  prof.phi.resize(n_samples);
  prof.f.resize(n_samples);
  prof.fprime.resize(n_samples);
  prof.g.resize(n_samples);
  const double last = static_cast<double>(n_samples - 1);
  for (std::size_t i = 0; i < n_samples; ++i) {
    double theta = -kHalfPi * std::cos(kPi * static_cast<double>(i) / last);
    if (i == 0) theta = -kHalfPi;
    if (i + 1 == n_samples) theta = kHalfPi;
    // The odd-length grid has an exact midpoint; keep it at zero.
    if (2 * i + 1 == n_samples) theta = 0.0;
    const ThetaPoint pt = evaluate_theta(prof.params, theta);
    prof.theta[i] = pt.theta;
    prof.phi[i] = pt.phi;
    prof.f[i] = pt.f;
    prof.fprime[i] = pt.fprime;
    prof.g[i] = pt.g;
  }
  return prof;
}

ProfileDiagnostics diagnose(const AngularProfile& prof) {
  const ConeParams& c = prof.params;
  ProfileDiagnostics d;
  const std::size_t n = prof.size();
  d.g_min = std::numeric_limits<double>::infinity();
  std::vector<double> consts(n);
  const double k2 = c.kappa * c.kappa;
  for (std::size_t i = 0; i < n; ++i) {
    const bool endpoint = std::abs(prof.theta[i]) >= kHalfPi;
    const double cos_t = endpoint ? 0.0 : std::cos(prof.theta[i]);
    const double s = stretch(c, cos_t);
    const double e = prof.fprime[i] * prof.fprime[i] + k2 * prof.f[i] * prof.f[i];
    d.energy_identity_residual =
        std::max(d.energy_identity_residual, std::abs(e - k2 * std::pow(s, -c.kappa - 1.0)));
    d.g_identity_residual =
        std::max(d.g_identity_residual, std::abs(prof.g[i] - k2 * std::pow(s, -c.kappa)));
    d.g_min = std::min(d.g_min, prof.g[i]);
    consts[i] = std::pow(e, -c.kappa) * std::pow(std::abs(prof.g[i]), c.kappa + 1.0);
  }
  double sum = 0.0;
  for (double v : consts) sum += v;
  d.separation_constant = sum / static_cast<double>(n);
  const auto [mn, mx] = std::minmax_element(consts.begin(), consts.end());
  d.separation_spread = (*mx - *mn) / std::abs(d.separation_constant);

  const double L1 = c.aperture_L + 1.0;
  d.aperture_identity_residual =
      std::abs(L1 * L1 * (k2 + c.kappa / c.a) - (c.kappa + 1.0) * (c.kappa + 1.0));

  d.phi_strictly_decreasing = true;
  for (std::size_t i = 1; i < n; ++i) {
    if (!(prof.phi[i] < prof.phi[i - 1])) d.phi_strictly_decreasing = false;
  }
  d.f_positive_inside = true;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (!(prof.f[i] > 0.0)) d.f_positive_inside = false;
  }
  // The theta grid is symmetric: sample i mirrors sample n-1-i.
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = n - 1 - i;
    d.symmetry_residual = std::max({d.symmetry_residual, std::abs(prof.phi[i] + prof.phi[j]),
                                    std::abs(prof.f[i] - prof.f[j]),
                                    std::abs(prof.fprime[i] + prof.fprime[j])});
  }
  return d;
}

double evaluate_w(const ConeParams& c, double r, double phi) {
  if (!(r > 0.0) || !std::isfinite(r)) throw std::domain_error("evaluate_w: r must be > 0");
  const double theta = theta_of_phi(c, phi);
  if (std::abs(theta) >= kHalfPi) return 0.0;
  const ThetaPoint pt = evaluate_theta(c, theta);
  return std::pow(r, -c.kappa) * pt.f;
}

double evaluate_w(const AngularProfile& profile, double r, double phi) {
  return evaluate_w(profile.params, r, phi);
}

double discrete_p_laplacian(const PolarField& w, double p, PolarPoint at, double h) {
  const double x = at.r * std::sin(at.phi);
  const double y = at.r * std::cos(at.phi);
  double v[3][3];
  for (int i = -1; i <= 1; ++i) {
    for (int j = -1; j <= 1; ++j) {
      const double xi = x + i * h;
      const double yj = y + j * h;
      v[i + 1][j + 1] = w(std::hypot(xi, yj), std::atan2(xi, yj));
    }
  }
  // Flux |grad w|^{p-2} grad w at the four edge midpoints of the stencil.
  auto flux = [p](double gx, double gy) {
    return std::pow(gx * gx + gy * gy, (p - 2.0) / 2.0);
  };
  const double inv_h = 1.0 / h;
  // east (x + h/2, y)
  const double ex = (v[2][1] - v[1][1]) * inv_h;
  const double ey = (v[2][2] + v[1][2] - v[2][0] - v[1][0]) * 0.25 * inv_h;
  // west (x - h/2, y)
  const double wx = (v[1][1] - v[0][1]) * inv_h;
  const double wy = (v[1][2] + v[0][2] - v[1][0] - v[0][0]) * 0.25 * inv_h;
  // north (x, y + h/2)
  const double ny = (v[1][2] - v[1][1]) * inv_h;
  const double nx = (v[2][2] + v[2][1] - v[0][2] - v[0][1]) * 0.25 * inv_h;
  // south (x, y - h/2)
  const double sy = (v[1][1] - v[1][0]) * inv_h;
  const double sx = (v[2][1] + v[2][0] - v[0][1] - v[0][0]) * 0.25 * inv_h;
  return (flux(ex, ey) * ex - flux(wx, wy) * wx + flux(nx, ny) * ny - flux(sx, sy) * sy) * inv_h;
}

double pharmonic_residual(const PolarField& w, double p, double half_opening,
                          std::span<const PolarPoint> samples, double h, double margin) {
  if (!(h > 0.0) || !(margin > 0.0)) {
    throw std::invalid_argument("pharmonic_residual: step and margin must be positive");
  }
  if (2.0 * h > margin) {
    std::ostringstream os;
    os << "pharmonic_residual: step " << h << " too large for margin " << margin;
    throw std::invalid_argument(os.str());
  }
  double worst = 0.0;
  for (const PolarPoint& pt : samples) {
    const double gap = half_opening - std::abs(pt.phi);
    const double dist = gap >= kHalfPi ? pt.r : pt.r * std::sin(gap);
    if (!(gap > 0.0) || dist < margin || pt.r < margin) {
      std::ostringstream os;
      os << "pharmonic_residual: sample (r=" << pt.r << ", phi=" << pt.phi
         << ") is closer than " << margin << " to the cone boundary";
      throw std::invalid_argument(os.str());
    }
    worst = std::max(worst, std::abs(discrete_p_laplacian(w, p, pt, h)));
  }
  return worst;
}

double pharmonic_residual(const AngularProfile& profile, double p,
                          std::span<const PolarPoint> samples, double h, double margin) {
  const ConeParams c = profile.params;
  PolarField w = [c](double r, double phi) { return evaluate_w(c, r, phi); };
  return pharmonic_residual(w, p, c.half_opening(), samples, h, margin);
}

}  // namespace morrey
