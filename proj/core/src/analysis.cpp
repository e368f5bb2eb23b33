#include "morrey/analysis.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "morrey/aronsson.hpp"

namespace morrey {

namespace {

constexpr double kPi = std::numbers::pi;

bool tail_sup_attained(const std::vector<double>& v) {
  double tail = -INFINITY;
  for (std::size_t k = v.size(); k-- > 0;) {
    if (v[k] < tail) return false;
    tail = v[k];
  }
  return true;
}

double quotient(double du, double dist2, double alpha) {
  if (dist2 == 0.0) return 0.0;
  return std::abs(du) * std::exp(-0.5 * alpha * std::log(dist2));
}

struct Candidate {
  double value = -1.0;
  std::size_t a = 0;
  std::size_t b = 0;
};

// Best pair among points [0, n); ties keep the lexicographically first pair.
Candidate best_pair(const std::vector<Point2>& pts, const std::vector<double>& vals,
                    double alpha) {
  const std::size_t n = pts.size();
  std::vector<Candidate> per_row(n);
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t ai = 0; ai < static_cast<std::ptrdiff_t>(n); ++ai) {
    const auto a = static_cast<std::size_t>(ai);
    Candidate best;
    for (std::size_t b = a + 1; b < n; ++b) {
      const double d1 = pts[a].x1 - pts[b].x1;
      const double d2 = pts[a].x2 - pts[b].x2;
      const double q = quotient(vals[a] - vals[b], d1 * d1 + d2 * d2, alpha);
      if (q > best.value) best = Candidate{q, a, b};
    }
    per_row[a] = best;
  }
  Candidate best;
  for (const Candidate& c : per_row) {
    if (c.value > best.value) best = c;
  }
  return best;
}

// Maximises f over R^dim by compass moves of size step[k], halving until the
// steps shrink by `shrink`.
template <std::size_t Dim, class F>
double compass_search(const F& f, std::array<double, Dim>& x, std::array<double, Dim> step,
                      double shrink) {
  double best = f(x);
  const std::array<double, Dim> initial = step;
  int moves = 0;
  while (step[0] > initial[0] * shrink && moves < 100000) {
    std::array<double, Dim> best_x = x;
    double best_val = best;
    for (std::size_t k = 0; k < Dim; ++k) {
      for (double sign : {1.0, -1.0}) {
        std::array<double, Dim> y = x;
        y[k] += sign * step[k];
        const double v = f(y);
        if (v > best_val) {
          best_val = v;
          best_x = y;
        }
      }
    }
    if (best_val > best) {
      best = best_val;
      x = best_x;
      ++moves;
    } else {
      for (double& s : step) s *= 0.5;
    }
  }
  return best;
}

}  // namespace

DecayProfile decay_profile(const ScalarField& field) {
  const LogPolarGrid& g = field.grid();
  DecayProfile out;
  for (std::size_t i = g.unit_row(); i < g.n_s(); ++i) {
    double m = 0.0;
    for (std::size_t j = 0; j < g.n_phi(); ++j) m = std::max(m, std::abs(field(i, j)));
    out.radii.push_back(g.r(i));
    out.sup_values.push_back(m);
  }
  out.tail_sup_attained = tail_sup_attained(out.sup_values);
  return out;
}

DecayProfile decay_profile(const SolveResult& result) { return decay_profile(result.field); }

DecayProfile gradient_profile(const ScalarField& field, double r_from) {
  const LogPolarGrid& g = field.grid();
  const std::vector<double> mag = cell_gradient_magnitude(field);
  const std::size_t cols = g.n_phi() - 1;
  DecayProfile out;
  for (std::size_t i = 0; i + 1 < g.n_s(); ++i) {
    const double r = std::exp(g.cell_s(i));
    if (r < r_from * (1.0 - 1e-12)) continue;
    double m = 0.0;
    for (std::size_t j = 0; j < cols; ++j) m = std::max(m, mag[i * cols + j]);
    out.radii.push_back(r);
    out.sup_values.push_back(m);
  }
  out.tail_sup_attained = tail_sup_attained(out.sup_values);
  return out;
}

FitWindow default_window(const GridSpec& spec) { return FitWindow{4.0, spec.r_max / 8.0}; }

DecayFit fit_exponent(const DecayProfile& profile, FitWindow window) {
  if (profile.radii.size() != profile.sup_values.size()) {
    throw std::invalid_argument("decay profile: radii and values differ in length");
  }
  if (!(window.lo > 0.0) || !(window.hi > window.lo)) {
    throw std::invalid_argument("fit window must satisfy 0 < lo < hi");
  }
  std::vector<double> xs;
  std::vector<double> ys;
  for (std::size_t k = 0; k < profile.radii.size(); ++k) {
    const double r = profile.radii[k];
    if (r < window.lo * (1.0 - 1e-12) || r > window.hi * (1.0 + 1e-12)) continue;
    if (!(profile.sup_values[k] > 0.0)) {
      throw std::domain_error("fit window contains a non-positive value");
    }
    xs.push_back(std::log(r));
    ys.push_back(std::log(profile.sup_values[k]));
  }
  if (xs.size() < 10) {
    throw std::invalid_argument("fit window holds fewer than 10 radii");
  }
  const auto n = static_cast<double>(xs.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    mx += xs[k];
    my += ys[k];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    sxx += (xs[k] - mx) * (xs[k] - mx);
    sxy += (xs[k] - mx) * (ys[k] - my);
  }
  const double slope = sxy / sxx;
  const double intercept = my - slope * mx;
  double ss = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    const double e = ys[k] - (intercept + slope * xs[k]);
    ss += e * e;
  }
  DecayFit fit;
  fit.beta_hat = -slope;
  fit.C_hat = std::exp(intercept);
  fit.window = window;
  fit.points = xs.size();
  fit.rms_residual = std::sqrt(ss / n);
  return fit;
}

double holder_quotient(const FullPlaneField& u, double alpha, Point2 x, Point2 y) {
  const double d1 = x.x1 - y.x1;
  const double d2 = x.x2 - y.x2;
  return quotient(u(x.x1, x.x2) - u(y.x1, y.x2), d1 * d1 + d2 * d2, alpha);
}

HolderResult holder_seminorm(const FullPlaneField& u, double alpha, std::size_t sample_budget) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
  if (sample_budget < 2) throw std::invalid_argument("sample budget must be at least 2");
  const ScalarField& half = u.half_plane();
  const LogPolarGrid& g = half.grid();

  // Interior nodes congruent to the pin modulo the stride, with mirrors.
  auto level_nodes = [&](std::size_t stride) {
    std::vector<std::pair<std::size_t, std::size_t>> nodes;
    for (std::size_t i = g.unit_row() % stride; i < g.n_s(); i += stride) {
      if (i == 0 || i + 1 == g.n_s()) continue;
      for (std::size_t j = g.axis_column() % stride; j < g.n_phi(); j += stride) {
        if (j == 0 || j + 1 == g.n_phi()) continue;
        nodes.emplace_back(i, j);
      }
    }
    return nodes;
  };
  std::size_t coarsest = 1;
  while (coarsest < std::max(g.n_s(), g.n_phi())) coarsest *= 2;
  std::size_t finest = coarsest;
  while (finest > 1 && 2 * level_nodes(finest / 2).size() <= sample_budget) finest /= 2;

  HolderResult out;
  const Point2 e2{0.0, 1.0};
  const Point2 me2{0.0, -1.0};
  out.seminorm = holder_quotient(u, alpha, e2, me2);
  out.x = e2;
  out.y = me2;

  const double ds = g.ds();
  const double dphi = g.dphi();
  for (std::size_t stride = coarsest; stride >= finest; stride /= 2) {
    const auto nodes = level_nodes(stride);
    std::vector<Point2> pts;
    std::vector<double> vals;
    for (const auto& [i, j] : nodes) {
      const double r = g.r(i);
      const double ph = g.phi(j);
      const Point2 p{r * std::cos(ph), r * std::sin(ph)};
      pts.push_back(p);
      vals.push_back(half(i, j));
      pts.push_back(Point2{p.x1, -p.x2});
      vals.push_back(-half(i, j));
    }
    out.samples = std::max(out.samples, pts.size());
    if (pts.size() >= 2) {
      const Candidate c = best_pair(pts, vals, alpha);
      // Polar coordinates (s, theta) of both points.
      std::array<double, 4> z{std::log(std::hypot(pts[c.a].x1, pts[c.a].x2)),
                              std::atan2(pts[c.a].x2, pts[c.a].x1),
                              std::log(std::hypot(pts[c.b].x1, pts[c.b].x2)),
                              std::atan2(pts[c.b].x2, pts[c.b].x1)};
      auto to_point = [](double s, double th) {
        const double r = std::exp(s);
        return Point2{r * std::cos(th), r * std::sin(th)};
      };
      auto f = [&](const std::array<double, 4>& w) {
        return holder_quotient(u, alpha, to_point(w[0], w[1]), to_point(w[2], w[3]));
      };
      const double h = static_cast<double>(stride);
      const double v = compass_search<4>(f, z, {h * ds, h * dphi, h * ds, h * dphi}, 1e-4 / h);
      if (v > out.seminorm) {
        out.seminorm = v;
        out.x = to_point(z[0], z[1]);
        out.y = to_point(z[2], z[3]);
      }
    }
    if (stride == 1) break;
  }
  if (u(out.x.x1, out.x.x2) < u(out.y.x1, out.y.x2)) std::swap(out.x, out.y);
  return out;
}

HolderResult1D holder_seminorm_1d(const std::function<double(double)>& u, double alpha,
                                  double lo, double hi, std::size_t sample_budget) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
  if (sample_budget < 2) throw std::invalid_argument("sample budget must be at least 2");
  if (!(hi > lo)) throw std::invalid_argument("interval must satisfy lo < hi");
  std::size_t finest = 0;
  while (finest < 40 && (std::size_t{1} << (finest + 1)) + 1 <= sample_budget) ++finest;

  auto q = [&](double x, double y) { return quotient(u(x) - u(y), (x - y) * (x - y), alpha); };
  HolderResult1D out{-1.0, lo, hi};
  for (std::size_t level = 0; level <= finest; ++level) {
    const std::size_t cells = std::size_t{1} << level;
    std::vector<Point2> pts(cells + 1);
    std::vector<double> vals(cells + 1);
    for (std::size_t k = 0; k <= cells; ++k) {
      const double x = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(cells);
      pts[k] = Point2{x, 0.0};
      vals[k] = u(x);
    }
    const Candidate c = best_pair(pts, vals, alpha);
    std::array<double, 2> z{pts[c.a].x1, pts[c.b].x1};
    auto f = [&](const std::array<double, 2>& w) {
      if (w[0] < lo || w[0] > hi || w[1] < lo || w[1] > hi) return -1.0;
      return q(w[0], w[1]);
    };
    const double h = (hi - lo) / static_cast<double>(cells);
    const double v = compass_search<2>(f, z, {h, h}, 1e-12 / h * (hi - lo));
    if (v > out.seminorm) {
      out.seminorm = v;
      out.x = z[0];
      out.y = z[1];
    }
  }
  if (u(out.x) < u(out.y)) std::swap(out.x, out.y);
  return out;
}

double lp_gradient_norm(const ScalarField& field, double p) {
  return std::pow(2.0 * gradient_lp_integral(field, p), 1.0 / p);
}

MorreyEstimate estimate_morrey_constant(const ScalarField& field, double p,
                                        std::size_t sample_budget) {
  MorreyEstimate est;
  est.alpha = 1.0 - 2.0 / p;
  est.grad_norm = lp_gradient_norm(field, p);
  if (!(est.grad_norm > 0.0)) throw std::domain_error("gradient norm vanishes");
  const HolderResult h = holder_seminorm(FullPlaneField(field), est.alpha, sample_budget);
  est.seminorm = h.seminorm;
  est.x = h.x;
  est.y = h.y;
  est.C_estimate = est.seminorm / est.grad_norm;
  return est;
}

MorreyEstimate estimate_morrey_constant(const SolveResult& result, std::size_t sample_budget) {
  return estimate_morrey_constant(result.field, result.p, sample_budget);
}

double admissible_barrier_eps(const ScalarField& field, double p, double kappa, double r0) {
  const ConeParams cone = ConeParams::make(kappa, p);
  const double c_f = std::min(evaluate_w(cone, 1.0, kPi / 2), evaluate_w(cone, 1.0, -kPi / 2));
  const LogPolarGrid& g = field.grid();
  for (std::size_t i = 0; i < g.n_s(); ++i) {
    if (g.r(i) < r0 * (1.0 - 1e-12)) continue;
    double S = 0.0;
    for (std::size_t j = 0; j < g.n_phi(); ++j) S = std::max(S, std::abs(field(i, j)));
    return S * std::pow(r0, kappa) / c_f;
  }
  throw std::invalid_argument("r0 lies beyond the grid");
}

BarrierReport barrier_check(const ScalarField& field, double p, double beta, double tau,
                            double eps, double r0) {
  if (!(tau > 0.0)) throw std::invalid_argument("barrier gap tau must be positive");
  if (!(beta + tau < beta_p(p))) {
    throw std::invalid_argument("beta + tau must stay below beta_p: no barrier at that rate");
  }
  if (!(eps > 0.0)) throw std::invalid_argument("barrier amplitude eps must be positive");
  if (!(r0 > 0.0)) throw std::invalid_argument("r0 must be positive");
  BarrierReport rep;
  rep.beta = beta;
  rep.tau = tau;
  rep.kappa = beta + tau;
  rep.eps = eps;
  rep.r0 = r0;
  const ConeParams cone = ConeParams::make(rep.kappa, p);
  rep.aperture = cone.aperture_L;
  rep.c_f = std::min(evaluate_w(cone, 1.0, kPi / 2), evaluate_w(cone, 1.0, -kPi / 2));
  rep.eps_min = admissible_barrier_eps(field, p, rep.kappa, r0);
  rep.S_r0 = rep.eps_min * rep.c_f * std::pow(r0, -rep.kappa);
  rep.eps_admissible = eps >= rep.eps_min * (1.0 - 1e-12);

  const LogPolarGrid& g = field.grid();
  for (std::size_t i = 0; i < g.n_s(); ++i) {
    const double r = g.r(i);
    if (r < r0 * (1.0 - 1e-12)) continue;
    for (std::size_t j = 0; j < g.n_phi(); ++j) {
      const double v = eps * evaluate_w(cone, r, g.phi(j) - kPi / 2);
      const double excess = field(i, j) - v;
      ++rep.nodes_checked;
      if (excess > 0.0) {
        ++rep.violations;
        rep.max_violation = std::max(rep.max_violation, excess);
      }
    }
  }
  return rep;
}

}  // namespace morrey
