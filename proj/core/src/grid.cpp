#include "morrey/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace morrey {

namespace {

constexpr double kPi = std::numbers::pi;

// Neumaier compensated sum.
struct CompensatedSum {
  double sum = 0.0;
  double carry = 0.0;
  void add(double x) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x)) {
      carry += (sum - t) + x;
    } else {
      carry += (x - t) + sum;
    }
    sum = t;
  }
  double value() const { return sum + carry; }
};

double sum_in_order(const std::vector<double>& parts) {
  CompensatedSum acc;
  for (double v : parts) acc.add(v);
  return acc.value();
}

// Local corner order: 0 = (i, j), 1 = (i+1, j), 2 = (i, j+1), 3 = (i+1, j+1).
constexpr int kCornerDi[4] = {0, 1, 0, 1};
constexpr int kCornerDj[4] = {0, 0, 1, 1};

// One quadrature term of a cell: weight fraction and the linear maps from the
// four corner values to (u_s, u_phi).
struct QuadTerm {
  double w;
  double Ds[4];
  double Dp[4];
};
using CellRule = std::vector<QuadTerm>;

// Gradient of the bilinear interpolant at the 2x2 Gauss points of the cell.
// xi runs along s, eta along phi; N_0 = (1-xi)(1-eta), N_1 = xi(1-eta),
// N_2 = (1-xi)eta, N_3 = xi eta.
CellRule gauss_rule(double ds, double dphi) {
  const double lo = 0.5 - 0.5 / std::sqrt(3.0);
  const double nodes[2] = {lo, 1.0 - lo};
  CellRule rule;
  rule.reserve(4);
  for (double xi : nodes) {
    for (double eta : nodes) {
      QuadTerm t{};
      t.w = 0.25;
      t.Ds[0] = -(1.0 - eta) / ds;
      t.Ds[1] = (1.0 - eta) / ds;
      t.Ds[2] = -eta / ds;
      t.Ds[3] = eta / ds;
      t.Dp[0] = -(1.0 - xi) / dphi;
      t.Dp[1] = -xi / dphi;
      t.Dp[2] = (1.0 - xi) / dphi;
      t.Dp[3] = xi / dphi;
      rule.push_back(t);
    }
  }
  return rule;
}

struct CellContext {
  double metric;   // e^{-2 s_c}
  double weight;   // integral of e^{2s} over the cell
  double p;
  double eps2;
};

CellContext context(const LogPolarGrid& g, std::size_t i, const EnergyParams& prm) {
  return CellContext{g.cell_metric(i), g.cell_weight(i), prm.p, prm.eps * prm.eps};
}

void load_corners(const LogPolarGrid& g, std::span<const double> u, std::size_t i,
                  std::size_t j, double (&c)[4]) {
  for (int k = 0; k < 4; ++k) c[k] = u[g.index(i + kCornerDi[k], j + kCornerDj[k])];
}

inline void apply(const QuadTerm& t, const double (&c)[4], double& qs, double& qp) {
  qs = t.Ds[0] * c[0] + t.Ds[1] * c[1] + t.Ds[2] * c[2] + t.Ds[3] * c[3];
  qp = t.Dp[0] * c[0] + t.Dp[1] * c[1] + t.Dp[2] * c[2] + t.Dp[3] * c[3];
}

double cell_energy(const CellContext& cx, const CellRule& rule, const double (&c)[4]) {
  double total = 0.0;
  for (const QuadTerm& t : rule) {
    double qs;
    double qp;
    apply(t, c, qs, qp);
    const double Q = cx.metric * (qs * qs + qp * qp) + cx.eps2;
    total += t.w * std::pow(Q, 0.5 * cx.p);
  }
  return total * cx.weight / cx.p;
}

double cell_energy_change(const CellContext& cx, const CellRule& rule, const double (&c)[4],
                          const double (&dc)[4]) {
  double total = 0.0;
  for (const QuadTerm& t : rule) {
    double qs;
    double qp;
    double dqs;
    double dqp;
    apply(t, c, qs, qp);
    apply(t, dc, dqs, dqp);
    const double Q = cx.metric * (qs * qs + qp * qp) + cx.eps2;
    const double dQ = cx.metric * (dqs * (2.0 * qs + dqs) + dqp * (2.0 * qp + dqp));
    if (Q > 0.0) {
      total += t.w * std::pow(Q, 0.5 * cx.p) * std::expm1(0.5 * cx.p * std::log1p(dQ / Q));
    } else {
      total += t.w * std::pow(std::max(dQ, 0.0), 0.5 * cx.p);
    }
  }
  return total * cx.weight / cx.p;
}

// Local gradient (4) and, optionally, local Hessian (4x4) of the cell energy.
void cell_derivatives(const CellContext& cx, const CellRule& rule, const double (&c)[4],
                      double (&grad)[4], double (*hess)[4]) {
  for (int a = 0; a < 4; ++a) {
    grad[a] = 0.0;
    if (hess) {
      for (int b = 0; b < 4; ++b) hess[a][b] = 0.0;
    }
  }
  for (const QuadTerm& t : rule) {
    double qs;
    double qp;
    apply(t, c, qs, qp);
    const double Q = cx.metric * (qs * qs + qp * qp) + cx.eps2;
    if (Q <= 0.0) continue;  // eps = 0 and flat: all derivatives vanish for p > 2
    const double scale = t.w * cx.weight * cx.metric;
    const double Qm1 = std::pow(Q, 0.5 * cx.p - 1.0);
    const double gs = scale * Qm1 * qs;
    const double gp = scale * Qm1 * qp;
    for (int a = 0; a < 4; ++a) grad[a] += t.Ds[a] * gs + t.Dp[a] * gp;
    if (hess) {
      const double iso = scale * Qm1;
      const double aniso = scale * (cx.p - 2.0) * cx.metric * Qm1 / Q;
      const double hss = iso + aniso * qs * qs;
      const double hpp = iso + aniso * qp * qp;
      const double hsp = aniso * qs * qp;
      for (int a = 0; a < 4; ++a) {
        for (int b = 0; b < 4; ++b) {
          hess[a][b] += t.Ds[a] * (hss * t.Ds[b] + hsp * t.Dp[b]) +
                        t.Dp[a] * (hsp * t.Ds[b] + hpp * t.Dp[b]);
        }
      }
    }
  }
}

void require_finite(std::span<const double> v) {
  for (double x : v) {
    if (!std::isfinite(x)) throw std::invalid_argument("field contains non-finite values");
  }
}

}  // namespace

GridSpec GridSpec::per_octave(double r_min, double r_max, std::size_t cells_per_octave,
                              std::size_t n_phi) {
  const double lo = std::log2(r_min);
  const double hi = std::log2(r_max);
  if (lo != std::round(lo) || hi != std::round(hi)) {
    throw std::invalid_argument("GridSpec::per_octave: r_min and r_max must be powers of two");
  }
  if (cells_per_octave == 0) throw std::invalid_argument("cells_per_octave must be positive");
  const auto octaves = static_cast<std::size_t>(std::llround(hi - lo));
  return GridSpec{r_min, r_max, octaves * cells_per_octave + 1, n_phi};
}

LogPolarGrid::LogPolarGrid(const GridSpec& spec) : spec_(spec) {
  std::ostringstream os;
  if (!(spec.r_min > 0.0 && spec.r_min < 1.0)) os << "r_min must lie in (0, 1); ";
  if (!(spec.r_max > 1.0) || !std::isfinite(spec.r_max)) os << "r_max must exceed 1; ";
  if (spec.n_s < 3) os << "n_s must be >= 3; ";
  if (spec.n_phi < 3) os << "n_phi must be >= 3; ";
  if (spec.n_phi % 2 == 0) os << "n_phi must be odd so that phi = pi/2 is a node; ";
  if (!os.str().empty()) throw std::invalid_argument("invalid grid: " + os.str());

  const double s_lo = std::log(spec.r_min);
  const double s_hi = std::log(spec.r_max);
  ds_ = (s_hi - s_lo) / static_cast<double>(spec.n_s - 1);
  dphi_ = kPi / static_cast<double>(spec.n_phi - 1);
  const double pos = -s_lo / ds_;
  const double rounded = std::round(pos);
  if (std::abs(pos - rounded) > 1e-8 * std::max(1.0, pos)) {
    std::ostringstream msg;
    msg << "invalid grid: s = 0 is not a node (ln r_min / ds = " << -pos << ")";
    throw std::invalid_argument(msg.str());
  }
  unit_row_ = static_cast<std::size_t>(rounded);

  s_.resize(spec.n_s);
  r_.resize(spec.n_s);
  for (std::size_t i = 0; i < spec.n_s; ++i) {
    s_[i] = (static_cast<double>(i) - static_cast<double>(unit_row_)) * ds_;
    r_[i] = std::exp(s_[i]);
  }
  s_.front() = s_lo;
  s_.back() = s_hi;
  r_.front() = spec.r_min;
  r_.back() = spec.r_max;

  weight_.resize(spec.n_s - 1);
  metric_.resize(spec.n_s - 1);
  for (std::size_t i = 0; i + 1 < spec.n_s; ++i) {
    // (e^{2 s_{i+1}} - e^{2 s_i}) / 2, written to avoid cancellation.
    weight_[i] = dphi_ * 0.5 * std::exp(2.0 * s_[i]) * std::expm1(2.0 * (s_[i + 1] - s_[i]));
    metric_[i] = std::exp(-(s_[i] + s_[i + 1]));
  }
}

double LogPolarGrid::area() const {
  CompensatedSum acc;
  for (double w : weight_) acc.add(w);
  return acc.value() * static_cast<double>(spec_.n_phi - 1);
}

std::pair<double, double> LogPolarGrid::locate(double r, double phi) const {
  constexpr double kSnap = 1e-9;
  if (!(r > 0.0) || !std::isfinite(r) || !std::isfinite(phi)) {
    throw std::domain_error("grid query outside domain");
  }
  double x = std::log(r) / ds_ + static_cast<double>(unit_row_);
  double y = phi / dphi_;
  const double xmax = static_cast<double>(spec_.n_s - 1);
  const double ymax = static_cast<double>(spec_.n_phi - 1);
  if (std::abs(x - std::round(x)) < kSnap) x = std::round(x);
  if (std::abs(y - std::round(y)) < kSnap) y = std::round(y);
  if (x < 0.0 || x > xmax || y < 0.0 || y > ymax) {
    std::ostringstream os;
    os << "grid query (r=" << r << ", phi=" << phi << ") outside [" << spec_.r_min << ", "
       << spec_.r_max << "] x [0, pi]";
    throw std::domain_error(os.str());
  }
  return {x, y};
}

ScalarField::ScalarField(LogPolarGrid grid)
    : grid_(std::move(grid)), values_(grid_.size(), 0.0) {}

ScalarField::ScalarField(LogPolarGrid grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.size() != grid_.size()) {
    throw std::invalid_argument("ScalarField: value count does not match grid");
  }
}

void ScalarField::set_pin(std::optional<PinnedNode> pin) {
  if (pin) {
    if (pin->i >= grid_.n_s() || pin->j >= grid_.n_phi() || grid_.on_boundary(pin->i, pin->j)) {
      throw std::invalid_argument("pinned node must be an interior grid node");
    }
  }
  pin_ = pin;
}

bool ScalarField::constrained(std::size_t i, std::size_t j) const {
  if (grid_.on_boundary(i, j)) return true;
  return pin_ && pin_->i == i && pin_->j == j;
}

void ScalarField::apply_constraints() {
  const std::size_t ns = grid_.n_s();
  const std::size_t np = grid_.n_phi();
  for (std::size_t i = 0; i < ns; ++i) {
    (*this)(i, 0) = 0.0;
    (*this)(i, np - 1) = 0.0;
  }
  for (std::size_t j = 0; j < np; ++j) {
    (*this)(0, j) = 0.0;
    (*this)(ns - 1, j) = 0.0;
  }
  if (pin_) (*this)(pin_->i, pin_->j) = pin_->value;
}

void validate(const EnergyParams& params) {
  if (!std::isfinite(params.p) || !(params.p > 2.0)) {
    throw std::invalid_argument("energy exponent p must be > 2");
  }
  if (!std::isfinite(params.eps) || params.eps < 0.0) {
    throw std::invalid_argument("regularisation eps must be >= 0");
  }
}

double energy(const ScalarField& field, const EnergyParams& params) {
  validate(params);
  require_finite(field.values());
  const LogPolarGrid& g = field.grid();
  const auto u = field.values();
  const CellRule rule = gauss_rule(field.grid().ds(), field.grid().dphi());
  const std::size_t rows = g.n_s() - 1;
  std::vector<double> row_sum(rows);
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < rows; ++i) {
    const CellContext cx = context(g, i, params);
    CompensatedSum acc;
    double c[4];
    for (std::size_t j = 0; j + 1 < g.n_phi(); ++j) {
      load_corners(g, u, i, j, c);
      acc.add(cell_energy(cx, rule, c));
    }
    row_sum[i] = acc.value();
  }
  return sum_in_order(row_sum);
}

double energy_change(const ScalarField& field, std::span<const double> du,
                     const EnergyParams& params) {
  validate(params);
  const LogPolarGrid& g = field.grid();
  if (du.size() != g.size()) throw std::invalid_argument("energy_change: size mismatch");
  const auto u = field.values();
  const CellRule rule = gauss_rule(field.grid().ds(), field.grid().dphi());
  const std::size_t rows = g.n_s() - 1;
  std::vector<double> row_sum(rows);
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < rows; ++i) {
    const CellContext cx = context(g, i, params);
    CompensatedSum acc;
    double c[4];
    double dc[4];
    for (std::size_t j = 0; j + 1 < g.n_phi(); ++j) {
      load_corners(g, u, i, j, c);
      load_corners(g, du, i, j, dc);
      if (dc[0] == 0.0 && dc[1] == 0.0 && dc[2] == 0.0 && dc[3] == 0.0) continue;
      acc.add(cell_energy_change(cx, rule, c, dc));
    }
    row_sum[i] = acc.value();
  }
  return sum_in_order(row_sum);
}

namespace {

// Per-cell local derivatives, then a deterministic gather onto nodes.
struct CellDerivatives {
  std::vector<std::array<double, 4>> grad;
  std::vector<std::array<double, 16>> hess;
};

CellDerivatives all_cell_derivatives(const ScalarField& field, const EnergyParams& params,
                                     bool with_hessian) {
  const LogPolarGrid& g = field.grid();
  const auto u = field.values();
  const CellRule rule = gauss_rule(field.grid().ds(), field.grid().dphi());
  const std::size_t rows = g.n_s() - 1;
  const std::size_t cols = g.n_phi() - 1;
  CellDerivatives out;
  out.grad.resize(rows * cols);
  if (with_hessian) out.hess.resize(rows * cols);
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < rows; ++i) {
    const CellContext cx = context(g, i, params);
    double c[4];
    double grad[4];
    double hess[4][4];
    for (std::size_t j = 0; j < cols; ++j) {
      load_corners(g, u, i, j, c);
      cell_derivatives(cx, rule, c, grad, with_hessian ? hess : nullptr);
      const std::size_t cell = i * cols + j;
      for (int a = 0; a < 4; ++a) out.grad[cell][a] = grad[a];
      if (with_hessian) {
        for (int a = 0; a < 4; ++a) {
          for (int b = 0; b < 4; ++b) out.hess[cell][a * 4 + b] = hess[a][b];
        }
      }
    }
  }
  return out;
}

// Cells touching node (i, j), paired with the node's corner slot in each cell.
template <typename Visit>
void for_adjacent_cells(const LogPolarGrid& g, std::size_t i, std::size_t j, Visit&& visit) {
  const std::size_t cols = g.n_phi() - 1;
  for (int k = 0; k < 4; ++k) {
    // Node is corner k of the cell whose origin is (i - di_k, j - dj_k).
    if (i < static_cast<std::size_t>(kCornerDi[k]) || j < static_cast<std::size_t>(kCornerDj[k])) {
      continue;
    }
    const std::size_t ci = i - kCornerDi[k];
    const std::size_t cj = j - kCornerDj[k];
    if (ci + 1 >= g.n_s() || cj + 1 >= g.n_phi()) continue;
    visit(ci * cols + cj, ci, cj, k);
  }
}

}  // namespace

ScalarField energy_gradient(const ScalarField& field, const EnergyParams& params) {
  validate(params);
  require_finite(field.values());
  const LogPolarGrid& g = field.grid();
  const CellDerivatives cd = all_cell_derivatives(field, params, false);
  ScalarField out(g);
  out.set_pin(field.pin());
  auto v = out.values();
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < g.n_s(); ++i) {
    for (std::size_t j = 0; j < g.n_phi(); ++j) {
      if (field.constrained(i, j)) continue;
      double acc = 0.0;
      for_adjacent_cells(g, i, j, [&](std::size_t cell, std::size_t, std::size_t, int k) {
        acc += cd.grad[cell][k];
      });
      v[g.index(i, j)] = acc;
    }
  }
  return out;
}

GradientAndDiagonal energy_gradient_and_diagonal(const ScalarField& field,
                                                 const EnergyParams& params) {
  validate(params);
  require_finite(field.values());
  const LogPolarGrid& g = field.grid();
  const CellDerivatives cd = all_cell_derivatives(field, params, true);
  GradientAndDiagonal out;
  out.gradient.assign(g.size(), 0.0);
  out.diagonal.assign(g.size(), 0.0);
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < g.n_s(); ++i) {
    for (std::size_t j = 0; j < g.n_phi(); ++j) {
      if (field.constrained(i, j)) continue;
      double gsum = 0.0;
      double dsum = 0.0;
      for_adjacent_cells(g, i, j, [&](std::size_t cell, std::size_t, std::size_t, int k) {
        gsum += cd.grad[cell][k];
        dsum += cd.hess[cell][k * 4 + k];
      });
      out.gradient[g.index(i, j)] = gsum;
      out.diagonal[g.index(i, j)] = dsum;
    }
  }
  return out;
}

std::vector<Stencil> energy_hessian(const ScalarField& field, const EnergyParams& params) {
  validate(params);
  require_finite(field.values());
  const LogPolarGrid& g = field.grid();
  const CellDerivatives cd = all_cell_derivatives(field, params, true);
  std::vector<Stencil> out(g.size());
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < g.n_s(); ++i) {
    for (std::size_t j = 0; j < g.n_phi(); ++j) {
      Stencil st{};
      if (!field.constrained(i, j)) {
        for_adjacent_cells(g, i, j, [&](std::size_t cell, std::size_t ci, std::size_t cj, int a) {
          for (int b = 0; b < 4; ++b) {
            const std::size_t ni = ci + kCornerDi[b];
            const std::size_t nj = cj + kCornerDj[b];
            if (field.constrained(ni, nj)) continue;
            const int di = static_cast<int>(ni) - static_cast<int>(i);
            const int dj = static_cast<int>(nj) - static_cast<int>(j);
            st[(di + 1) * 3 + (dj + 1)] += cd.hess[cell][a * 4 + b];
          }
        });
      }
      out[g.index(i, j)] = st;
    }
  }
  return out;
}

double gradient_lp_integral(const ScalarField& field, double p) {
  return p * energy(field, EnergyParams{p, 0.0});
}

std::vector<double> cell_gradient_magnitude(const ScalarField& field) {
  const LogPolarGrid& g = field.grid();
  const auto u = field.values();
  const std::size_t rows = g.n_s() - 1;
  const std::size_t cols = g.n_phi() - 1;
  std::vector<double> out(rows * cols);
  const double inv_ds = 1.0 / g.ds();
  const double inv_dphi = 1.0 / g.dphi();
  for (std::size_t i = 0; i < rows; ++i) {
    const double scale = std::sqrt(g.cell_metric(i));
    double c[4];
    for (std::size_t j = 0; j < cols; ++j) {
      load_corners(g, u, i, j, c);
      const double us = 0.5 * ((c[1] - c[0]) + (c[3] - c[2])) * inv_ds;
      const double up = 0.5 * ((c[2] - c[0]) + (c[3] - c[1])) * inv_dphi;
      out[i * cols + j] = std::hypot(us, up) * scale;
    }
  }
  return out;
}

double interpolate(const ScalarField& field, double r, double phi) {
  const LogPolarGrid& g = field.grid();
  const auto [x, y] = g.locate(r, phi);
  const auto i0 = std::min(static_cast<std::size_t>(x), g.n_s() - 2);
  const auto j0 = std::min(static_cast<std::size_t>(y), g.n_phi() - 2);
  const double tx = x - static_cast<double>(i0);
  const double ty = y - static_cast<double>(j0);
  if (tx == 0.0 && ty == 0.0) return field(i0, j0);
  return (1.0 - tx) * (1.0 - ty) * field(i0, j0) + tx * (1.0 - ty) * field(i0 + 1, j0) +
         (1.0 - tx) * ty * field(i0, j0 + 1) + tx * ty * field(i0 + 1, j0 + 1);
}

}  // namespace morrey
