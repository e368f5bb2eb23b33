#include "morrey/solver.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "morrey/aronsson.hpp"
#include "morrey/error.hpp"

namespace morrey {

namespace {

constexpr double kArmijo = 1e-4;
constexpr int kMaxHalvings = 60;
constexpr int kStallLimit = 3;

// Free nodes in row-major order.
struct Unknowns {
  std::vector<std::ptrdiff_t> of_node;  // -1 when constrained
  std::vector<std::size_t> node;

  explicit Unknowns(const ScalarField& f) {
    const LogPolarGrid& g = f.grid();
    of_node.assign(g.size(), -1);
    for (std::size_t i = 0; i < g.n_s(); ++i) {
      for (std::size_t j = 0; j < g.n_phi(); ++j) {
        if (f.constrained(i, j)) continue;
        of_node[g.index(i, j)] = static_cast<std::ptrdiff_t>(node.size());
        node.push_back(g.index(i, j));
      }
    }
  }
  std::size_t size() const { return node.size(); }
};

using SparseMatrix = Eigen::SparseMatrix<double>;

void assemble(const LogPolarGrid& g, const Unknowns& unk, const std::vector<Stencil>& hess,
              const std::vector<double>& scale, SparseMatrix& out) {
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(unk.size() * 9);
  const auto n_phi = static_cast<std::ptrdiff_t>(g.n_phi());
  for (std::size_t k = 0; k < unk.size(); ++k) {
    const auto node = static_cast<std::ptrdiff_t>(unk.node[k]);
    const Stencil& st = hess[unk.node[k]];
    for (int di = -1; di <= 1; ++di) {
      for (int dj = -1; dj <= 1; ++dj) {
        const std::ptrdiff_t other = node + di * n_phi + dj;
        if (other < 0 || other >= static_cast<std::ptrdiff_t>(g.size())) continue;
        const std::ptrdiff_t col = unk.of_node[static_cast<std::size_t>(other)];
        if (col < 0) continue;
        const double v = st[(di + 1) * 3 + (dj + 1)] * scale[k] * scale[static_cast<std::size_t>(col)];
        trip.emplace_back(static_cast<int>(k), static_cast<int>(col), v);
      }
    }
  }
  out.resize(static_cast<int>(unk.size()), static_cast<int>(unk.size()));
  out.setFromTriplets(trip.begin(), trip.end());
}

double max_scaled(const Unknowns& unk, const GradientAndDiagonal& gd) {
  double worst = 0.0;
  for (std::size_t node : unk.node) {
    const double d = gd.diagonal[node];
    const double g = gd.gradient[node];
    const double v = d > 0.0 ? std::abs(g) / d : (g == 0.0 ? 0.0 : INFINITY);
    worst = std::max(worst, v);
  }
  return worst;
}

StageReport run_stage(ScalarField& u, const EnergyParams& prm, const SolverConfig& cfg,
                      const Unknowns& unk) {
  StageReport rep;
  rep.eps = prm.eps;
  double E = energy(u, prm);
  rep.energies.push_back(E);

  Eigen::SimplicialLDLT<SparseMatrix> ldlt;
  bool pattern_ready = false;
  SparseMatrix H;
  std::vector<double> scale(unk.size());
  std::vector<double> step(u.grid().size(), 0.0);
  int stalled_steps = 0;
  double prev_grad = INFINITY;

  for (;;) {
    const GradientAndDiagonal gd = energy_gradient_and_diagonal(u, prm);
    rep.final_grad_norm = max_scaled(unk, gd);
    if (rep.final_grad_norm <= cfg.grad_tol) {
      rep.converged = true;
      rep.stop_reason = "gradient tolerance";
      break;
    }
    // Stagnation: full steps that no longer change the energy nor halve the
    // gradient, several times in a row.
    if (stalled_steps >= kStallLimit) {
      rep.stop_reason = "energy stagnation";
      break;
    }
    if (rep.iterations >= cfg.max_iters_per_stage) {
      rep.stop_reason = "iteration limit";
      break;
    }

    // Newton direction on the diagonally scaled system.
    const std::vector<Stencil> hess = energy_hessian(u, prm);
    for (std::size_t k = 0; k < unk.size(); ++k) {
      const double d = gd.diagonal[unk.node[k]];
      scale[k] = d > 0.0 ? 1.0 / std::sqrt(d) : 1.0;
    }
    assemble(u.grid(), unk, hess, scale, H);
    if (!pattern_ready) {
      ldlt.analyzePattern(H);
      pattern_ready = true;
    }
    ldlt.factorize(H);
    Eigen::VectorXd rhs(static_cast<Eigen::Index>(unk.size()));
    for (std::size_t k = 0; k < unk.size(); ++k) {
      rhs[static_cast<Eigen::Index>(k)] = -gd.gradient[unk.node[k]] * scale[k];
    }
    Eigen::VectorXd dir;
    bool newton_ok = ldlt.info() == Eigen::Success;
    if (newton_ok) {
      dir = ldlt.solve(rhs);
      newton_ok = ldlt.info() == Eigen::Success && dir.allFinite();
    }
    if (!newton_ok) {
      // Fall back to the diagonally preconditioned gradient.
      dir = rhs;
    }
    double slope = 0.0;
    std::fill(step.begin(), step.end(), 0.0);
    for (std::size_t k = 0; k < unk.size(); ++k) {
      const double dk = dir[static_cast<Eigen::Index>(k)] * scale[k];
      step[unk.node[k]] = dk;
      slope += gd.gradient[unk.node[k]] * dk;
    }
    if (!(slope < 0.0)) {
      rep.stop_reason = "no descent direction";
      break;
    }

    double alpha = 1.0;
    double dE = 0.0;
    bool accepted = false;
    std::vector<double> trial(step.size());
    for (int h = 0; h <= kMaxHalvings; ++h) {
      for (std::size_t n = 0; n < step.size(); ++n) trial[n] = alpha * step[n];
      dE = energy_change(u, trial, prm);
      if (std::isfinite(dE) && dE <= kArmijo * alpha * slope) {
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) {
      ++rep.line_search_failures;
      rep.stop_reason = "line search failure";
      break;
    }
    auto v = u.values();
    for (std::size_t n = 0; n < v.size(); ++n) v[n] += trial[n];
    // Track the energy through the cellwise changes; recomputing the total
    // would add rounding noise larger than the late Newton decrements.
    const double E_new = E + dE;
    ++rep.iterations;
    rep.energies.push_back(E_new);
    const bool flat = std::abs(dE) <= cfg.energy_rel_tol * std::abs(E_new);
    stalled_steps = flat && rep.final_grad_norm > 0.5 * prev_grad ? stalled_steps + 1 : 0;
    prev_grad = rep.final_grad_norm;
    E = E_new;
  }
  rep.final_energy = energy(u, prm);
  return rep;
}

}  // namespace

void SolverConfig::validate() const {
  if (eps_schedule.empty()) throw std::invalid_argument("eps schedule must not be empty");
  for (std::size_t k = 0; k < eps_schedule.size(); ++k) {
    if (!(eps_schedule[k] > 0.0) || !std::isfinite(eps_schedule[k])) {
      throw std::invalid_argument("eps schedule entries must be positive");
    }
    if (k > 0 && !(eps_schedule[k] < eps_schedule[k - 1])) {
      throw std::invalid_argument("eps schedule must be strictly decreasing");
    }
  }
  if (!(grad_tol > 0.0) || !(energy_rel_tol > 0.0)) {
    throw std::invalid_argument("solver tolerances must be positive");
  }
  if (max_iters_per_stage == 0) throw std::invalid_argument("max_iters_per_stage must be > 0");
  if (!std::isfinite(pin_value)) throw std::invalid_argument("pin value must be finite");
}

ScalarField initial_guess(const LogPolarGrid& grid, double p, double pin_value) {
  const double beta = beta_p(p);
  ScalarField u(grid);
  for (std::size_t i = 0; i < grid.n_s(); ++i) {
    const double radial = std::min(1.0, std::pow(grid.r(i), -beta));
    for (std::size_t j = 0; j < grid.n_phi(); ++j) {
      u(i, j) = pin_value * radial * std::sin(grid.phi(j));
    }
  }
  u.set_pin(PinnedNode{grid.unit_row(), grid.axis_column(), pin_value});
  u.apply_constraints();
  return u;
}

SolveResult solve_extremal(const GridSpec& spec, double p, const SolverConfig& config) {
  config.validate();
  const LogPolarGrid grid(spec);
  return solve_extremal(initial_guess(grid, p, config.pin_value), p, config);
}

SolveResult solve_extremal(ScalarField start, double p, const SolverConfig& config) {
  config.validate();
  validate(EnergyParams{p, 0.0});
  const LogPolarGrid& grid = start.grid();
  start.set_pin(PinnedNode{grid.unit_row(), grid.axis_column(), config.pin_value});
  start.apply_constraints();
  const Unknowns unk(start);

  SolveResult res{std::move(start), p, 0.0, {}, false, config};
  for (double eps : config.eps_schedule) {
    const EnergyParams prm{p, eps};
    res.stages.push_back(run_stage(res.field, prm, config, unk));
  }
  res.energy = res.stages.back().final_energy;
  res.converged = res.stages.back().converged;
  return res;
}

double scaled_gradient_norm(const ScalarField& field, const EnergyParams& params) {
  const Unknowns unk(field);
  return max_scaled(unk, energy_gradient_and_diagonal(field, params));
}

FullPlaneField::FullPlaneField(ScalarField half) : half_(std::move(half)) {}

double FullPlaneField::operator()(double x1, double x2) const {
  const GridSpec& spec = half_.grid().spec();
  const double r = std::hypot(x1, x2);
  if (x2 == 0.0 || !(r >= spec.r_min) || !(r <= spec.r_max)) return 0.0;
  const double v = interpolate(half_, r, std::atan2(std::abs(x2), x1));
  return x2 > 0.0 ? v : -v;
}

FullPlaneField mirror_to_fullplane(const SolveResult& result) {
  return FullPlaneField(result.field);
}

}  // namespace morrey
