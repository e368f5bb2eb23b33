#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "morrey/analysis.hpp"
#include "morrey/aronsson.hpp"
#include "morrey/solver.hpp"

using namespace morrey;
using std::numbers::pi;

namespace {

SolverConfig coarse_config() {
  SolverConfig cfg;
  cfg.eps_schedule = {1e-2, 1e-3, 1e-4};
  return cfg;
}

const SolveResult& coarse_solve() {
  static const SolveResult res = solve_extremal(GridSpec::per_octave(1.0 / 8, 64, 8, 33), 4.0, coarse_config());
  return res;
}

}  // namespace

TEST_SUITE("solver") {

TEST_CASE("config validation") {
  SolverConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.eps_schedule = {};
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.eps_schedule = {1e-3, 1e-2};
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.eps_schedule = {1e-2, 0.0};
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = SolverConfig{};
  cfg.grad_tol = 0.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = SolverConfig{};
  cfg.max_iters_per_stage = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  CHECK_THROWS_AS(solve_extremal(GridSpec::per_octave(0.5, 2, 4, 9), 2.0, SolverConfig{}),
                  std::invalid_argument);
}

TEST_CASE("initial guess") {
  const LogPolarGrid g(GridSpec::per_octave(0.25, 16, 4, 17));
  const ScalarField u = initial_guess(g, 4.0, 1.0);
  const double beta = beta_p(4.0);
  CHECK(u(g.unit_row(), g.axis_column()) == 1.0);
  CHECK(u(5, 4) == doctest::Approx(std::min(1.0, std::pow(g.r(5), -beta)) * std::sin(g.phi(4))));
  CHECK(u(g.n_s() - 1, 4) == 0.0);
  CHECK(u(3, 0) == 0.0);
}

TEST_CASE("zero pin value gives the zero minimiser") {
  const GridSpec spec = GridSpec::per_octave(0.25, 16, 4, 17);
  SolverConfig cfg = coarse_config();
  cfg.pin_value = 0.0;
  const SolveResult res = solve_extremal(spec, 4.0, cfg);
  CHECK(res.converged);
  for (double v : res.field.values()) CHECK(std::abs(v) < 1e-9);
  const double eps = cfg.eps_schedule.back();
  const double area = 0.5 * pi * (spec.r_max * spec.r_max - spec.r_min * spec.r_min);
  CHECK(res.energy == doctest::Approx(std::pow(eps, 4.0) / 4.0 * area).epsilon(1e-6));
}

TEST_CASE("energy is non-increasing within every stage") {
  const SolveResult& res = coarse_solve();
  REQUIRE(res.stages.size() == 3);
  for (const StageReport& st : res.stages) {
    for (std::size_t k = 1; k < st.energies.size(); ++k) {
      CHECK(st.energies[k] <= st.energies[k - 1]);
    }
    CHECK(st.line_search_failures == 0);
  }
}

TEST_CASE("coarse extremal: bounds, maximum at the pin, monotone arc maxima") {
  const SolveResult& res = coarse_solve();
  CHECK(res.converged);
  CHECK(res.stages.back().final_grad_norm <= res.config.grad_tol);
  const LogPolarGrid& g = res.field.grid();
  std::size_t at_one = 0;
  for (std::size_t i = 0; i < g.n_s(); ++i) {
    for (std::size_t j = 0; j < g.n_phi(); ++j) {
      const double v = res.field(i, j);
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
      if (v == 1.0) ++at_one;
    }
  }
  CHECK(at_one == 1);
  CHECK(res.field(g.unit_row(), g.axis_column()) == 1.0);
  const DecayProfile prof = decay_profile(res);
  CHECK(prof.sup_values.front() == 1.0);
  CHECK(prof.tail_sup_attained);
  for (std::size_t k = 1; k < prof.sup_values.size(); ++k) {
    CHECK(prof.sup_values[k] <= prof.sup_values[k - 1]);
  }
}

TEST_CASE("coarse and finer grids agree at the probes") {
  const SolveResult& coarse = coarse_solve();
  const SolveResult fine = solve_extremal(GridSpec::per_octave(1.0 / 8, 64, 16, 65), 4.0, coarse_config());
  for (double r : {2.0, 8.0}) {
    const double a = interpolate(coarse.field, r, pi / 2);
    const double b = interpolate(fine.field, r, pi / 2);
    CHECK(std::abs(a / b - 1.0) < 0.05);
  }
}

TEST_CASE("restarting from a converged field needs no iterations") {
  const SolveResult& res = coarse_solve();
  SolverConfig cfg = coarse_config();
  cfg.eps_schedule = {cfg.eps_schedule.back()};
  const SolveResult again = solve_extremal(res.field, 4.0, cfg);
  CHECK(again.converged);
  CHECK(again.stages[0].iterations <= 1);
}

TEST_CASE("solves are bit-reproducible") {
  const GridSpec spec = GridSpec::per_octave(0.25, 16, 4, 17);
  const SolveResult a = solve_extremal(spec, 3.0, coarse_config());
  const SolveResult b = solve_extremal(spec, 3.0, coarse_config());
  CHECK(a.energy == b.energy);
  for (std::size_t n = 0; n < a.field.values().size(); ++n) {
    CHECK(a.field.values()[n] == b.field.values()[n]);
  }
}

TEST_CASE("odd extension to the plane") {
  const FullPlaneField u = mirror_to_fullplane(coarse_solve());
  CHECK(u(0.0, 1.0) == 1.0);
  CHECK(u(0.0, -1.0) == -1.0);
  CHECK(u(3.0, 0.0) == 0.0);
  CHECK(u(-0.7, 0.0) == 0.0);
  CHECK(u(100.0, 100.0) == 0.0);
  CHECK(u(0.01, 0.01) == 0.0);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> R(-30.0, 30.0);
  for (int k = 0; k < 100; ++k) {
    const double x1 = R(rng);
    const double x2 = R(rng);
    CHECK(u(x1, x2) + u(x1, -x2) == 0.0);
  }
}

}  // TEST_SUITE
