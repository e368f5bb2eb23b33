#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "morrey/analysis.hpp"
#include "morrey/aronsson.hpp"
#include "morrey/error.hpp"
#include "morrey/field_io.hpp"
#include "morrey/solver.hpp"

namespace morreylab {

using nlohmann::json;
using morrey::format_real;

namespace {

constexpr double kPi = std::numbers::pi;

void require_p(double p) {
  if (!(p > 2.0) || !std::isfinite(p)) {
    throw ConfigError("p must be a finite number greater than 2, got " + format_real(p));
  }
}

json grid_json(const morrey::GridSpec& g) {
  return json{{"r_min", g.r_min}, {"r_max", g.r_max}, {"n_s", g.n_s}, {"n_phi", g.n_phi}};
}

json fit_json(const morrey::DecayFit& f) {
  return json{{"beta_hat", f.beta_hat},
              {"C_hat", f.C_hat},
              {"window", {f.window.lo, f.window.hi}},
              {"points", f.points},
              {"rms_residual", f.rms_residual}};
}

json barrier_json(const morrey::BarrierReport& b) {
  return json{{"beta", b.beta},       {"tau", b.tau},
              {"kappa", b.kappa},     {"aperture", b.aperture},
              {"eps", b.eps},         {"eps_min", b.eps_min},
              {"eps_admissible", b.eps_admissible},
              {"r0", b.r0},           {"c_f", b.c_f},
              {"S_r0", b.S_r0},       {"nodes_checked", b.nodes_checked},
              {"violations", b.violations}, {"max_violation", b.max_violation}};
}

std::string profile_csv(const morrey::DecayProfile& prof, const char* value_name) {
  std::ostringstream os;
  os << "r," << value_name << '\n';
  for (std::size_t k = 0; k < prof.radii.size(); ++k) {
    os << format_real(prof.radii[k]) << ',' << format_real(prof.sup_values[k]) << '\n';
  }
  return os.str();
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

struct CheckList {
  json items = json::array();
  bool ok = true;

  void add(const std::string& name, double value, double bound, bool pass) {
    items.push_back(json{{"name", name}, {"value", value}, {"bound", bound}, {"pass", pass}});
    ok = ok && pass;
  }
  void at_most(const std::string& name, double value, double bound) {
    add(name, value, bound, value <= bound);
  }
  void at_least(const std::string& name, double value, double bound) {
    add(name, value, bound, value >= bound);
  }
};

void aronsson_suite(double p, bool inject_fault, CheckList& checks) {
  const double tol = 1e-10;
  const double bp = morrey::beta_p(p);
  for (double kappa : {0.3, bp, 1.0, 2.0}) {
    morrey::AngularProfile prof = morrey::angular_profile(kappa, p, 1000);
    if (inject_fault) {
      for (double& f : prof.f) f *= 1.0 + 1e-6;
    }
    const morrey::ProfileDiagnostics d = morrey::diagnose(prof);
    const std::string tag = "kappa=" + format_real(kappa) + ": ";
    checks.at_most(tag + "energy identity", d.energy_identity_residual, tol);
    checks.at_most(tag + "g identity", d.g_identity_residual, tol);
    checks.add(tag + "g positive", d.g_min, 0.0, d.g_min > 0.0);
    checks.at_most(tag + "separation constant spread", d.separation_spread, tol);
    checks.at_most(tag + "aperture identity", d.aperture_identity_residual, tol);
    checks.add(tag + "phi decreasing", d.phi_strictly_decreasing, 1, d.phi_strictly_decreasing);
  }
  checks.at_most("kappa_of_L(1) = beta_p", std::abs(morrey::kappa_of_L(1.0, p) - bp), tol);

  const morrey::AngularProfile prof = morrey::angular_profile(bp, p, 101);
  std::vector<morrey::PolarPoint> pts;
  for (int k = 0; k < 50; ++k) {
    pts.push_back({0.6 + 0.05 * k, (-0.9 + 0.036 * k) * prof.params.half_opening()});
  }
  const double r2 = morrey::pharmonic_residual(prof, p, pts, 1e-2, 0.05);
  const double r3 = morrey::pharmonic_residual(prof, p, pts, 1e-3, 0.05);
  checks.add("p-Laplacian residual ratio h=1e-2 -> 1e-3", r2 / r3, 50.0, r2 / r3 >= 50.0 && r2 / r3 <= 200.0);
}

void gradient_suite(double p, CheckList& checks) {
  const morrey::LogPolarGrid g(morrey::GridSpec::per_octave(0.25, 4, 4, 13));
  morrey::ScalarField u(g);
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (double& v : u.values()) v = U(rng);
  u.set_pin(morrey::PinnedNode{g.unit_row(), g.axis_column(), 1.0});
  u.apply_constraints();
  const morrey::EnergyParams prm{p, 0.05};
  const morrey::ScalarField grad = morrey::energy_gradient(u, prm);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> plus(g.size());
    std::vector<double> minus(g.size());
    double dot = 0.0;
    const double h = 1e-5;
    for (std::size_t i = 0; i < g.n_s(); ++i) {
      for (std::size_t j = 0; j < g.n_phi(); ++j) {
        const std::size_t n = g.index(i, j);
        const double d = u.constrained(i, j) ? 0.0 : U(rng);
        plus[n] = h * d;
        minus[n] = -h * d;
        dot += grad.values()[n] * d;
      }
    }
    const double fd = (morrey::energy_change(u, plus, prm) - morrey::energy_change(u, minus, prm)) / (2 * h);
    worst = std::max(worst, std::abs(fd - dot) / std::max(1.0, std::abs(dot)));
  }
  checks.at_most("energy gradient vs central differences", worst, 1e-7);
}

morrey::ScalarField synthetic(const morrey::GridSpec& spec, double decay) {
  const morrey::LogPolarGrid g(spec);
  morrey::ScalarField u(g);
  for (std::size_t i = 0; i < g.n_s(); ++i) {
    for (std::size_t j = 0; j < g.n_phi(); ++j) u(i, j) = std::pow(g.r(i), -decay) * std::sin(g.phi(j));
  }
  return u;
}

void analysis_suite(double p, CheckList& checks) {
  const double bp = morrey::beta_p(p);
  const morrey::GridSpec spec = morrey::GridSpec::per_octave(1.0 / 8, 4096, 8, 33);
  const morrey::ScalarField fast = synthetic(spec, bp);
  const double big = 2.0 * morrey::admissible_barrier_eps(fast, p, 0.99 * bp, 2.0);
  const auto ok = morrey::barrier_check(fast, p, 0.95 * bp, 0.04 * bp, big);
  checks.at_most("barrier: fast synthetic decay, violations", static_cast<double>(ok.violations), 0.0);
  const morrey::ScalarField slow = synthetic(spec, 0.1);
  const double eps = morrey::admissible_barrier_eps(slow, p, 0.9 * bp, 2.0);
  const auto bad = morrey::barrier_check(slow, p, 0.85 * bp, 0.05 * bp, eps);
  checks.at_least("barrier: slow synthetic decay, violations", static_cast<double>(bad.violations), 1.0);

  const morrey::DecayFit fit = morrey::fit_exponent(morrey::decay_profile(synthetic(spec, 0.5)), {4.0, 512.0});
  checks.at_most("fit of r^-1/2", std::abs(fit.beta_hat - 0.5), 1e-12);

  auto clamp = [](double x) { return std::clamp(x, -1.0, 1.0); };
  const auto h = morrey::holder_seminorm_1d(clamp, 1.0 - 1.0 / p, -2.0, 2.0, 257);
  checks.at_most("1-D clamp seminorm", std::abs(h.seminorm - std::pow(2.0, 1.0 / p)), 1e-12);
}

void solve_suite(double p, CheckList& checks) {
  morrey::SolverConfig cfg;
  cfg.eps_schedule = {1e-2, 1e-3, 1e-4, 1e-5};
  const morrey::GridSpec spec = morrey::GridSpec::per_octave(1.0 / 16, 2048, 8, 33);
  const morrey::SolveResult res = morrey::solve_extremal(spec, p, cfg);
  checks.add("coarse solve converged", res.stages.back().final_grad_norm, cfg.grad_tol, res.converged);
  double lo = INFINITY;
  double hi = -INFINITY;
  for (double v : res.field.values()) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  checks.at_least("coarse solve min u", lo, 0.0);
  checks.at_most("coarse solve max u", hi, 1.0);
  const morrey::DecayProfile prof = morrey::decay_profile(res);
  checks.add("coarse solve arc maxima non-increasing", prof.tail_sup_attained, 1, prof.tail_sup_attained);
  const morrey::DecayFit fit = morrey::fit_exponent(prof, morrey::default_window(spec));
  checks.at_most("coarse solve |beta_hat - beta_p|", std::abs(fit.beta_hat - morrey::beta_p(p)), 0.1);
}

}  // namespace

Outputs::Outputs(std::string dir) : dir_(std::move(dir)) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) throw ConfigError("cannot create output directory " + dir_ + ": " + ec.message());
}

void Outputs::write(const std::string& name, const std::string& content) {
  const std::string path = (std::filesystem::path(dir_) / name).string();
  std::ofstream os(path, std::ios::binary);
  os << content;
  if (!os) throw std::runtime_error("failed writing " + path);
  if (std::find(files_.begin(), files_.end(), name) == files_.end()) files_.push_back(name);
}

int cmd_beta_table(const RunConfig& cfg, Outputs& out) {
  if (cfg.p_values.empty()) throw ConfigError("p_values must not be empty");
  std::ostringstream os;
  os << "p,beta_p,aperture\n";
  for (double p : cfg.p_values) {
    require_p(p);
    const double b = morrey::beta_p(p);
    os << format_real(p) << ',' << format_real(b) << ',' << format_real(morrey::aperture_L(b, p)) << '\n';
  }
  out.write("beta_table.csv", os.str());
  return kOk;
}

int cmd_aronsson(const RunConfig& cfg, Outputs& out) {
  require_p(cfg.p);
  if (cfg.kappa.has_value() == cfg.L.has_value()) {
    throw ConfigError("aronsson needs exactly one of --kappa and --L");
  }
  if (cfg.kappa && !(*cfg.kappa > 0.0)) throw ConfigError("kappa must be positive");
  if (cfg.samples < 3) throw ConfigError("samples must be at least 3");
  const double kappa = cfg.kappa ? *cfg.kappa : morrey::kappa_of_L(*cfg.L, cfg.p);
  const morrey::AngularProfile prof = morrey::angular_profile(kappa, cfg.p, cfg.samples);
  std::ostringstream os;
  os << "theta,phi,f,fprime,g\n";
  for (std::size_t k = 0; k < prof.size(); ++k) {
    os << format_real(prof.theta[k]) << ',' << format_real(prof.phi[k]) << ',' << format_real(prof.f[k])
       << ',' << format_real(prof.fprime[k]) << ',' << format_real(prof.g[k]) << '\n';
  }
  out.write("aronsson_profile.csv", os.str());
  const morrey::ProfileDiagnostics d = morrey::diagnose(prof);
  const json j{{"p", cfg.p},
               {"kappa", kappa},
               {"L", prof.params.aperture_L},
               {"a", prof.params.a},
               {"mu", prof.params.mu},
               {"opening", prof.params.opening()},
               {"samples", prof.size()},
               {"energy_identity_residual", d.energy_identity_residual},
               {"g_identity_residual", d.g_identity_residual},
               {"g_min", d.g_min},
               {"separation_constant", d.separation_constant},
               {"separation_constant_over_kappa_squared", d.separation_constant / (kappa * kappa)},
               {"separation_spread", d.separation_spread},
               {"aperture_identity_residual", d.aperture_identity_residual},
               {"phi_strictly_decreasing", d.phi_strictly_decreasing},
               {"f_positive_inside", d.f_positive_inside},
               {"symmetry_residual", d.symmetry_residual}};
  out.write("aronsson.json", dump(j));
  return kOk;
}

int cmd_solve(const RunConfig& cfg, Outputs& out) {
  require_p(cfg.p);
  const morrey::GridSpec spec = cfg.grid_spec();
  const morrey::SolverConfig scfg = cfg.solver_config();
  const morrey::SolveResult res = morrey::solve_extremal(spec, cfg.p, scfg);

  std::ostringstream field;
  morrey::write_field(field, res.field, cfg.p);
  out.write("field.txt", field.str());
  std::ostringstream csv;
  morrey::write_field_csv(csv, res.field);
  out.write("field.csv", csv.str());

  json stages = json::array();
  for (const morrey::StageReport& st : res.stages) {
    stages.push_back(json{{"eps", st.eps},
                          {"iterations", st.iterations},
                          {"line_search_failures", st.line_search_failures},
                          {"final_grad_norm", st.final_grad_norm},
                          {"final_energy", st.final_energy},
                          {"converged", st.converged},
                          {"stop_reason", st.stop_reason}});
  }
  json probes = json::object();
  for (double r : {2.0, 8.0, 32.0}) {
    if (r < spec.r_max) probes[format_real(r)] = morrey::interpolate(res.field, r, kPi / 2);
  }
  const json j{{"p", cfg.p},
               {"grid", grid_json(spec)},
               {"config",
                {{"eps_schedule", scfg.eps_schedule},
                 {"grad_tol", scfg.grad_tol},
                 {"energy_rel_tol", scfg.energy_rel_tol},
                 {"max_iters_per_stage", scfg.max_iters_per_stage}}},
               {"stages", stages},
               {"energy", res.energy},
               {"converged", res.converged},
               {"probes_phi_pi_over_2", probes}};
  out.write("field.json", dump(j));
  return res.converged ? kOk : kNumerical;
}

int cmd_analyze(const RunConfig& cfg, Outputs& out) {
  if (cfg.checkpoint.empty()) throw ConfigError("analyze needs --checkpoint");
  morrey::StoredField stored = [&] {
    try {
      return morrey::load_field(cfg.checkpoint);
    } catch (const morrey::FormatError& e) {
      throw ConfigError(std::string("corrupt checkpoint: ") + e.what());
    } catch (const std::runtime_error& e) {
      throw ConfigError(e.what());
    }
  }();
  const double p = stored.p;
  require_p(p);
  const morrey::ScalarField& u = stored.field;
  const morrey::GridSpec& spec = u.grid().spec();
  const morrey::FitWindow window{cfg.window_lo, cfg.window_hi > 0.0 ? cfg.window_hi : spec.r_max / 8.0};

  const morrey::DecayProfile prof = morrey::decay_profile(u);
  const morrey::DecayProfile grad = morrey::gradient_profile(u, 2.0);
  out.write("decay_profile.csv", profile_csv(prof, "S_r"));
  out.write("gradient_profile.csv", profile_csv(grad, "G_r"));

  const double bp = morrey::beta_p(p);
  const morrey::DecayFit fit = morrey::fit_exponent(prof, window);
  const morrey::DecayFit gfit = morrey::fit_exponent(grad, window);
  const morrey::MorreyEstimate est = morrey::estimate_morrey_constant(u, p, cfg.budget);
  const double beta = 0.9 * bp;
  const double tau = 0.05 * bp;
  const double eps = morrey::admissible_barrier_eps(u, p, beta + tau, cfg.barrier_r0);
  const morrey::BarrierReport bar = morrey::barrier_check(u, p, beta, tau, eps, cfg.barrier_r0);

  json j = fit_json(fit);
  j["p"] = p;
  j["beta_p"] = bp;
  j["beta_hat_minus_beta_p"] = fit.beta_hat - bp;
  j["comparison_note"] =
      "beta_hat is compared with beta_p under the hypothesis that the decay rate is sharp; "
      "only decay at every rate below beta_p is guaranteed";
  j["tail_sup_attained"] = prof.tail_sup_attained;
  j["gradient"] = fit_json(gfit);
  j["gradient"]["expected_exponent"] = fit.beta_hat + 1.0;
  j["gradient"]["exponent_gap"] = gfit.beta_hat - (fit.beta_hat + 1.0);
  j["morrey"] = json{{"alpha", est.alpha},
                     {"seminorm", est.seminorm},
                     {"grad_norm", est.grad_norm},
                     {"C_estimate", est.C_estimate},
                     {"argmax", {{est.x.x1, est.x.x2}, {est.y.x1, est.y.x2}}},
                     {"sample_budget", cfg.budget}};
  j["barrier"] = barrier_json(bar);
  out.write("fit.json", dump(j));
  out.write("barrier.json", dump(barrier_json(bar)));
  return kOk;
}

int cmd_verify(const RunConfig& cfg, Outputs& out, bool inject_fault) {
  require_p(cfg.p);
  if (cfg.mode != "quick" && cfg.mode != "full") throw ConfigError("mode must be quick or full");
  CheckList checks;
  aronsson_suite(cfg.p, inject_fault, checks);
  gradient_suite(cfg.p, checks);
  analysis_suite(cfg.p, checks);
  if (cfg.mode == "full") solve_suite(cfg.p, checks);
  const json j{{"p", cfg.p}, {"mode", cfg.mode}, {"checks", checks.items}, {"passed", checks.ok}};
  out.write("verify.json", dump(j));
  return checks.ok ? kOk : kVerification;
}

}  // namespace morreylab
