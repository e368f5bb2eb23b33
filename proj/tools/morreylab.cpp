// morreylab: tables, cone profiles, extremal solves, analysis and self-checks.

#include <chrono>
#include <filesystem>
#include <functional>
#include <iostream>
#include <memory>

#include "CLI11.hpp"
#include "commands.hpp"
#include "config.hpp"
#include "morrey/error.hpp"
#include "morrey/parallel.hpp"

#ifndef MORREY_VERSION
#define MORREY_VERSION "0.0.0"
#endif

using namespace morreylab;

namespace {

// Options write into `flags`; only options given on the command line are
// copied over the config-file values.
struct Binder {
  RunConfig flags;
  std::vector<std::pair<CLI::Option*, std::function<void(RunConfig&)>>> setters;

  template <class T>
  CLI::Option* add(CLI::App* app, const std::string& name, T RunConfig::*member, const std::string& help) {
    CLI::Option* opt = app->add_option(name, flags.*member, help);
    setters.emplace_back(opt, [this, member](RunConfig& c) { c.*member = flags.*member; });
    return opt;
  }

  RunConfig merge(RunConfig base) const {
    for (const auto& [opt, set] : setters) {
      if (opt->count() > 0) set(base);
    }
    return base;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Morrey extremal laboratory"};
  app.set_version_flag("--version", MORREY_VERSION);
  app.require_subcommand(1);

  Binder bind;
  std::string config_path;
  bool inject_fault = false;

  auto common = [&](CLI::App* sub) {
    bind.add(sub, "--p", &RunConfig::p, "Exponent p > 2");
    bind.add(sub, "--out-dir", &RunConfig::out_dir, "Output directory");
    bind.add(sub, "--threads", &RunConfig::threads, "Worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--config", config_path, "JSON config file; flags override its values");
  };

  CLI::App* beta = app.add_subcommand("beta-table", "Critical exponent and aperture for several p");
  common(beta);
  bind.add(beta, "--p-values", &RunConfig::p_values, "Exponents to tabulate")->delimiter(',');

  CLI::App* aron = app.add_subcommand("aronsson", "Angular profile of a cone solution");
  common(aron);
  bind.add(aron, "--kappa", &RunConfig::kappa, "Decay power kappa > 0");
  bind.add(aron, "--L", &RunConfig::L, "Aperture in units of pi");
  bind.add(aron, "--samples", &RunConfig::samples, "Number of theta samples");

  CLI::App* solve = app.add_subcommand("solve", "Discrete extremal on the half-plane");
  common(solve);
  bind.add(solve, "--r-min", &RunConfig::r_min, "Inner radius");
  bind.add(solve, "--r-max", &RunConfig::r_max, "Outer radius");
  bind.add(solve, "--cells-per-octave", &RunConfig::cells_per_octave, "Radial cells per doubling");
  bind.add(solve, "--n-s", &RunConfig::n_s, "Radial nodes (overrides --cells-per-octave)");
  bind.add(solve, "--n-phi", &RunConfig::n_phi, "Angular nodes (odd)");
  bind.add(solve, "--eps-schedule", &RunConfig::eps_schedule, "Regularisation schedule")->delimiter(',');
  bind.add(solve, "--grad-tol", &RunConfig::grad_tol, "Scaled gradient tolerance");
  bind.add(solve, "--energy-rel-tol", &RunConfig::energy_rel_tol, "Relative energy stagnation tolerance");
  bind.add(solve, "--max-iters", &RunConfig::max_iters, "Newton steps per stage");

  CLI::App* analyze = app.add_subcommand("analyze", "Decay fits, Morrey estimate and barrier test");
  common(analyze);
  bind.add(analyze, "--checkpoint", &RunConfig::checkpoint, "Field written by solve");
  bind.add(analyze, "--window-lo", &RunConfig::window_lo, "Fit window start");
  bind.add(analyze, "--window-hi", &RunConfig::window_hi, "Fit window end (default r_max/8)");
  bind.add(analyze, "--budget", &RunConfig::budget, "Sample points for the Holder search");
  bind.add(analyze, "--barrier-r0", &RunConfig::barrier_r0, "Inner radius of the barrier test");

  CLI::App* verify = app.add_subcommand("verify", "Run the built-in check suites");
  common(verify);
  bind.add(verify, "--mode", &RunConfig::mode, "quick or full")->check(CLI::IsMember({"quick", "full"}));
  verify->add_flag("--inject-fault", inject_fault)->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  CLI::App* sub = app.get_subcommands().front();
  const auto start = std::chrono::steady_clock::now();
  try {
    RunConfig cfg = config_path.empty() ? RunConfig{} : load_config(config_path);
    cfg = bind.merge(cfg);
    cfg.command = sub->get_name();
    morrey::set_thread_count(cfg.threads);

    Outputs out(cfg.out_dir);
    int rc = kOk;
    if (sub == beta) rc = cmd_beta_table(cfg, out);
    if (sub == aron) rc = cmd_aronsson(cfg, out);
    if (sub == solve) rc = cmd_solve(cfg, out);
    if (sub == analyze) rc = cmd_analyze(cfg, out);
    if (sub == verify) rc = cmd_verify(cfg, out, inject_fault);

    save_config((std::filesystem::path(cfg.out_dir) / "config.json").string(), cfg);
    std::vector<std::string> files = out.files();
    files.push_back("config.json");
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const nlohmann::json manifest{{"command", cfg.command},
                                  {"version", MORREY_VERSION},
                                  {"parameters", to_json(cfg)},
                                  {"outputs", files},
                                  {"exit_code", rc},
                                  {"wall_clock_seconds", seconds}};
    out.write("manifest.json", manifest.dump(2) + "\n");
    if (rc == kNumerical) std::cerr << "morreylab: solver did not converge; partial outputs kept\n";
    if (rc == kVerification) std::cerr << "morreylab: verification failed, see verify.json\n";
    return rc;
  } catch (const ConfigError& e) {
    std::cerr << "morreylab: " << e.what() << '\n';
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "morreylab: " << e.what() << '\n';
    return kUsage;
  } catch (const morrey::UnattainableAperture& e) {
    std::cerr << "morreylab: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "morreylab: " << e.what() << '\n';
    return kNumerical;
  }
}
