// Command-line front end: one subcommand per verification suite.
//
// Exit codes: 0 all checks pass, 1 a check failed, 2 usage/config error,
// 3 numerical abort.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "f4nls/linalg.hpp"
#include "f4nls/report.hpp"

namespace {

struct Flags {
  std::optional<double> grid_L, dt, tmax;
  std::optional<int> grid_N;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> config, out, family;
  std::vector<std::string> overrides;
  bool json = false, csv = false, no_timestamp = false, quiet = false;
  std::string op = "l1";
};

f4nls::RunConfig resolve(const Flags& f, const std::string& command) {
  f4nls::RunConfig cfg;
  if (f.config) cfg = f4nls::load_config(*f.config, cfg);
  for (const auto& kv : f.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw f4nls::ConfigError("--set expects key=value, got '" + kv + "'");
    cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (f.grid_L) cfg.grid_L = *f.grid_L;
  if (f.grid_N) cfg.grid_N = *f.grid_N;
  if (f.dt) cfg.dt = *f.dt;
  if (f.tmax) (command == "evolve" ? cfg.evolve_tmax : cfg.t_max) = *f.tmax;
  if (f.seed) cfg.seed = *f.seed;
  if (f.out) cfg.out_dir = *f.out;
  if (f.family) cfg.stability_family = *f.family;
  if (f.csv) cfg.csv = true;
  cfg.validate();
  return cfg;
}

int run(const Flags& flags, const std::string& command) {
  const f4nls::RunConfig cfg = resolve(flags, command);
  f4nls::SuiteContext ctx(cfg);
  f4nls::Report rep;
  if (command == "verify_wave") f4nls::suite_verify_wave(ctx, rep);
  else if (command == "spectrum") f4nls::suite_spectrum(ctx, rep, flags.op);
  else if (command == "totalpos") f4nls::suite_totalpos(ctx, rep);
  else if (command == "weinstein") f4nls::suite_weinstein(ctx, rep);
  else if (command == "coercivity") f4nls::suite_coercivity(ctx, rep);
  else if (command == "evolve") f4nls::suite_evolve(ctx, rep);
  else if (command == "orbit_fit") f4nls::suite_orbit_fit(ctx, rep);
  else if (command == "lyapunov") f4nls::suite_lyapunov(ctx, rep);
  else if (command == "stability") f4nls::suite_stability(ctx, rep);
  else if (command == "report_all") f4nls::suite_report_all(ctx, rep);

  const nlohmann::json doc = rep.to_json(cfg, command, !flags.no_timestamp);
  std::filesystem::create_directories(cfg.out_dir);
  const std::string stem = command == "spectrum" ? "spectrum_" + flags.op : command;
  const auto path = std::filesystem::path(cfg.out_dir) / (stem + ".json");
  {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path.string());
    os << doc.dump(2) << '\n';
  }
  if (flags.json) {
    std::cout << doc.dump(2) << '\n';
  } else if (!flags.quiet) {
    for (const auto& c : rep.checks()) {
      std::cout << (c.pass ? "PASS " : "FAIL ");
      if (c.criterion > 0) std::cout << "[C" << c.criterion << "] ";
      std::cout << c.id << "  " << c.value.dump() << "  (" << c.tolerance << ")\n";
    }
    std::cout << (rep.all_pass() ? "status: pass" : "status: fail") << "  report: " << path.string() << '\n';
  }
  return rep.all_pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Verification runs for the fourth-order NLS standing wave"};
  app.set_version_flag("--version", std::string(F4NLS_VERSION));
  app.require_subcommand(1);
  app.fallthrough();

  Flags f;
  app.add_option("--grid-L", f.grid_L, "half-length L of the periodic box [-L, L)")->check(CLI::PositiveNumber);
  app.add_option("--grid-N", f.grid_N, "number of grid points (even)");
  app.add_option("--dt", f.dt, "time step")->check(CLI::PositiveNumber);
  app.add_option("--tmax", f.tmax, "final time (stability runs; the standing-wave run for 'evolve')")
      ->check(CLI::PositiveNumber);
  app.add_option("--seed", f.seed, "seed for every randomized check");
  app.add_option("--config", f.config, "flat key=value config file")->check(CLI::ExistingFile);
  app.add_option("--set", f.overrides, "override one config key (key=value), repeatable");
  app.add_option("--out", f.out, "output directory for reports and data files");
  app.add_flag("--json", f.json, "print the JSON report to stdout");
  app.add_flag("--csv", f.csv, "also write CSV / data files");
  app.add_flag("--no-timestamp", f.no_timestamp, "omit the timestamp field from the report");
  app.add_flag("--quiet", f.quiet, "no per-check output");

  const std::vector<std::pair<std::string, std::string>> commands{
      {"verify_wave", "profile, ODE residual and conserved functionals"},
      {"spectrum", "spectrum and kernel of a linearized operator"},
      {"totalpos", "kernel positivity, PF(2) and the frequency-side operator family"},
      {"weinstein", "the quantity I by pseudo-inverse and by series"},
      {"coercivity", "constrained minima, penalty calibration, Garding bound"},
      {"evolve", "standing-wave run: conservation, phase rate, order, reversibility"},
      {"orbit_fit", "orbital distance and modulation fit"},
      {"stability", "perturbed-wave sweep with the Lyapunov chain"},
      {"lyapunov", "Lyapunov functional near the orbit"},
      {"report_all", "every suite, one report"}};
  std::map<std::string, CLI::App*> subs;
  for (const auto& [name, help] : commands) subs[name] = app.add_subcommand(name, help);
  subs["spectrum"]->add_option("--op", f.op, "operator")->check(CLI::IsMember({"l1", "l2"}));
  subs["stability"]->add_option("--family", f.family, "perturbation family")
      ->check(CLI::IsMember({"even", "odd", "random-bandlimited", "mass-preserving"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  std::string command;
  for (const auto& [name, sub] : subs)
    if (sub->parsed()) command = name;

  try {
    return run(f, command);
  } catch (const f4nls::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const f4nls::NumericalError& e) {
    std::cerr << "numerical abort: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "numerical abort: " << e.what() << '\n';
    return 3;
  }
}
