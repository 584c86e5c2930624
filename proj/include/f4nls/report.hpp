#pragma once

// Run configuration, machine-readable check reports, and the verification
// suites fronted by the command-line tool.

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace f4nls {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  double grid_L = 96.0;
  int grid_N = 2048;
  double dt = 1e-3;
  double t_max = 100.0;      // stability runs
  double evolve_tmax = 50.0; // standing-wave run
  int record_every = 100;
  std::uint64_t seed = 20240229;
  std::string out_dir = ".";
  bool csv = false;          // also write CSV / two-column files into out_dir
  double freq_half_width = 40.0;
  int freq_points = 1600;
  int lyapunov_samples = 100;
  double rho_fraction = 0.05;  // rho = fraction * ||phi||_H2
  std::string stability_family = "random-bandlimited";
  std::vector<double> stability_amplitudes{1e-3, 3e-3, 1e-2, 3e-2};
  double stability_dt_ref = 4e-5;  // per-run dt = min(dt, dt_ref sqrt(delta0 / 1e-3))
  bool refinement = true;    // repeat grid-sensitive checks on refined grids
  int series_terms = 16;     // j_max + 1 for the even-mode series
  std::map<std::string, double> tolerances;

  /// Named threshold, falling back to `fallback` when not overridden.
  double tol(const std::string& name, double fallback) const;
  void set(const std::string& key, const std::string& value);  // throws ConfigError
  void validate() const;                                        // throws ConfigError
  /// Canonical key=value text (sorted), the basis of the provenance hash.
  std::string canonical() const;
};

RunConfig load_config(const std::string& path, RunConfig base = {});
std::string config_hash(const RunConfig& cfg);  // FNV-1a 64, hex

struct CheckRecord {
  std::string id;
  std::string anchor;  // the claim being checked, in words
  int criterion = 0;   // acceptance criterion number, 0 when auxiliary
  nlohmann::json value;
  std::string tolerance;
  bool pass = false;
};

class Report {
 public:
  void add(CheckRecord rec);
  void add(std::string id, std::string anchor, int criterion, nlohmann::json value, std::string tolerance,
           bool pass);
  void note(const std::string& key, nlohmann::json value) { data_[key] = std::move(value); }
  bool all_pass() const;
  const std::vector<CheckRecord>& checks() const { return checks_; }
  /// Schema-1 document; the timestamp is the only field that varies
  /// between identical runs.
  nlohmann::json to_json(const RunConfig& cfg, const std::string& command, bool with_timestamp = true) const;

 private:
  std::vector<CheckRecord> checks_;
  nlohmann::json data_ = nlohmann::json::object();
};

/// Shared lazily-computed state for the suites (operators, calibration).
class SuiteContext {
 public:
  explicit SuiteContext(RunConfig cfg);
  ~SuiteContext();
  const RunConfig& config() const { return cfg_; }
  struct State;
  State& state();

 private:
  RunConfig cfg_;
  std::unique_ptr<State> state_;
};

void suite_verify_wave(SuiteContext& ctx, Report& rep);
void suite_spectrum(SuiteContext& ctx, Report& rep, const std::string& op);  // "l1" or "l2"
void suite_totalpos(SuiteContext& ctx, Report& rep);
void suite_weinstein(SuiteContext& ctx, Report& rep);
void suite_coercivity(SuiteContext& ctx, Report& rep);
void suite_evolve(SuiteContext& ctx, Report& rep);
void suite_orbit_fit(SuiteContext& ctx, Report& rep);
void suite_lyapunov(SuiteContext& ctx, Report& rep);
void suite_stability(SuiteContext& ctx, Report& rep);
void suite_report_all(SuiteContext& ctx, Report& rep);

}  // namespace f4nls
