#include "f4nls/report.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <sstream>

#include "f4nls/coercivity.hpp"
#include "f4nls/dynamics.hpp"
#include "f4nls/linalg.hpp"
#include "f4nls/linops.hpp"
#include "f4nls/orbit.hpp"
#include "f4nls/totalpos.hpp"
#include "f4nls/wave.hpp"

namespace f4nls {

using nlohmann::json;

// ---------------------------------------------------------------- config

namespace {

std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used != v.size() || !std::isfinite(x)) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("config: '" + key + "' expects a number, got '" + v + "'");
  }
}

long long parse_int(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const long long x = std::stoll(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("config: '" + key + "' expects an integer, got '" + v + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("config: '" + key + "' expects true/false, got '" + v + "'");
}

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

double RunConfig::tol(const std::string& name, double fallback) const {
  const auto it = tolerances.find(name);
  return it == tolerances.end() ? fallback : it->second;
}

void RunConfig::set(const std::string& raw_key, const std::string& raw_value) {
  const std::string key = trim(raw_key), v = trim(raw_value);
  if (key.rfind("tol.", 0) == 0 && key.size() > 4) {
    tolerances[key.substr(4)] = parse_double(key, v);
    return;
  }
  if (key == "grid_L") grid_L = parse_double(key, v);
  else if (key == "grid_N") grid_N = static_cast<int>(parse_int(key, v));
  else if (key == "dt") dt = parse_double(key, v);
  else if (key == "t_max") t_max = parse_double(key, v);
  else if (key == "evolve_tmax") evolve_tmax = parse_double(key, v);
  else if (key == "record_every") record_every = static_cast<int>(parse_int(key, v));
  else if (key == "seed") {
    const long long s = parse_int(key, v);
    if (s < 0) throw ConfigError("config: seed must be non-negative");
    seed = static_cast<std::uint64_t>(s);
  } else if (key == "out_dir") out_dir = v;
  else if (key == "csv") csv = parse_bool(key, v);
  else if (key == "freq_half_width") freq_half_width = parse_double(key, v);
  else if (key == "freq_points") freq_points = static_cast<int>(parse_int(key, v));
  else if (key == "lyapunov_samples") lyapunov_samples = static_cast<int>(parse_int(key, v));
  else if (key == "rho_fraction") rho_fraction = parse_double(key, v);
  else if (key == "stability_family") stability_family = v;
  else if (key == "stability_dt_ref") stability_dt_ref = parse_double(key, v);
  else if (key == "stability_amplitudes") {
    stability_amplitudes.clear();
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) stability_amplitudes.push_back(parse_double(key, trim(item)));
  } else if (key == "refinement") refinement = parse_bool(key, v);
  else if (key == "series_terms") series_terms = static_cast<int>(parse_int(key, v));
  else throw ConfigError("config: unknown key '" + key + "'");
}

void RunConfig::validate() const {
  auto need = [](bool ok, const std::string& what) {
    if (!ok) throw ConfigError("config: " + what);
  };
  need(grid_L > 0.0 && std::isfinite(grid_L), "grid_L must be positive");
  need(grid_N >= 16 && grid_N <= 16384 && grid_N % 2 == 0, "grid_N must be even in [16, 16384]");
  need(dt > 0.0, "dt must be positive");
  need(t_max >= dt, "t_max must be >= dt");
  need(evolve_tmax >= dt, "evolve_tmax must be >= dt");
  need(record_every >= 1, "record_every must be >= 1");
  need(freq_half_width > 0.0, "freq_half_width must be positive");
  need(freq_points >= 16 && freq_points <= 8192, "freq_points must be in [16, 8192]");
  need(lyapunov_samples >= 1, "lyapunov_samples must be >= 1");
  need(rho_fraction > 0.0 && rho_fraction < 0.5, "rho_fraction must be in (0, 0.5)");
  need(stability_dt_ref > 0.0, "stability_dt_ref must be positive");
  need(series_terms >= 11, "series_terms must be >= 11");
  try {
    parse_family(stability_family);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  need(!stability_amplitudes.empty(), "stability_amplitudes must not be empty");
  for (std::size_t i = 0; i < stability_amplitudes.size(); ++i)
    need(stability_amplitudes[i] > 0.0 && stability_amplitudes[i] <= 0.1 &&
             (i == 0 || stability_amplitudes[i] > stability_amplitudes[i - 1]),
         "stability_amplitudes must be ascending in (0, 0.1]");
  for (const auto& [k, v] : tolerances) need(std::isfinite(v), "tolerance '" + k + "' must be finite");
}

std::string RunConfig::canonical() const {
  std::map<std::string, std::string> kv;
  kv["grid_L"] = fmt(grid_L);
  kv["grid_N"] = std::to_string(grid_N);
  kv["dt"] = fmt(dt);
  kv["t_max"] = fmt(t_max);
  kv["evolve_tmax"] = fmt(evolve_tmax);
  kv["record_every"] = std::to_string(record_every);
  kv["seed"] = std::to_string(seed);
  kv["freq_half_width"] = fmt(freq_half_width);
  kv["freq_points"] = std::to_string(freq_points);
  kv["lyapunov_samples"] = std::to_string(lyapunov_samples);
  kv["rho_fraction"] = fmt(rho_fraction);
  kv["stability_family"] = stability_family;
  kv["stability_dt_ref"] = fmt(stability_dt_ref);
  std::string amps;
  for (double a : stability_amplitudes) amps += (amps.empty() ? "" : ",") + fmt(a);
  kv["stability_amplitudes"] = amps;
  kv["refinement"] = refinement ? "true" : "false";
  kv["series_terms"] = std::to_string(series_terms);
  for (const auto& [k, v] : tolerances) kv["tol." + k] = fmt(v);
  // out_dir and csv only choose where results go, not what they are.
  std::string out;
  for (const auto& [k, v] : kv) out += k + "=" + v + "\n";
  return out;
}

RunConfig load_config(const std::string& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config: " + path + ":" + std::to_string(lineno) + ": expected key=value");
    base.set(line.substr(0, eq), line.substr(eq + 1));
  }
  return base;
}

std::string config_hash(const RunConfig& cfg) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : cfg.canonical()) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// ---------------------------------------------------------------- report

void Report::add(CheckRecord rec) { checks_.push_back(std::move(rec)); }

void Report::add(std::string id, std::string anchor, int criterion, json value, std::string tolerance, bool pass) {
  add(CheckRecord{std::move(id), std::move(anchor), criterion, std::move(value), std::move(tolerance), pass});
}

bool Report::all_pass() const {
  return std::all_of(checks_.begin(), checks_.end(), [](const CheckRecord& c) { return c.pass; });
}

json Report::to_json(const RunConfig& cfg, const std::string& command, bool with_timestamp) const {
  json doc;
  doc["schema"] = 1;
  doc["command"] = command;
  json config;
  std::istringstream canon(cfg.canonical());
  for (std::string line; std::getline(canon, line);) {
    const auto eq = line.find('=');
    config[line.substr(0, eq)] = line.substr(eq + 1);
  }
  doc["config"] = config;
  doc["provenance"] = {{"config_hash", config_hash(cfg)}, {"version", F4NLS_VERSION}};
  json checks = json::array();
  int passed = 0;
  for (const auto& c : checks_) {
    checks.push_back({{"id", c.id},
                      {"anchor", c.anchor},
                      {"criterion", c.criterion},
                      {"value", c.value},
                      {"tolerance", c.tolerance},
                      {"pass", c.pass}});
    passed += c.pass ? 1 : 0;
  }
  doc["checks"] = checks;
  doc["summary"] = {{"total", checks_.size()}, {"passed", passed}, {"failed", checks_.size() - passed}};
  doc["status"] = all_pass() ? "pass" : "fail";
  doc["data"] = data_;
  if (with_timestamp) {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    doc["timestamp"] = os.str();
  }
  return doc;
}

// ---------------------------------------------------------------- shared state

struct SuiteContext::State {
  GridPtr grid;
  SecondVariation sv;
  FrequencyGrid freq;
  std::optional<SpectrumReport> spec_l1, spec_l2;
  std::optional<double> z_bound;
  std::optional<Calibration> calibration;
  std::optional<QuadraticCheck> quadratic;
  std::optional<SubspaceBoundReport> calibrated_bound;

  explicit State(const RunConfig& cfg)
      : grid(make_grid(cfg.grid_L, cfg.grid_N)), sv(grid), freq{cfg.freq_half_width, cfg.freq_points} {}
};

SuiteContext::SuiteContext(RunConfig cfg) : cfg_(std::move(cfg)) { cfg_.validate(); }
SuiteContext::~SuiteContext() = default;

SuiteContext::State& SuiteContext::state() {
  if (!state_) state_ = std::make_unique<State>(cfg_);
  return *state_;
}

namespace {

constexpr int kSpectrumCount = 8;

std::string short_fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}
std::string lt(double x) { return "< " + short_fmt(x); }
std::string gt(double x) { return "> " + short_fmt(x); }

const SpectrumReport& spectrum_of(SuiteContext& ctx, OperatorKind kind) {
  auto& s = ctx.state();
  auto& slot = kind == OperatorKind::L1 ? s.spec_l1 : s.spec_l2;
  if (!slot) slot = spectrum(kind == OperatorKind::L1 ? s.sv.l1 : s.sv.l2, kSpectrumCount);
  return *slot;
}

double z_bound(SuiteContext& ctx) {
  auto& s = ctx.state();
  if (!s.z_bound) s.z_bound = subspace_bound(s.sv, z_constraints(s.sv.wave), std::nullopt, "Z").lambda_min;
  return *s.z_bound;
}

const Calibration& calibration(SuiteContext& ctx) {
  auto& s = ctx.state();
  if (!s.calibration) s.calibration = calibrate_M(s.sv, z_bound(ctx));
  return *s.calibration;
}

const SubspaceBoundReport& calibrated_bound(SuiteContext& ctx) {
  auto& s = ctx.state();
  if (!s.calibrated_bound)
    s.calibrated_bound = subspace_bound(s.sv, symmetry_constraints(s.sv.wave), calibration(ctx).penalty,
                                        "symmetry complement, calibrated M");
  return *s.calibrated_bound;
}

double neighbourhood_radius(SuiteContext& ctx) {
  const auto& w = ctx.state().sv.wave;
  return ctx.config().rho_fraction * norm(w.samples, InnerProductKind::H2);
}

const QuadraticCheck& quadratic(SuiteContext& ctx) {
  auto& s = ctx.state();
  if (!s.quadratic) {
    const auto& b = calibrated_bound(ctx);
    const RealField zero(s.grid);
    // The pencil minimizers are the worst directions of the quadratic form;
    // random samples alone overestimate the constant.
    std::vector<ComplexField> extra{from_pair(b.p_minimizer, zero), from_pair(zero, b.q_minimizer)};
    s.quadratic = lyapunov_quadratic_check(s.sv.wave, calibration(ctx).penalty, neighbourhood_radius(ctx),
                                           ctx.config().lyapunov_samples, ctx.config().seed, extra);
  }
  return *s.quadratic;
}

std::filesystem::path out_path(const RunConfig& cfg, const std::string& name) {
  std::filesystem::create_directories(cfg.out_dir);
  return std::filesystem::path(cfg.out_dir) / name;
}

std::ofstream open_out(const RunConfig& cfg, const std::string& name) {
  const auto p = out_path(cfg, name);
  std::ofstream os(p);
  if (!os) throw std::runtime_error("cannot write " + p.string());
  os.precision(17);
  return os;
}

/// Kernel restricted to offsets within the frequency window [-Xi, Xi].
KernelFn window(const KernelFn& k, const FrequencyGrid& g) {
  const int half = std::min(k.half_count, static_cast<int>(std::floor(g.half_width / k.step + 1e-9)));
  KernelFn out;
  out.step = k.step;
  out.half_count = half;
  out.values.assign(k.values.begin() + (k.half_count - half), k.values.begin() + (k.half_count + half + 1));
  return out;
}

double min_value(const KernelFn& k) { return *std::min_element(k.values.begin(), k.values.end()); }

json pf2_json(const Pf2Report& r) {
  return {{"pass", r.pass},
          {"max_second_log_derivative", r.max_second_log_derivative},
          {"nodes", r.nodes_checked},
          {"quadruples", r.quadruples_checked},
          {"min_relative_determinant", r.min_determinant},
          {"first_violation", r.first_violation}};
}

struct CountSummary {
  int n_negative = 0, n_zero = 0;
  double lowest = 0.0;
};

CountSummary counts_on(double half_length, int n_points, OperatorKind kind) {
  const WaveProfile w = profile(make_grid(half_length, n_points));
  const auto rep = spectrum(build_operator(kind, w), 4);
  return {rep.n_negative, rep.n_zero, rep.eigenvalues.front()};
}

}  // namespace

// ---------------------------------------------------------------- suites

void suite_verify_wave(SuiteContext& ctx, Report& rep) {
  const auto& cfg = ctx.config();
  const auto& w = ctx.state().sv.wave;
  const double a = w.amplitude, b = w.width;

  const double res = ode_residual(w);
  rep.add("wave.ode_residual", "the explicit sech^2 profile solves the fourth-order standing-wave ODE", 1, res,
          lt(cfg.tol("ode_residual", 1e-9)), res < cfg.tol("ode_residual", 1e-9));
  const double wrong = ode_residual(w.samples, 0.17);
  rep.add("wave.ode_residual_wrong_alpha", "the residual is sensitive to the frequency (alpha = 0.17 control)", 1,
          wrong, gt(cfg.tol("ode_residual_control", 1e-3)), wrong > cfg.tol("ode_residual_control", 1e-3));

  const double peak = w(0.0);
  rep.add("wave.peak", "phi(0) equals the amplitude sqrt(3/10)", 0, peak, "|phi(0) - a| < 1e-15",
          std::abs(peak - std::sqrt(0.3)) < 1e-15);
  const double parity = parity_defect(w.samples);
  rep.add("wave.even", "the profile is even", 0, parity, lt(1e-14), parity < 1e-14);

  const auto f = functionals(w.pair(), w.frequency);
  // Closed-form sech-power integrals: int sech^4 = 4/3, sech^6 = 16/15, sech^8 = 32/35.
  const double mass_exact = 2.0 * a * a / (3.0 * b);
  const double d2_sq = a * a * b * b * b * 64.0 / 21.0;
  const double d1_sq = 16.0 * a * a * b / 15.0;
  const double quartic = a * a * a * a * 32.0 / (35.0 * b);
  const double energy_exact = 0.5 * (d2_sq + d1_sq) - 0.25 * quartic;
  const double tol_f = cfg.tol("functional", 1e-10);
  rep.add("wave.mass", "conserved mass of the wave matches the closed form 2 sqrt5 / 5", 1,
          {{"numeric", f.mass}, {"exact", mass_exact}}, "relative " + lt(tol_f),
          std::abs(f.mass - mass_exact) < tol_f * mass_exact);
  rep.add("wave.energy", "conserved energy of the wave matches the closed-form sech-power integrals", 1,
          {{"numeric", f.energy}, {"exact", energy_exact}}, "relative " + lt(tol_f),
          std::abs(f.energy - energy_exact) < tol_f * std::abs(energy_exact));
  const double grad = max_abs(gradient_G(w.pair(), w.frequency));
  rep.add("wave.critical_point", "the wave is a critical point of G = E + alpha F", 0, grad,
          lt(cfg.tol("ode_residual", 1e-9)), grad < cfg.tol("ode_residual", 1e-9));
  rep.note("wave", {{"amplitude", a}, {"width", b}, {"frequency", w.frequency}, {"q1", f.g}, {"q2", f.mass}});
}

void suite_spectrum(SuiteContext& ctx, Report& rep, const std::string& op) {
  if (op != "l1" && op != "l2") throw std::invalid_argument("spectrum: --op must be l1 or l2");
  const auto& cfg = ctx.config();
  auto& s = ctx.state();
  const bool first = op == "l1";
  const OperatorKind kind = first ? OperatorKind::L1 : OperatorKind::L2;
  const OperatorDisc& A = first ? s.sv.l1 : s.sv.l2;
  const std::string name = first ? "L1" : "L2";
  const double tol_kernel = cfg.tol("kernel_residual", 1e-9);

  const RealField& zero_mode = first ? s.sv.wave.derivative : s.sv.wave.samples;
  const double kr = max_abs(A.apply(zero_mode));
  rep.add(op + ".kernel_residual",
          first ? "L1 annihilates phi' (translation symmetry)" : "L2 annihilates phi (phase symmetry)", 2, kr,
          lt(tol_kernel), kr < tol_kernel);

  const auto& sp = spectrum_of(ctx, kind);
  // Smallest |lambda| outside the kernel: the gap that isolates the zero mode.
  double gap = std::numeric_limits<double>::infinity();
  for (double l : sp.eigenvalues)
    if (std::abs(l) > sp.tol_zero) gap = std::min(gap, std::abs(l));
  const double tol_gap = cfg.tol("kernel_gap", 1e-2);
  rep.add(op + ".kernel_dimension", name + " has a one-dimensional numerical kernel separated by a spectral gap", 2,
          {{"n_zero", sp.n_zero}, {"gap", gap}}, "n_zero == 1 and gap >= " + short_fmt(tol_gap),
          sp.n_zero == 1 && gap >= tol_gap);
  const double worst_residual = *std::max_element(sp.residuals.begin(), sp.residuals.end());
  rep.add(op + ".eigen_residuals", "dense eigenpairs are accurate", 0, worst_residual, lt(1e-8),
          worst_residual < 1e-8);

  const int expected_negative = first ? 1 : 0;
  const double tol_neg = sp.tol_zero;
  rep.add(op + ".negative_count",
          first ? "L1 has a unique negative eigenvalue, which is simple" : "L2 has no negative eigenvalue", 3,
          {{"n_negative", sp.n_negative}, {"lowest", sp.eigenvalues.front()}},
          "exactly " + std::to_string(expected_negative) + " eigenvalue(s) below -" + short_fmt(tol_neg),
          sp.n_negative == expected_negative);

  json lowest = json::array();
  for (double l : sp.eigenvalues) lowest.push_back(l);
  // Continuum eigenvectors come in nearly degenerate even/odd pairs and may
  // mix; the parity claim concerns the discrete eigenvalues below the edge.
  json parity = json::array();
  double worst_parity = 0.0;
  for (std::size_t i = 0; i < sp.eigenvectors.size(); ++i) {
    bool even = false;
    const double d = parity_defect(sp.eigenvectors[i], &even);
    if (sp.eigenvalues[i] < sp.essential_edge - 0.01) worst_parity = std::max(worst_parity, d);
    parity.push_back(even ? "even" : "odd");
  }
  rep.add(op + ".parity", "eigenfunctions of discrete eigenvalues are numerically even or odd", 0, worst_parity,
          lt(1e-8), worst_parity < 1e-8);

  if (first) {
    const auto& g = sp.eigenvectors.front();
    const double mx = *std::max_element(g.values.begin(), g.values.end());
    const double mn = *std::min_element(g.values.begin(), g.values.end());
    const double ratio = mn / mx;
    const double tol_sign = cfg.tol("one_signed", 1e-10);
    rep.add("l1.ground_state_one_signed", "the eigenfunction of the negative eigenvalue of L1 is positive", 3,
            {{"min_over_max", ratio}, {"min", mn}, {"max", mx}}, "min/max >= -" + short_fmt(tol_sign), ratio >= -tol_sign);

    // Frequency-side counterpart: the top eigenvector of S_theta* is one-signed.
    const KernelFn k1 = potential_kernel(OperatorKind::L1, s.sv.wave, s.freq);
    const double theta = -sp.eigenvalues.front();
    const auto curve = eig_curve(k1, {theta}, s.freq, 1);
    rep.add("l1.ground_state_fourier_positive",
            "the frequency-side eigenfunction at the crossing theta = -lambda_0 is one-signed", 3,
            {{"theta", theta}, {"lambda0", curve.lambda[0][0]}}, "one-signed (min >= -1e-12 max)",
            static_cast<bool>(curve.ground_one_signed[0]));
  }

  if (cfg.refinement) {
    const CountSummary fine = counts_on(cfg.grid_L, 2 * cfg.grid_N, kind);
    const CountSummary wide = counts_on(1.5 * cfg.grid_L, (3 * cfg.grid_N) / 2 + ((3 * cfg.grid_N / 2) % 2), kind);
    const bool same = fine.n_negative == sp.n_negative && fine.n_zero == sp.n_zero &&
                      wide.n_negative == sp.n_negative && wide.n_zero == sp.n_zero;
    rep.add(op + ".counts_refined", "eigenvalue counts are unchanged under N -> 2N and L -> 1.5L", 3,
            {{"N2", {{"n_negative", fine.n_negative}, {"n_zero", fine.n_zero}, {"lowest", fine.lowest}}},
             {"L15", {{"n_negative", wide.n_negative}, {"n_zero", wide.n_zero}, {"lowest", wide.lowest}}}},
            "identical counts", same);
    const double move = std::abs(fine.lowest - sp.eigenvalues.front());
    rep.add(op + ".lowest_refined", "the lowest eigenvalue is stable under N -> 2N", 0, move, lt(1e-6), move < 1e-6);
  }

  rep.note("spectrum_" + op, {{"lowest", lowest},
                              {"parity", parity},
                              {"n_negative", sp.n_negative},
                              {"n_zero", sp.n_zero},
                              {"essential_edge", sp.essential_edge}});
  if (cfg.csv) {
    auto os = open_out(cfg, "spectrum_" + op + ".csv");
    os << "index,eigenvalue,residual,parity\n";
    for (std::size_t i = 0; i < sp.eigenvalues.size(); ++i)
      os << i << ',' << sp.eigenvalues[i] << ',' << sp.residuals[i] << ',' << parity[i].get<std::string>() << '\n';
  }
}

void suite_totalpos(SuiteContext& ctx, Report& rep) {
  const auto& cfg = ctx.config();
  auto& s = ctx.state();
  const auto& w = s.sv.wave;
  const FrequencyGrid& fg = s.freq;

  // Criterion 4: positivity and PF(2).
  const KernelFn rho_k = sample_kernel(rho, fg.step(), fg.n_points / 2);
  const double rho_min = min_value(rho_k);
  const Pf2Report rho_pf2 = pf2_check(rho_k, 1000, cfg.seed);
  rep.add("totalpos.rho_positive", "the sech^2 transform rho is positive", 4, rho_min, "> 0", rho_min > 0.0);
  rep.add("totalpos.rho_log_concave", "rho is logarithmically concave, hence PF(2)", 4, pf2_json(rho_pf2),
          "(log rho)'' < 0 and 1000 minors >= 0", rho_pf2.pass);

  const KernelFn k2 = window(potential_kernel(OperatorKind::L2, w, fg), fg);
  const KernelFn k1 = window(potential_kernel(OperatorKind::L1, w, fg), fg);
  rep.add("totalpos.kernel_positive", "the transforms of phi^2 and 3 phi^2 are positive", 4,
          {{"min_phi2", min_value(k2)}, {"min_3phi2", min_value(k1)}}, "> 0",
          min_value(k2) > 0.0 && min_value(k1) > 0.0);
  const Pf2Report k2_pf2 = pf2_check(k2, 1000, cfg.seed);
  const Pf2Report k1_pf2 = pf2_check(k1, 1000, cfg.seed + 1);
  rep.add("totalpos.kernel_pf2", "the potential kernels are convolutions of log-concave functions, hence PF(2)", 4,
          {{"phi2", pf2_json(k2_pf2)}, {"3phi2", pf2_json(k1_pf2)}}, "(log K)'' < 0 and 1000 minors >= 0",
          k2_pf2.pass && k1_pf2.pass);
  const KernelFn control = sample_kernel([](double x) { return 1.0 + x * x; }, fg.step(), fg.n_points / 2);
  const Pf2Report control_pf2 = pf2_check(control, 1000, cfg.seed);
  rep.add("totalpos.control_detected", "the PF(2) check rejects the log-convex control 1 + xi^2", 0,
          control_pf2.first_violation, "fails", !control_pf2.pass);

  double kernel_err = 0.0;
  for (int i = -k2.half_count; i <= k2.half_count; ++i) {
    const double exact = squared_profile_transform_exact(w, k2.offset(i));
    if (exact > 1e-200) kernel_err = std::max(kernel_err, std::abs(k2.at_offset(i) - exact) / exact);
    if (std::abs(k2.offset(i)) > 10.0) break;
  }
  rep.add("totalpos.kernel_exact", "the discrete self-convolution matches the closed-form transform of phi^2", 0,
          kernel_err, "relative " + lt(1e-8) + " for |xi| <= 10", kernel_err < 1e-8);

  // Criterion 5: S_theta correspondence.
  const KernelFn full2 = potential_kernel(OperatorKind::L2, w, fg);
  const KernelFn full1 = potential_kernel(OperatorKind::L1, w, fg);
  const SThetaOperator s2 = build_stheta(full2, 0.0, fg, w.frequency);
  const SThetaSpectrum top2 = stheta_spectrum(s2, 3);
  const double l0 = top2.values[0];
  const double tol_l0 = cfg.tol("stheta_lambda0", 1e-4);
  rep.add("totalpos.l2_lambda0", "for the L2 family lambda_0(0) = 1", 5, l0, "|lambda_0 - 1| " + lt(tol_l0),
          std::abs(l0 - 1.0) < tol_l0);
  // Symmetric-form eigenvector y = sqrt(w) g; g should be proportional to phi^.
  double dot = 0.0, ng = 0.0, np = 0.0;
  for (int i = 0; i < fg.n_points; ++i) {
    const double g = top2.vectors[0][i] / std::sqrt(s2.weight[static_cast<std::size_t>(i)]);
    const double p = profile_transform(w, fg.node(i));
    dot += g * p;
    ng += g * g;
    np += p * p;
  }
  const double cosine = std::abs(dot) / std::sqrt(ng * np);
  const double tol_cos = cfg.tol("stheta_cosine", 1e-6);
  rep.add("totalpos.l2_eigenvector", "the lambda_0(0) eigenfunction of the L2 family is proportional to phi^", 5,
          cosine, "cosine " + gt(1.0 - tol_cos), cosine > 1.0 - tol_cos);

  const auto& sp1 = spectrum_of(ctx, OperatorKind::L1);
  const double kappa = -sp1.eigenvalues.front();
  const auto theta_star = crossing_theta(full1, fg, 1e-10, w.frequency);
  const double rel = theta_star ? std::abs(*theta_star - kappa) / kappa : std::numeric_limits<double>::infinity();
  const double tol_cross = cfg.tol("stheta_crossing", 1e-3);
  rep.add("totalpos.l1_crossing", "lambda_0(theta*) = 1 exactly at theta* = |negative eigenvalue of L1|", 5,
          {{"theta_star", theta_star ? json(*theta_star) : json(nullptr)}, {"negative_eigenvalue", -kappa},
           {"relative_difference", rel}},
          "relative " + lt(tol_cross), rel < tol_cross);

  std::vector<double> thetas;
  for (int i = 0; i <= 20; ++i) thetas.push_back(0.05 * i);
  const EigCurve c2 = eig_curve(full2, thetas, fg, 2, w.frequency);
  const EigCurve c1 = eig_curve(full1, thetas, fg, 2, w.frequency);
  auto decreasing = [](const EigCurve& c) {
    for (std::size_t t = 1; t < c.theta.size(); ++t)
      if (!(c.lambda[0][t] < c.lambda[0][t - 1])) return false;
    return true;
  };
  auto dominant = [](const EigCurve& c) {
    for (std::size_t t = 0; t < c.theta.size(); ++t)
      if (!(c.lambda[0][t] > std::abs(c.lambda[1][t]))) return false;
    return true;
  };
  json curve2 = json::array(), curve1 = json::array();
  for (std::size_t t = 0; t < thetas.size(); ++t) {
    curve2.push_back({thetas[t], c2.lambda[0][t]});
    curve1.push_back({thetas[t], c1.lambda[0][t]});
  }
  rep.add("totalpos.lambda0_decreasing", "lambda_0(theta) is strictly decreasing on theta = 0, 0.05, ..., 1", 5,
          {{"l2_family", curve2}, {"l1_family", curve1}}, "strict decrease", decreasing(c2) && decreasing(c1));
  rep.add("totalpos.lambda0_simple", "lambda_0(theta) > |lambda_1(theta)| on the sweep", 0,
          {{"l2_gap_at_0", c2.lambda[0][0] - std::abs(c2.lambda[1][0])},
           {"l1_gap_at_0", c1.lambda[0][0] - std::abs(c1.lambda[1][0])}},
          "strict", dominant(c2) && dominant(c1));
  const double far = stheta_spectrum(build_stheta(full2, 10.0, fg, w.frequency), 1, false).values[0];
  rep.add("totalpos.lambda0_decay", "lambda_0(theta) tends to zero: lambda_0(10) < lambda_0(0) / 2", 0, far,
          "< " + short_fmt(0.5 * l0), far < 0.5 * l0);
  const double l1_top = stheta_spectrum(build_stheta(full1, 0.0, fg, w.frequency), 1, false).values[0];
  rep.add("totalpos.l1_lambda0_above_one", "for the L1 family lambda_0(0) > 1", 0, l1_top, "> 1", l1_top > 1.0);

  rep.note("stheta", {{"freq_half_width", fg.half_width},
                      {"freq_points", fg.n_points},
                      {"l2_top", {top2.values[0], top2.values[1], top2.values[2]}},
                      {"l1_lambda0", l1_top},
                      {"theta_star", theta_star ? json(*theta_star) : json(nullptr)}});
  if (cfg.csv) {
    auto os = open_out(cfg, "eig_curve.csv");
    os << "theta,l2_lambda0,l2_lambda1,l1_lambda0,l1_lambda1\n";
    for (std::size_t t = 0; t < thetas.size(); ++t)
      os << thetas[t] << ',' << c2.lambda[0][t] << ',' << c2.lambda[1][t] << ',' << c1.lambda[0][t] << ','
         << c1.lambda[1][t] << '\n';
  }
}

void suite_weinstein(SuiteContext& ctx, Report& rep) {
  const auto& cfg = ctx.config();
  auto& s = ctx.state();
  const auto& w = s.sv.wave;
  const WeinsteinReport direct = weinstein_direct(s.sv.l1, w);
  rep.add("weinstein.negative", "I = (chi, phi) with L1 chi = phi is negative", 6, direct.value, "< 0",
          direct.value < 0.0);
  rep.add("weinstein.solve_residual", "chi solves L1 chi = phi", 0, direct.solve_residual, lt(1e-6),
          direct.solve_residual < 1e-6);
  rep.add("weinstein.kernel_free", "chi has no component along the kernel direction phi'", 0,
          std::abs(direct.kernel_overlap), lt(1e-10), std::abs(direct.kernel_overlap) < 1e-10);

  std::optional<double> refined;
  if (cfg.refinement) {
    const WaveProfile fine = profile(make_grid(cfg.grid_L, 2 * cfg.grid_N));
    refined = weinstein_direct(build_operator(OperatorKind::L1, fine), fine).value;
    const double rel = std::abs(*refined - direct.value) / std::abs(direct.value);
    const double tol = cfg.tol("weinstein_refinement", 1e-4);
    rep.add("weinstein.refined", "I is stable under N -> 2N", 6, {{"I_N", direct.value}, {"I_2N", *refined},
            {"relative_change", rel}}, "relative " + lt(tol), rel < tol);
  }

  const KernelFn k1 = potential_kernel(OperatorKind::L1, w, s.freq);
  const int j_max = cfg.series_terms - 1;
  const auto lam = even_eigenvalues(k1, s.freq, j_max + 1, w.frequency);
  const WeinsteinSeries series = weinstein_series(lam, j_max, w.width);
  const double rel = std::abs(series.estimate - direct.value) / std::abs(direct.value);
  const double tol = cfg.tol("weinstein_series", 0.1);
  rep.add("weinstein.series", "the even-mode series has the sign of I and agrees with the direct value", 6,
          {{"series", series.estimate}, {"direct", direct.value}, {"relative_difference", rel},
           {"tail_bound", series.tail_bound}, {"terms", series.terms}},
          "same sign and relative " + lt(tol), series.estimate < 0.0 && rel < tol);
  const double a_expected = std::pow(8.0 / std::numbers::pi, 2);
  rep.add("weinstein.series_prefactor", "series prefactor (2^{n+r-1} Gamma(r) / (pi Gamma(n)))^2 = (8/pi)^2", 0,
          series.prefactor, "|a - (8/pi)^2| < 1e-12", std::abs(series.prefactor - a_expected) < 1e-12);

  json even = json::array();
  for (double l : lam) even.push_back(l);
  rep.note("weinstein", {{"I_direct", direct.value},
                         {"I_refined", refined ? json(*refined) : json(nullptr)},
                         {"I_series", series.estimate},
                         {"even_eigenvalues", even}});
}

void suite_coercivity(SuiteContext& ctx, Report& rep) {
  const auto& cfg = ctx.config();
  auto& s = ctx.state();
  const auto& w = s.sv.wave;
  const auto& l1 = s.sv.l1;
  const auto& l2 = s.sv.l2;

  const double gamma = constrained_min(l1, {w.samples}).value;
  const double delta1 = constrained_min(l1, {w.samples, w.derivative}).value;
  const double delta2 = constrained_min(l2, {w.samples}).value;
  const double tol_gamma = cfg.tol("gamma", 5e-6);
  rep.add("coercivity.gamma", "the infimum of (L1 v, v) over v orthogonal to phi is zero", 7, gamma,
          "|gamma| " + lt(tol_gamma), std::abs(gamma) < tol_gamma);
  rep.add("coercivity.delta1", "L1 is positive on {phi, phi'}-orthogonal functions", 7, delta1, "> 0", delta1 > 0.0);
  rep.add("coercivity.delta2", "L2 is positive on phi-orthogonal functions", 7, delta2, "> 0", delta2 > 0.0);
  rep.add("coercivity.gap", "delta1 exceeds |gamma| by an order of magnitude", 0,
          {{"delta1", delta1}, {"gamma", gamma}}, "delta1 > 10 |gamma|", delta1 > 10.0 * std::abs(gamma));

  const auto ortho = subspace_bound(s.sv, orthogonality_constraints(w), std::nullopt, "orthogonality");
  rep.add("coercivity.orthogonality_bound",
          "G''(Phi) is coercive in H2 on Q _|_ phi, P _|_ phi, P _|_ phi'", 0,
          {{"lambda_min", ortho.lambda_min}, {"p_block", ortho.p_block}, {"q_block", ortho.q_block}}, "> 0",
          ortho.lambda_min > 0.0);
  const double zb = z_bound(ctx);
  rep.add("coercivity.z_bound", "G''(Phi) is coercive in H2 on the subspace Z", 7, zb, "> 0", zb > 0.0);

  const auto bare = subspace_bound(s.sv, symmetry_constraints(w), 0.0, "symmetry complement, M = 0");
  rep.add("coercivity.unpenalized", "without the mass penalty the symmetry complement is not coercive", 0,
          bare.lambda_min, "<= 0", bare.lambda_min <= 0.0);

  const Calibration& cal = calibration(ctx);
  const auto& at_m = calibrated_bound(ctx);
  rep.add("coercivity.penalty", "a finite mass penalty M restores coercivity at level delta / 2", 7,
          {{"M", cal.penalty}, {"delta", zb}, {"lambda_min", at_m.lambda_min}, {"secular", cal.lambda_min}},
          "M finite > 0 and lambda_min >= delta / 2",
          std::isfinite(cal.penalty) && cal.penalty > 0.0 && at_m.lambda_min >= 0.5 * zb * (1.0 - 1e-12));
  const auto doubled = subspace_bound(s.sv, symmetry_constraints(w), 2.0 * cal.penalty);
  rep.add("coercivity.penalty_monotone", "lambda_min is nondecreasing in M", 0,
          {{"at_M", at_m.lambda_min}, {"at_2M", doubled.lambda_min}}, "lambda(2M) >= lambda(M)",
          doubled.lambda_min >= at_m.lambda_min - 1e-12);
  const double sampled = penalty_sample_min(s.sv, cal.penalty, 100, cfg.seed);
  rep.add("coercivity.penalty_samples", "100 random constrained vectors respect the delta / 2 bound", 0, sampled,
          ">= " + short_fmt(0.5 * zb), sampled >= 0.5 * zb * (1.0 - 1e-12));

  const GardingCertificate gc = garding_certify(l1, 0.5);
  const double bound = 0.5 - w.frequency + 3.0 * w.amplitude * w.amplitude;
  rep.add("coercivity.garding", "Garding inequality for L1 with epsilon = 1/2", 7,
          {{"C", gc.constant}, {"min_eig", gc.min_eig}, {"valid", gc.valid}, {"analytic_bound", bound}},
          "valid and C <= " + short_fmt(bound), gc.valid && gc.constant <= bound + 1e-12);

  if (cfg.refinement) {
    // delta values are discrete quantities; report how much they move.
    const SecondVariation fine(make_grid(cfg.grid_L, 2 * cfg.grid_N));
    const double d1f = constrained_min(fine.l1, {fine.wave.samples, fine.wave.derivative}).value;
    const double d2f = constrained_min(fine.l2, {fine.wave.samples}).value;
    const double move = std::max(std::abs(d1f - delta1), std::abs(d2f - delta2));
    rep.add("coercivity.refined", "delta1 and delta2 are stable under N -> 2N", 0, move, lt(1e-5), move < 1e-5);
  }

  rep.note("coercivity", {{"gamma", gamma},
                          {"delta1", delta1},
                          {"delta2", delta2},
                          {"orthogonality_bound", ortho.lambda_min},
                          {"z_bound", zb},
                          {"unpenalized", bare.lambda_min},
                          {"M", cal.penalty},
                          {"lambda_at_M", at_m.lambda_min},
                          {"garding_C", gc.constant}});
}

void suite_evolve(SuiteContext& ctx, Report& rep) {
  const auto& cfg = ctx.config();
  auto& s = ctx.state();
  const auto& w = s.sv.wave;
  const ComplexField u0 = w.pair();
  const OrbitFitter fitter(w);

  IntegratorConfig ic{cfg.dt, cfg.evolve_tmax, cfg.record_every};
  auto observer = [&](double, const ComplexField& u, TrajectoryDiagnostics& diag) {
    const OrbitFit f = fitter.fit(u);
    diag.distance.push_back(f.distance);
    diag.theta.push_back(f.theta);
    diag.shift.push_back(f.shift);
  };
  const auto diag = evolve(u0, ic, observer);
  const double f_drift = diag.max_relative_mass_drift();
  const double e_drift = diag.max_relative_energy_drift();
  const double tol_f = cfg.tol("mass_drift", 1e-10), tol_e = cfg.tol("energy_drift", 1e-8);
  rep.add("evolve.mass_drift", "the flow conserves the mass", 8, f_drift, "relative " + lt(tol_f), f_drift < tol_f);
  rep.add("evolve.energy_drift", "the flow conserves the energy", 8, e_drift, "relative " + lt(tol_e),
          e_drift < tol_e);
  double rate = std::numeric_limits<double>::quiet_NaN();
  try {
    rate = phase_rate(diag.times, diag.theta);
  } catch (const NumericalError&) {
  }
  const double tol_rate = cfg.tol("phase_rate", 1e-5);
  rep.add("evolve.phase_rate", "the standing wave rotates at the frequency alpha = 4/25", 8, rate,
          "|rate - 0.16| " + lt(tol_rate), std::abs(rate - w.frequency) < tol_rate);
  double max_shift = 0.0;
  for (double r : diag.shift) max_shift = std::max(max_shift, std::abs(r));
  rep.add("evolve.no_drift", "the standing wave does not translate", 0, max_shift, lt(1e-6), max_shift < 1e-6);

  // Error against the exact standing wave at t = 1 for dt and dt / 2.
  auto error_at_one = [&](double dt) {
    const auto d = evolve(u0, IntegratorConfig{dt, 1.0, std::max(1, static_cast<int>(std::lround(1.0 / dt)))});
    const ComplexField exact = u0 * std::polar(1.0, w.frequency * 1.0);
    return max_abs(d.terminal - exact);
  };
  const double e1 = error_at_one(cfg.dt), e2 = error_at_one(0.5 * cfg.dt);
  const double ratio = e1 / e2;
  rep.add("evolve.order", "Strang splitting is second order: error(dt) / error(dt/2) close to 4", 8,
          {{"error_dt", e1}, {"error_half_dt", e2}, {"ratio", ratio}}, "ratio in [3.6, 4.4]",
          ratio >= 3.6 && ratio <= 4.4);
  rep.add("evolve.standing_wave_error", "after t = 1 the solution is e^{i alpha t} phi", 0, e1, lt(1e-6), e1 < 1e-6);

  // Forward then backward from a perturbed datum.
  const ComplexField v0 = perturbed_wave(w, PerturbationFamily::RandomBandlimited, 1e-2, cfg.seed);
  IntegratorConfig fwd{cfg.dt, 1.0, 1000000};
  const ComplexField forward = evolve(v0, fwd).terminal;
  fwd.reverse = true;
  const ComplexField back = evolve(forward, fwd).terminal;
  const double rev = max_abs(back - v0);
  const double tol_rev = cfg.tol("reversibility", 1e-8);
  rep.add("evolve.reversibility", "forward-backward integration returns the initial datum", 8, rev, lt(tol_rev),
          rev < tol_rev);

  rep.note("evolve", {{"t_max", cfg.evolve_tmax}, {"dt", cfg.dt}, {"steps", diag.steps}, {"phase_rate", rate}});
  if (cfg.csv) {
    auto os = open_out(cfg, "evolve_trajectory.csv");
    write_trajectory_csv(os, diag);
    write_field(out_path(cfg, "evolve_terminal.f4f").string(), diag.terminal);
  }
}

void suite_orbit_fit(SuiteContext& ctx, Report& rep) {
  const auto& cfg = ctx.config();
  auto& s = ctx.state();
  const auto& w = s.sv.wave;
  const OrbitFitter fitter(w);

  const OrbitFit self = fitter.fit(w.pair());
  rep.add("orbit.self", "the wave is at distance zero from its own orbit", 0,
          {{"distance", self.distance}, {"theta", self.theta}, {"shift", self.shift}}, "distance < 1e-10",
          self.distance < 1e-10 && std::abs(self.theta) < 1e-10 && std::abs(self.shift) < 1e-10);

  const OrbitFit moved = fitter.fit(fitter.orbit_point(0.7, 3.3));
  rep.add("orbit.recover", "an orbit point is recognized and its parameters recovered", 0,
          {{"distance", moved.distance}, {"theta", moved.theta}, {"shift", moved.shift}},
          "distance < 1e-10, (0.7, 3.3) within 1e-8",
          moved.distance < 1e-10 && std::abs(moved.theta - 0.7) < 1e-8 && std::abs(moved.shift - 3.3) < 1e-8);

  const RealField bump = sample_with(s.grid, [](double x) { return std::exp(-x * x / 4.0); });
  const ComplexField v = w.pair() + to_complex(bump) * cplx(0.01);
  const OrbitFit pf = fitter.fit(v);
  const double bound = 0.01 * norm(bump, InnerProductKind::H2);
  const double orth = std::max(std::abs(pf.orth_rotation), std::abs(pf.orth_translation));
  rep.add("orbit.bump", "the fit of a perturbed wave is no farther than the perturbation and is orthogonal", 0,
          {{"distance", pf.distance}, {"bound", bound}, {"orth", orth}}, "distance <= bound, orth < 1e-8",
          pf.distance <= bound * (1.0 + 1e-12) && orth < 1e-8);

  const ComplexField moved_v = rotate(translate(v, -2.1), 1.3);
  const double inv = std::abs(fitter.distance(moved_v) - pf.distance);
  rep.add("orbit.invariance", "the orbital distance is invariant under the symmetries", 0, inv, lt(1e-9),
          inv < 1e-9);

  double worst = std::numeric_limits<double>::infinity();
  const double phi_h2 = inner(w.samples, w.samples, InnerProductKind::H2);
  for (int i = -20; i <= 20; ++i) {
    const double r = 0.5 * i;
    for (double th : {0.5 * std::numbers::pi, -0.5 * std::numbers::pi}) {
      const ComplexField diff = w.pair() - fitter.orbit_point(th, r);
      worst = std::min(worst, inner(diff, diff, InnerProductKind::H2) - phi_h2);
    }
  }
  rep.add("orbit.separation", "quarter-turn rotations stay at squared H2 distance >= ||phi||^2", 0, worst,
          ">= -1e-12", worst >= -1e-12);
  rep.note("orbit", {{"orbit_radius", 0.5 * phi_h2}, {"seed", cfg.seed}});
}

void suite_lyapunov(SuiteContext& ctx, Report& rep) {
  const auto& cfg = ctx.config();
  auto& s = ctx.state();
  const auto& w = s.sv.wave;
  const Calibration& cal = calibration(ctx);
  const LyapunovFunctional lyap(w, cal.penalty);
  const OrbitFitter fitter(w);

  const double at_wave = std::abs(lyap(w.pair()).value);
  const double at_orbit = std::abs(lyap(fitter.orbit_point(1.1, -4.2)).value);
  rep.add("lyapunov.zero_on_orbit", "V vanishes on the orbit", 0, {{"wave", at_wave}, {"orbit_point", at_orbit}},
          lt(1e-13), at_wave < 1e-13 && at_orbit < 1e-13);
  // Central differences of V at Phi along the grid basis of each component.
  const double h = 1e-6;
  double grad = 0.0;
  ComplexField probe = w.pair();
  const int n = s.grid->size();
  for (int j = 0; j < n; j += std::max(1, n / 64)) {
    for (const cplx dir : {cplx(1.0, 0.0), cplx(0.0, 1.0)}) {
      const cplx keep = probe[j];
      probe[j] = keep + dir * h;
      const double plus = lyap(probe).value;
      probe[j] = keep - dir * h;
      const double minus = lyap(probe).value;
      probe[j] = keep;
      grad = std::max(grad, std::abs(plus - minus) / (2.0 * h * s.grid->spacing()));
    }
  }
  rep.add("lyapunov.critical", "V'(Phi) = 0 (central differences)", 0, grad, lt(1e-7), grad < 1e-7);

  const QuadraticCheck& q = quadratic(ctx);
  const double delta = z_bound(ctx);
  rep.add("lyapunov.quadratic", "V dominates c d^2 near the orbit with an empirically certified c > 0", 9,
          {{"c", q.c}, {"rho", q.rho}, {"orbit_radius", q.orbit_radius}, {"samples", q.samples},
           {"excluded", q.excluded}, {"violations", q.violations}, {"first_violation", q.first_violation}},
          "c > 0 and no V <= 0 sample", q.c > 0.0 && q.violations == 0);
  rep.add("lyapunov.symmetry_pairings", "<V'(v), J v> = <V'(v), v_x> = 0", 0, q.max_symmetry_pairing, lt(1e-8),
          q.max_symmetry_pairing < 1e-8);
  rep.add("lyapunov.c_vs_delta", "the empirical c is within a factor 4 of delta / 4", 0,
          {{"c", q.c}, {"delta_over_4", 0.25 * delta}}, "delta/16 <= c <= delta",
          q.c >= delta / 16.0 && q.c <= delta);
  rep.add("lyapunov.rho_small", "the test neighbourhood is inside the fitting radius R / 2", 0,
          {{"rho", q.rho}, {"R", q.orbit_radius}}, "rho < R / 2", q.rho < 0.5 * q.orbit_radius);
  rep.note("lyapunov", {{"M", cal.penalty}, {"c", q.c}, {"delta", delta}, {"seed", cfg.seed}});
}

void suite_stability(SuiteContext& ctx, Report& rep) {
  const auto& cfg = ctx.config();
  auto& s = ctx.state();
  const auto& w = s.sv.wave;
  const PerturbationFamily family = parse_family(cfg.stability_family);
  const QuadraticCheck& q = quadratic(ctx);

  StabilityConfig sc;
  sc.integrator = IntegratorConfig{cfg.dt, cfg.t_max, cfg.record_every};
  sc.penalty = calibration(ctx).penalty;
  sc.c = q.c;
  sc.seed = cfg.seed;
  sc.dt_ref = cfg.stability_dt_ref;
  const StabilitySweep sweep = stability_experiment(w, family, cfg.stability_amplitudes, sc);

  json runs = json::array();
  bool bounded = true, chain = true, drift_ok = true;
  double worst_drift = 0.0, worst_chain = 0.0;
  const double tol_v = cfg.tol("lyapunov_drift", 1e-7);
  for (const auto& r : sweep.runs) {
    bounded = bounded && std::isfinite(r.sup_distance);
    chain = chain && r.c_bound_ok;
    drift_ok = drift_ok && r.v_drift < tol_v;
    worst_drift = std::max(worst_drift, r.v_drift);
    worst_chain = std::max(worst_chain, r.worst_chain);
    runs.push_back({{"delta0", r.delta},
                    {"dt", r.dt},
                    {"sup_d", r.sup_distance},
                    {"V0", r.v0},
                    {"V_drift", r.v_drift},
                    {"energy_drift", r.energy_drift},
                    {"mass_drift", r.mass_drift},
                    {"worst_chain", r.worst_chain},
                    {"c_bound_ok", r.c_bound_ok}});
  }
  const std::string fam = sweep.family;
  rep.add("stability.bounded", "perturbed waves stay at finite distance from the orbit without blow-up", 9,
          runs, "sup d finite for every run", bounded);
  rep.add("stability.lyapunov_chain", "c d(U(t))^2 <= V(U0) at every recorded time", 9,
          {{"c", q.c}, {"worst_ratio", worst_chain}}, "ratio <= 1", chain);
  rep.add("stability.lyapunov_conserved", "V(U(t)) = V(U0) along the flow", 9, worst_drift, "relative " + lt(tol_v),
          drift_ok);
  const double tol_rank = cfg.tol("spearman", 0.9);
  rep.add("stability.trend", "sup d decreases with the initial amplitude", 9, sweep.spearman, gt(tol_rank),
          sweep.runs.size() >= 2 && sweep.spearman > tol_rank);
  for (const auto& r : sweep.runs)
    if (std::abs(r.delta - 1e-2) < 1e-15)
      rep.add("stability.delta_1e-2", "for delta0 = 1e-2 the solution stays within distance 0.2", 0, r.sup_distance,
              lt(0.2), r.sup_distance < 0.2);
  rep.note("stability", {{"family", fam}, {"runs", runs}, {"spearman", sweep.spearman}});

  if (cfg.csv) {
    auto os = open_out(cfg, "stability_" + fam + ".csv");
    os << "family,delta0,sup_d,V0,c_bound_ok\n";
    for (const auto& r : sweep.runs)
      os << fam << ',' << r.delta << ',' << r.sup_distance << ',' << r.v0 << ',' << (r.c_bound_ok ? 1 : 0) << '\n';
    for (std::size_t i = 0; i < sweep.runs.size(); ++i) {
      auto dat = open_out(cfg, "stability_" + fam + "_run" + std::to_string(i) + ".dat");
      for (std::size_t k = 0; k < sweep.runs[i].times.size(); ++k)
        dat << sweep.runs[i].times[k] << ' ' << sweep.runs[i].distances[k] << '\n';
    }
  }
}

void suite_report_all(SuiteContext& ctx, Report& rep) {
  suite_verify_wave(ctx, rep);
  suite_spectrum(ctx, rep, "l1");
  suite_spectrum(ctx, rep, "l2");
  suite_totalpos(ctx, rep);
  suite_weinstein(ctx, rep);
  suite_coercivity(ctx, rep);
  suite_evolve(ctx, rep);
  suite_orbit_fit(ctx, rep);
  suite_lyapunov(ctx, rep);
  suite_stability(ctx, rep);
}

}  // namespace f4nls
