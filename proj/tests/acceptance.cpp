// Acceptance runner: one PASS/FAIL line per criterion.
//
//   acceptance [--only N] [--config PATH] [--cli PATH] [--work DIR]
//
// Criteria 1-9 run the verification suites on the default grid and pass when
// every check tagged with that criterion passes.  Criterion 10 runs the CLI
// `report_all` twice with the same reduced config and compares the reports
// byte for byte after dropping the timestamp line.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include <CLI11.hpp>

#include "f4nls/report.hpp"

namespace fs = std::filesystem;

namespace {

using Suite = std::function<void(f4nls::SuiteContext&, f4nls::Report&)>;

const std::map<int, std::vector<Suite>>& suites_for() {
  static const std::map<int, std::vector<Suite>> m{
      {1, {f4nls::suite_verify_wave}},
      {2, {[](auto& c, auto& r) { f4nls::suite_spectrum(c, r, "l1"); },
           [](auto& c, auto& r) { f4nls::suite_spectrum(c, r, "l2"); }}},
      {3, {[](auto& c, auto& r) { f4nls::suite_spectrum(c, r, "l1"); },
           [](auto& c, auto& r) { f4nls::suite_spectrum(c, r, "l2"); }}},
      {4, {f4nls::suite_totalpos}},
      {5, {f4nls::suite_totalpos}},
      {6, {f4nls::suite_weinstein}},
      {7, {f4nls::suite_coercivity}},
      {8, {f4nls::suite_evolve}},
      {9, {f4nls::suite_lyapunov, f4nls::suite_stability}},
  };
  return m;
}

struct Outcome {
  bool pass = true;
  std::string detail;
};

Outcome suite_criterion(int n, f4nls::SuiteContext& ctx) {
  f4nls::Report rep;
  for (const auto& s : suites_for().at(n)) s(ctx, rep);
  Outcome out;
  int total = 0, failed = 0;
  std::string failures;
  for (const auto& c : rep.checks()) {
    if (c.criterion != n) continue;
    ++total;
    if (!c.pass) {
      ++failed;
      failures += " " + c.id + "=" + c.value.dump();
    }
  }
  out.pass = total > 0 && failed == 0;
  out.detail = std::to_string(total - failed) + "/" + std::to_string(total) + " checks";
  if (failed) out.detail += ";" + failures;
  return out;
}

std::string slurp_without_timestamp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream os;
  std::string line;
  while (std::getline(in, line))
    if (line.find("\"timestamp\"") == std::string::npos) os << line << '\n';
  return os.str();
}

Outcome determinism(const std::string& cli, const std::string& config, const fs::path& work) {
  Outcome out;
  std::vector<std::string> texts;
  std::vector<int> codes;
  for (int run = 1; run <= 2; ++run) {
    const fs::path dir = work / ("run" + std::to_string(run));
    fs::remove_all(dir);
    fs::create_directories(dir);
    const std::string cmd = "\"" + cli + "\" --config \"" + config + "\" --out \"" + dir.string() +
                            "\" --quiet report_all";
    const int status = std::system(cmd.c_str());
    codes.push_back(WIFEXITED(status) ? WEXITSTATUS(status) : -1);
    if (!fs::exists(dir / "report_all.json")) {
      out.pass = false;
      out.detail = "run " + std::to_string(run) + " wrote no report (exit " + std::to_string(codes.back()) + ")";
      return out;
    }
    texts.push_back(slurp_without_timestamp(dir / "report_all.json"));
  }
  out.pass = texts[0] == texts[1] && codes[0] == codes[1] && codes[0] <= 1;
  out.detail = std::string(texts[0] == texts[1] ? "identical" : "different") + " reports (" +
               std::to_string(texts[0].size()) + " bytes), exit codes " + std::to_string(codes[0]) + "/" +
               std::to_string(codes[1]);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria runner"};
  int only = 0;
  std::string config, cli, work = (fs::temp_directory_path() / "f4nls_acceptance").string();
  std::string determinism_config;
  app.add_option("--only", only, "run a single criterion (1-10)")->check(CLI::Range(1, 10));
  app.add_option("--config", config, "config for criteria 1-9 (defaults otherwise)");
  app.add_option("--cli", cli, "path of the f4nls executable (criterion 10)");
  app.add_option("--determinism-config", determinism_config, "config for the two report_all runs");
  app.add_option("--work", work, "scratch directory for criterion 10");
  CLI11_PARSE(app, argc, argv);

  f4nls::RunConfig cfg;
  try {
    if (!config.empty()) cfg = f4nls::load_config(config, cfg);
    cfg.out_dir = work;
    cfg.validate();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  f4nls::SuiteContext ctx(cfg);

  bool all = true;
  for (int n = 1; n <= 10; ++n) {
    if (only && n != only) continue;
    Outcome o;
    try {
      if (n == 10) {
        if (cli.empty() || determinism_config.empty()) {
          o = {false, "needs --cli and --determinism-config"};
        } else {
          o = determinism(cli, determinism_config, work);
        }
      } else {
        o = suite_criterion(n, ctx);
      }
    } catch (const std::exception& e) {
      o = {false, std::string("aborted: ") + e.what()};
    }
    all = all && o.pass;
    std::cout << "criterion " << n << ": " << (o.pass ? "PASS" : "FAIL") << "  " << o.detail << std::endl;
  }
  return all ? 0 : 1;
}
