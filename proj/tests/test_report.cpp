#include <doctest.h>

#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "f4nls/report.hpp"

using namespace f4nls;

TEST_SUITE("report") {

TEST_CASE("config keys, overrides and validation") {
  RunConfig c;
  c.set("grid_N", "1024");
  c.set("stability_amplitudes", "0.001, 0.01");
  c.set("tol.lyapunov_drift", "2e-7");
  c.set("refinement", "false");
  CHECK(c.grid_N == 1024);
  CHECK(c.stability_amplitudes == std::vector<double>{1e-3, 1e-2});
  CHECK(c.tol("lyapunov_drift", 1e-7) == 2e-7);
  CHECK(c.tol("missing", 0.5) == 0.5);
  CHECK_FALSE(c.refinement);
  CHECK_THROWS_AS(c.set("no_such_key", "1"), ConfigError);
  CHECK_THROWS_AS(c.set("grid_N", "many"), ConfigError);
  c.grid_N = 1023;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  RunConfig d;
  d.stability_family = "diagonal";
  CHECK_THROWS_AS(d.validate(), ConfigError);
  CHECK_NOTHROW(RunConfig{}.validate());
}

TEST_CASE("config files: comments, blank lines, errors") {
  const auto path = (std::filesystem::temp_directory_path() / "f4nls_test.cfg").string();
  {
    std::ofstream os(path);
    os << "# reduced run\n\ngrid_N = 512\n  dt=0.002   # inline\n";
  }
  const RunConfig c = load_config(path);
  CHECK(c.grid_N == 512);
  CHECK(c.dt == 0.002);
  {
    std::ofstream os(path);
    os << "grid_N 512\n";
  }
  CHECK_THROWS_AS(load_config(path), ConfigError);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(load_config(path), ConfigError);
}

TEST_CASE("property: the hash depends on the numerics only") {
  RunConfig a, b;
  CHECK(config_hash(a) == config_hash(b));
  CHECK(config_hash(a).size() == 16);
  b.out_dir = "/elsewhere";
  b.csv = true;
  CHECK(config_hash(a) == config_hash(b));
  b.seed = 7;
  CHECK(config_hash(a) != config_hash(b));
  CHECK(a.canonical().find("seed=20240229") != std::string::npos);
}

TEST_CASE("report JSON layout") {
  Report r;
  r.add("x.one", "first", 1, 0.5, "< 1", true);
  r.add("x.two", "second", 0, nlohmann::json{{"k", 2}}, "== 3", false);
  r.note("extra", 42);
  CHECK_FALSE(r.all_pass());
  const auto j = r.to_json(RunConfig{}, "demo", false);
  CHECK(j["schema"] == 1);
  CHECK(j["command"] == "demo");
  CHECK(j["status"] == "fail");
  CHECK(j["summary"]["total"] == 2);
  CHECK(j["summary"]["failed"] == 1);
  CHECK(j["checks"][0]["id"] == "x.one");
  CHECK(j["checks"][1]["criterion"] == 0);
  CHECK(j["data"]["extra"] == 42);
  CHECK(j["provenance"]["config_hash"] == config_hash(RunConfig{}));
  CHECK_FALSE(j.contains("timestamp"));
  CHECK(r.to_json(RunConfig{}, "demo", true).contains("timestamp"));
}

}
