#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "config.hpp"
#include "errors.hpp"
#include "experiments.hpp"

using namespace riglid;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("riglid_cfg_" + name);
  fs::remove_all(d);
  return d;
}

}  // namespace

TEST_CASE("experiment defaults") {
  CHECK(experiment_names().size() == 14);
  for (const auto& e : experiment_names()) {
    const RunConfig c = defaults_for(e);
    CHECK(c.experiment == e);
    CHECK_NOTHROW(validate_config(c));
    CHECK(criterion_of(e) >= 1);
    CHECK(criterion_of(e) <= 14);
    CHECK(!assertion_id_of(e).empty());
  }
  CHECK(defaults_for("linear-limit").epsilon_list == Vec{0.1, 0.01, 0.001});
  CHECK(defaults_for("propagator").t_list == Vec{0.1, 1, 10});
  CHECK_THROWS_AS(defaults_for("nope"), ConfigurationError);
}

TEST_CASE("parsing and validation") {
  const RunConfig c = parse_config_text("# comment\nexperiment = dn-fidelity\nparams.mu = 0.25\ngrid.n = 64\n");
  CHECK(c.experiment == "dn-fidelity");
  CHECK(c.mu == 0.25);
  CHECK(c.n == 64);
  CHECK(c.n_z == defaults_for("dn-fidelity").n_z);

  // experiment line comes last but its defaults still sit underneath
  const RunConfig d = parse_config_text("grid.n = 32\nexperiment = extension\n");
  CHECK(d.n == 32);
  CHECK(d.n_z == 64);

  CHECK_THROWS_AS(parse_config_text("experiment = null-check\nbogus.key = 1\n"), ConfigurationError);
  CHECK_THROWS_AS(parse_config_text("experiment = null-check\ngrid.n = 12x\n"), ConfigurationError);
  CHECK_THROWS_AS(parse_config_text("experiment = null-check\nno equals sign\n"), ConfigurationError);
  CHECK_THROWS_AS(load_config("/nonexistent/riglid.cfg"), ConfigurationError);

  RunConfig e = defaults_for("linear-limit");
  e.epsilon = 0;
  CHECK_THROWS_AS(validate_config(e), ConfigurationError);
  e = defaults_for("linear-limit");
  e.epsilon_list = {0.1, 0.1, 0.01};
  CHECK_THROWS_AS(validate_config(e), ConfigurationError);
  e.epsilon_list = {0.01, 0.1};
  CHECK_THROWS_AS(validate_config(e), ConfigurationError);
  e = defaults_for("null-check");
  e.n = 100;
  CHECK_THROWS_AS(validate_config(e), ConfigurationError);
  e = defaults_for("null-check");
  e.mu = 1.5;
  CHECK_THROWS_AS(validate_config(e), ConfigurationError);
}

TEST_CASE("serialization round trip") {
  for (const auto& name : experiment_names()) {
    RunConfig c = defaults_for(name);
    c.seed = 7;
    c.amplitude = 0.1 + 1e-17;
    c.width = 1.0 / 3.0;
    const std::string text = serialize_config(c);
    CHECK(parse_config_text(text) == c);
    const auto j = config_json(c);
    for (const auto& k : config_keys()) CHECK(j.contains(k));
  }
}

TEST_CASE("manifest and deterministic outputs") {
  RunConfig c = defaults_for("null-check");
  const fs::path a = scratch("a"), b = scratch("b");
  const ExperimentResult ra = run_experiment(c, a.string()), rb = run_experiment(c, b.string());
  CHECK(ra.exit_code == kExitPass);
  CHECK(ra.complete);
  REQUIRE(fs::exists(a / "null_check.csv"));
  CHECK(slurp(a / "null_check.csv") == slurp(b / "null_check.csv"));
  const auto m = nlohmann::json::parse(slurp(a / "manifest.json"));
  CHECK(m["experiment"] == "null-check");
  CHECK(m["complete"] == true);
  CHECK(m["exit_code"] == 0);
  CHECK(m["code_version"] == code_version());
  for (const auto& k : config_keys()) CHECK(m["config"].contains(k));
  REQUIRE(m["assertions"].size() == 1);
  CHECK(m["assertions"][0]["criterion"] == criterion_of("null-check"));
  CHECK(!fs::exists(a / "manifest.json.tmp"));

  c.seed = 99;
  run_experiment(c, b.string());
  CHECK(slurp(a / "null_check.csv") != slurp(b / "null_check.csv"));

  RunConfig bad = c;
  bad.n = 10;
  const ExperimentResult rc = run_experiment(bad, scratch("c").string());
  CHECK(rc.exit_code == kExitConfig);
  CHECK(!rc.complete);
  CHECK(rc.error.find("grid.n") != std::string::npos);
  fs::remove_all(a);
  fs::remove_all(b);
  fs::remove_all(scratch("c"));
}

TEST_CASE("csv text") {
  CsvTable t;
  t.file = "x.csv";
  t.columns = {"a", "b"};
  t.add({1.0, 0.1});
  const std::string s = csv_text(t);
  CHECK(s.rfind("a,b\n", 0) == 0);
  CHECK(s.find("0.1") != std::string::npos);
}
