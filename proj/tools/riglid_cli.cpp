// riglid command line front end; talks to the library through the C API only.
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "riglid/riglid.h"

namespace {

int config_error(const char* what) {
  std::fprintf(stderr, "riglid: %s: %s\n", what, riglid_last_error());
  return RIGLID_EXIT_CONFIG;
}

bool set(riglid_config* c, const std::string& key, const std::string& value) {
  if (riglid_config_set(c, key.c_str(), value.c_str()) == RIGLID_OK) return true;
  std::fprintf(stderr, "riglid: %s\n", riglid_last_error());
  return false;
}

std::string get(const riglid_config* c, const char* key) {
  size_t need = 0;
  riglid_config_get(c, key, nullptr, 0, &need);
  std::string s(need, '\0');
  riglid_config_get(c, key, s.data(), s.size(), nullptr);
  s.resize(need ? need - 1 : 0);
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"riglid: rigid-lid water-waves laboratory"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(riglid_version()));

  auto* list = app.add_subcommand("list", "list experiments");
  auto* show = app.add_subcommand("config", "print the default configuration of an experiment");
  std::string show_name;
  show->add_option("experiment", show_name)->required();

  auto* run = app.add_subcommand("run", "run an experiment");
  std::string name, config_path, out_dir = "out", epsilon, mu, dn_mode;
  int jobs = 1, grid_n = 0;
  long long seed = -1;
  double dt = 0, T = 0;
  std::vector<std::string> sets;
  run->add_option("name,--experiment", name, "experiment name");
  run->add_option("--config", config_path, "flat key = value config file")->check(CLI::ExistingFile);
  run->add_option("--out", out_dir, "output directory (RIGLID_OUT overrides)");
  run->add_option("--jobs", jobs, "concurrent sweep members")->check(CLI::PositiveNumber);
  run->add_option("--seed", seed, "seed for randomized checks")->check(CLI::NonNegativeNumber);
  run->add_option("--epsilon", epsilon, "epsilon, or a comma list for sweeps");
  run->add_option("--mu", mu, "mu, or a comma list");
  run->add_option("--grid-n", grid_n, "grid size");
  run->add_option("--dt", dt, "time step");
  run->add_option("--T", T, "final time");
  run->add_option("--dn-mode", dn_mode, "elliptic | expansion1 | flat");
  run->add_option("--set", sets, "extra key=value override (repeatable)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return RIGLID_EXIT_CONFIG;
  }

  if (list->parsed()) {
    for (int i = 0; i < riglid_experiment_count(); ++i) std::printf("%s\n", riglid_experiment_name(i));
    return 0;
  }
  if (show->parsed()) {
    riglid_config* c = nullptr;
    if (riglid_config_new(show_name.c_str(), &c) != RIGLID_OK) return config_error("config");
    size_t need = 0;
    riglid_config_serialize(c, nullptr, 0, &need);
    std::string s(need, '\0');
    riglid_config_serialize(c, s.data(), s.size(), nullptr);
    std::fputs(s.c_str(), stdout);
    riglid_config_free(c);
    return 0;
  }

  riglid_config* c = nullptr;
  if (!config_path.empty()) {
    if (riglid_config_load(config_path.c_str(), name.empty() ? nullptr : name.c_str(), &c) != RIGLID_OK)
      return config_error("config");
  } else {
    if (name.empty()) {
      std::fprintf(stderr, "riglid: no experiment given (positional, --experiment or --config)\n");
      return RIGLID_EXIT_CONFIG;
    }
    if (riglid_config_new(name.c_str(), &c) != RIGLID_OK) return config_error("run");
  }

  bool ok = true;
  auto scalar_or_list = [&](const std::string& v, const char* scalar, const char* listkey) {
    if (v.empty()) return;
    ok = ok && set(c, v.find(',') != std::string::npos ? listkey : scalar, v);
  };
  scalar_or_list(epsilon, "params.epsilon", "params.epsilon_list");
  scalar_or_list(mu, "params.mu", "params.mu_list");
  if (seed >= 0) ok = ok && set(c, "seed", std::to_string(seed));
  if (grid_n > 0) ok = ok && set(c, "grid.n", std::to_string(grid_n));
  if (dt > 0) ok = ok && set(c, "solver.dt", CLI::detail::to_string(dt));
  if (T > 0) ok = ok && set(c, "solver.T", CLI::detail::to_string(T));
  if (!dn_mode.empty()) ok = ok && set(c, "solver.dn_mode", dn_mode);
  for (const auto& kv : sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      std::fprintf(stderr, "riglid: --set expects key=value, got '%s'\n", kv.c_str());
      ok = false;
      break;
    }
    ok = ok && set(c, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (run->count("--out") == 0) out_dir = get(c, "output.dir");
  if (const char* env = std::getenv("RIGLID_OUT"); env && *env) out_dir = env;
  if (ok) ok = set(c, "output.dir", out_dir);
  if (!ok || riglid_config_validate(c) != RIGLID_OK) {
    if (ok) std::fprintf(stderr, "riglid: %s\n", riglid_last_error());
    riglid_config_free(c);
    return RIGLID_EXIT_CONFIG;
  }

  riglid_result* r = nullptr;
  if (riglid_run(c, out_dir.c_str(), jobs, &r) != RIGLID_OK) {
    std::fprintf(stderr, "riglid: %s\n", riglid_last_error());
    riglid_config_free(c);
    return RIGLID_EXIT_RUNTIME;
  }
  for (int i = 0; i < riglid_result_assertion_count(r); ++i) {
    const char *id = nullptr, *detail = nullptr;
    int crit = 0, passed = 0;
    double m = 0, th = 0;
    riglid_result_assertion(r, i, &id, &crit, &passed, &m, &th, &detail);
    std::printf("%s %s measured=%.6g threshold=%.6g  %s\n", passed ? "PASS" : "FAIL", id, m, th, detail);
  }
  if (!riglid_result_complete(r)) std::fprintf(stderr, "riglid: incomplete: %s\n", riglid_result_error(r));
  for (int i = 0; i < riglid_result_output_count(r); ++i) std::printf("wrote %s\n", riglid_result_output(r, i));
  const int code = riglid_result_exit_code(r);
  riglid_result_free(r);
  riglid_config_free(c);
  return code;
}
