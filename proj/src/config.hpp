#pragma once
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "spectral.hpp"

namespace riglid {

// Flat `key = value` run description. Defaults depend on the experiment.
struct RunConfig {
  std::string experiment = "null-check";
  std::uint64_t seed = 20240611;
  std::string out_dir = "out";

  double epsilon = 0.1;
  Vec epsilon_list;
  double mu = 0.5;
  Vec mu_list;
  double t = 1.0;
  Vec t_list;

  double L = 64.0;
  int n = 256;
  int n_z = 32;

  double dt = 1e-3;
  double T = 1.0;
  std::string dn_mode = "elliptic";
  int N = 3;
  bool dealias = true;
  int monitor_every = 1;

  std::string family = "gaussian";
  double amplitude = 1.0;
  double width = 2.0;
  double psi_amplitude = 0.0;

  bool operator==(const RunConfig&) const = default;
};

const std::vector<std::string>& experiment_names();
bool is_experiment(const std::string& name);

RunConfig defaults_for(const std::string& experiment);

// keys in serialization order
const std::vector<std::string>& config_keys();
void set_key(RunConfig& c, const std::string& key, const std::string& value);
std::string get_key(const RunConfig& c, const std::string& key);

// the experiment key is applied first so that its defaults sit underneath
RunConfig parse_config_text(const std::string& text, const std::string& experiment_override = "");
RunConfig load_config(const std::string& path, const std::string& experiment_override = "");
std::string serialize_config(const RunConfig& c);
nlohmann::json config_json(const RunConfig& c);
void validate_config(const RunConfig& c);

// initial surface from the data.* keys
Vec data_profile(const RunConfig& c, const SpectralGrid& g, double amplitude);

std::string format_double(double v);
Vec parse_list(const std::string& key, const std::string& value);

}  // namespace riglid
