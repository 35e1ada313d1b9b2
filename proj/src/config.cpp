#include "config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "dn.hpp"
#include "errors.hpp"

namespace riglid {

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{
      "propagator",      "linear-energy", "linear-limit", "weak-decay",        "dispersion",
      "dn-fidelity",     "dn-expansion",  "shape-derivative", "lin-vs-nonlin", "conservation",
      "rigid-lid-scaling", "extension",   "null-check",   "reconstruct"};
  return names;
}

bool is_experiment(const std::string& name) {
  for (const auto& n : experiment_names())
    if (n == name) return true;
  return false;
}

RunConfig defaults_for(const std::string& e) {
  if (!is_experiment(e)) throw ConfigurationError("experiment: unknown name '" + e + "'");
  RunConfig c;
  c.experiment = e;
  if (e == "propagator") {
    c.L = 2 * M_PI * 8;
    c.n = 256;
    c.t_list = {0.1, 1.0, 10.0};
  } else if (e == "linear-energy") {
    c.L = 100;
    c.n = 1024;
    c.T = 10;
    c.psi_amplitude = 0.5;
  } else if (e == "linear-limit") {
    c.L = 200;
    c.n = 4096;
    c.epsilon_list = {0.1, 0.01, 0.001};
    c.width = 30;
  } else if (e == "weak-decay") {
    c.L = 1024;
    c.n = 4096;
    c.epsilon_list = {0.1, 0.05, 0.02, 0.01};
    c.width = 20;
  } else if (e == "dispersion") {
    c.L = 512;
    c.n = 4096;
    c.mu_list = {0.25, 1.0};
    c.width = 0.5;
    for (int i = 0; i <= 40; ++i) c.t_list.push_back(std::pow(100.0, i / 40.0));
  } else if (e == "dn-fidelity") {
    c.L = 64;
    c.n = 256;
    c.n_z = 64;
  } else if (e == "dn-expansion") {
    c.L = 64;
    c.n = 256;
    c.n_z = 32;
    c.epsilon_list = {0.1, 0.0316227766016838, 0.01, 0.00316227766016838, 0.001};
  } else if (e == "shape-derivative") {
    c.L = 64;
    c.n = 256;
    c.n_z = 32;
    c.psi_amplitude = 1.0;
  } else if (e == "lin-vs-nonlin" || e == "rigid-lid-scaling") {
    c.L = 128;
    c.n = 512;
    c.n_z = 32;
    c.epsilon_list = {0.2, 0.1, 0.05, 0.025};
    c.dt = 0.01;
    c.monitor_every = 2;
    c.width = 1;
  } else if (e == "conservation") {
    c.L = 64;
    c.n = 256;
    c.n_z = 32;
    c.dt = 1e-3;
    c.t_list = {0.04, 0.02, 0.01};  // dt values of the order study
    c.monitor_every = 40;
  } else if (e == "extension") {
    c.L = 2 * M_PI;
    c.n = 16;
    c.n_z = 64;
  } else if (e == "null-check") {
    c.L = 2 * M_PI;
    c.n = 64;
    c.n_z = 32;
  } else if (e == "reconstruct") {
    c.L = 32;
    c.n = 128;
    c.n_z = 16;
    c.dt = 0.01;
    c.t = 0.1;
    c.width = 2.8284271247461903;
  }
  return c;
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys{
      "experiment",      "seed",          "output.dir",   "params.epsilon", "params.epsilon_list",
      "params.mu",       "params.mu_list", "params.t",    "params.t_list",  "grid.L",
      "grid.n",          "grid.n_z",      "solver.dt",    "solver.T",       "solver.dn_mode",
      "solver.N",        "solver.dealias", "solver.monitor_every", "data.family", "data.amplitude",
      "data.width",      "data.psi_amplitude"};
  return keys;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);  // 17 significant digits: lossless for float64
  return buf;
}

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (trim(v.substr(pos)).empty()) return d;
  } catch (const std::exception&) {
  }
  throw ConfigurationError(key + ": '" + v + "' is not a number");
}

long long parse_int(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    const long long d = std::stoll(v, &pos);
    if (trim(v.substr(pos)).empty()) return d;
  } catch (const std::exception&) {
  }
  throw ConfigurationError(key + ": '" + v + "' is not an integer");
}

std::string join(const Vec& v) {
  std::string s;
  for (size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + format_double(v[i]);
  return s;
}

}  // namespace

Vec parse_list(const std::string& key, const std::string& value) {
  Vec out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    out.push_back(parse_double(key, item));
  }
  return out;
}

void set_key(RunConfig& c, const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  if (key == "experiment") {
    if (!is_experiment(v)) throw ConfigurationError("experiment: unknown name '" + v + "'");
    c.experiment = v;
  } else if (key == "seed") {
    const long long s = parse_int(key, v);
    if (s < 0) throw ConfigurationError("seed: must be >= 0");
    c.seed = static_cast<std::uint64_t>(s);
  } else if (key == "output.dir") {
    c.out_dir = v;
  } else if (key == "params.epsilon") {
    c.epsilon = parse_double(key, v);
  } else if (key == "params.epsilon_list") {
    c.epsilon_list = parse_list(key, v);
  } else if (key == "params.mu") {
    c.mu = parse_double(key, v);
  } else if (key == "params.mu_list") {
    c.mu_list = parse_list(key, v);
  } else if (key == "params.t") {
    c.t = parse_double(key, v);
  } else if (key == "params.t_list") {
    c.t_list = parse_list(key, v);
  } else if (key == "grid.L") {
    c.L = parse_double(key, v);
  } else if (key == "grid.n") {
    c.n = static_cast<int>(parse_int(key, v));
  } else if (key == "grid.n_z") {
    c.n_z = static_cast<int>(parse_int(key, v));
  } else if (key == "solver.dt") {
    c.dt = parse_double(key, v);
  } else if (key == "solver.T") {
    c.T = parse_double(key, v);
  } else if (key == "solver.dn_mode") {
    parse_dn_mode(v);
    c.dn_mode = v;
  } else if (key == "solver.N") {
    c.N = static_cast<int>(parse_int(key, v));
  } else if (key == "solver.dealias") {
    if (v == "true" || v == "on" || v == "1") {
      c.dealias = true;
    } else if (v == "false" || v == "off" || v == "0") {
      c.dealias = false;
    } else {
      throw ConfigurationError("solver.dealias: expected on/off");
    }
  } else if (key == "solver.monitor_every") {
    c.monitor_every = static_cast<int>(parse_int(key, v));
  } else if (key == "data.family") {
    if (v != "gaussian" && v != "sech2") throw ConfigurationError("data.family: expected gaussian or sech2");
    c.family = v;
  } else if (key == "data.amplitude") {
    c.amplitude = parse_double(key, v);
  } else if (key == "data.width") {
    c.width = parse_double(key, v);
  } else if (key == "data.psi_amplitude") {
    c.psi_amplitude = parse_double(key, v);
  } else {
    throw ConfigurationError("unknown key '" + key + "'");
  }
}

std::string get_key(const RunConfig& c, const std::string& key) {
  if (key == "experiment") return c.experiment;
  if (key == "seed") return std::to_string(c.seed);
  if (key == "output.dir") return c.out_dir;
  if (key == "params.epsilon") return format_double(c.epsilon);
  if (key == "params.epsilon_list") return join(c.epsilon_list);
  if (key == "params.mu") return format_double(c.mu);
  if (key == "params.mu_list") return join(c.mu_list);
  if (key == "params.t") return format_double(c.t);
  if (key == "params.t_list") return join(c.t_list);
  if (key == "grid.L") return format_double(c.L);
  if (key == "grid.n") return std::to_string(c.n);
  if (key == "grid.n_z") return std::to_string(c.n_z);
  if (key == "solver.dt") return format_double(c.dt);
  if (key == "solver.T") return format_double(c.T);
  if (key == "solver.dn_mode") return c.dn_mode;
  if (key == "solver.N") return std::to_string(c.N);
  if (key == "solver.dealias") return c.dealias ? "on" : "off";
  if (key == "solver.monitor_every") return std::to_string(c.monitor_every);
  if (key == "data.family") return c.family;
  if (key == "data.amplitude") return format_double(c.amplitude);
  if (key == "data.width") return format_double(c.width);
  if (key == "data.psi_amplitude") return format_double(c.psi_amplitude);
  throw ConfigurationError("unknown key '" + key + "'");
}

RunConfig parse_config_text(const std::string& text, const std::string& experiment_override) {
  std::vector<std::pair<std::string, std::string>> kv;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  std::string experiment = experiment_override;
  while (std::getline(ss, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigurationError("line " + std::to_string(lineno) + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq)), val = trim(line.substr(eq + 1));
    if (key == "experiment") {
      if (experiment_override.empty()) experiment = val;
      continue;
    }
    kv.emplace_back(key, val);
  }
  if (experiment.empty()) throw ConfigurationError("experiment: missing");
  RunConfig c = defaults_for(experiment);
  for (const auto& [k, v] : kv) set_key(c, k, v);
  validate_config(c);
  return c;
}

RunConfig load_config(const std::string& path, const std::string& experiment_override) {
  std::ifstream f(path);
  if (!f) throw ConfigurationError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config_text(ss.str(), experiment_override);
}

std::string serialize_config(const RunConfig& c) {
  std::string out;
  for (const auto& k : config_keys()) out += k + " = " + get_key(c, k) + "\n";
  return out;
}

nlohmann::json config_json(const RunConfig& c) {
  nlohmann::json j = nlohmann::json::object();
  j["experiment"] = c.experiment;
  j["seed"] = c.seed;
  j["output.dir"] = c.out_dir;
  j["params.epsilon"] = c.epsilon;
  j["params.epsilon_list"] = c.epsilon_list;
  j["params.mu"] = c.mu;
  j["params.mu_list"] = c.mu_list;
  j["params.t"] = c.t;
  j["params.t_list"] = c.t_list;
  j["grid.L"] = c.L;
  j["grid.n"] = c.n;
  j["grid.n_z"] = c.n_z;
  j["solver.dt"] = c.dt;
  j["solver.T"] = c.T;
  j["solver.dn_mode"] = c.dn_mode;
  j["solver.N"] = c.N;
  j["solver.dealias"] = c.dealias;
  j["solver.monitor_every"] = c.monitor_every;
  j["data.family"] = c.family;
  j["data.amplitude"] = c.amplitude;
  j["data.width"] = c.width;
  j["data.psi_amplitude"] = c.psi_amplitude;
  return j;
}

namespace {

void positive(const char* key, double v) {
  if (!(v > 0) || !std::isfinite(v)) throw ConfigurationError(std::string(key) + ": must be > 0 (got " + format_double(v) + ")");
}

}  // namespace

void validate_config(const RunConfig& c) {
  if (!is_experiment(c.experiment)) throw ConfigurationError("experiment: unknown name '" + c.experiment + "'");
  positive("params.epsilon", c.epsilon);
  if (c.epsilon > 1) throw ConfigurationError("params.epsilon: must be <= 1");
  for (size_t i = 0; i < c.epsilon_list.size(); ++i) {
    positive("params.epsilon_list", c.epsilon_list[i]);
    if (c.epsilon_list[i] > 1) throw ConfigurationError("params.epsilon_list: entries must be <= 1");
    if (i && !(c.epsilon_list[i] < c.epsilon_list[i - 1]))
      throw ConfigurationError("params.epsilon_list: must be strictly decreasing");
  }
  positive("params.mu", c.mu);
  if (c.mu > 1) throw ConfigurationError("params.mu: must be <= 1");
  for (double m : c.mu_list) {
    positive("params.mu_list", m);
    if (m > 1) throw ConfigurationError("params.mu_list: entries must be <= 1");
  }
  positive("params.t", c.t);
  for (double t : c.t_list) positive("params.t_list", t);
  positive("grid.L", c.L);
  if (c.n < 8 || (c.n & (c.n - 1))) throw ConfigurationError("grid.n: must be a power of two >= 8");
  if (c.n_z < 8) throw ConfigurationError("grid.n_z: must be >= 8");
  positive("solver.dt", c.dt);
  positive("solver.T", c.T);
  parse_dn_mode(c.dn_mode);
  if (c.N < 0 || c.N > 5) throw ConfigurationError("solver.N: must lie in [0, 5]");
  if (c.monitor_every < 1) throw ConfigurationError("solver.monitor_every: must be >= 1");
  positive("data.width", c.width);
  if (!std::isfinite(c.amplitude)) throw ConfigurationError("data.amplitude: must be finite");
  if (!std::isfinite(c.psi_amplitude)) throw ConfigurationError("data.psi_amplitude: must be finite");
}

Vec data_profile(const RunConfig& c, const SpectralGrid& g, double amplitude) {
  const double w = c.width;
  if (c.family == "sech2")
    return sample_fn(g, [&](double x) {
      const double s = 1 / std::cosh(x / w);
      return amplitude * s * s;
    });
  return sample_fn(g, [&](double x) { return amplitude * std::exp(-(x / w) * (x / w)); });
}

}  // namespace riglid
