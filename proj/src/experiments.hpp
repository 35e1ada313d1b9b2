#pragma once
#include <string>
#include <vector>

#include "config.hpp"
#include "json.hpp"

namespace riglid {

struct Assertion {
  std::string id;
  int criterion = 0;
  bool passed = false;
  double measured = 0.0;
  double threshold = 0.0;
  std::string detail;
};

struct CsvTable {
  std::string file;  // e.g. "linear_limit.csv"
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  void add(std::vector<double> row) { rows.push_back(std::move(row)); }
};

struct ExperimentResult {
  std::string experiment;
  std::vector<Assertion> assertions;
  std::vector<CsvTable> tables;
  std::vector<std::string> flags;
  nlohmann::json summary = nlohmann::json::object();  // slopes, calibration constants
  bool complete = false;
  std::string error;
  int exit_code = 3;
  double wall_time = 0.0;
  std::vector<std::string> outputs;  // paths written
};

enum ExitCode { kExitPass = 0, kExitAssertion = 1, kExitConfig = 2, kExitRuntime = 3 };

// criterion number (1..14) checked by an experiment
int criterion_of(const std::string& experiment);
std::string assertion_id_of(const std::string& experiment);

// runs the numerics only; throws on module errors
ExperimentResult compute_experiment(const RunConfig& c, int jobs = 1);

// compute + write <out_dir>/<tables> and <out_dir>/manifest.json; never throws
ExperimentResult run_experiment(const RunConfig& c, const std::string& out_dir, int jobs = 1);

std::string csv_text(const CsvTable& t);
void write_file_atomic(const std::string& path, const std::string& content);
nlohmann::json manifest_json(const RunConfig& c, const ExperimentResult& r);
std::string code_version();

}  // namespace riglid
