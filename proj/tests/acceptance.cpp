// One PASS/FAIL line per acceptance criterion, run at the default configurations.
#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <string>
#include <thread>
#include <vector>

#include "config.hpp"
#include "experiments.hpp"

using namespace riglid;

int main(int argc, char** argv) {
  const std::string out = argc > 1 ? argv[1] : "acceptance_out";
  const int jobs = std::max(1u, std::thread::hardware_concurrency());

  std::vector<std::string> names = experiment_names();
  std::sort(names.begin(), names.end(),
            [](const std::string& a, const std::string& b) { return criterion_of(a) < criterion_of(b); });

  int failed = 0;
  for (const auto& name : names) {
    const RunConfig c = defaults_for(name);
    const ExperimentResult r = run_experiment(c, (std::filesystem::path(out) / name).string(), jobs);
    const int crit = criterion_of(name);
    if (!r.complete || r.assertions.empty()) {
      std::printf("FAIL [%2d] %-24s error: %s\n", crit, assertion_id_of(name).c_str(), r.error.c_str());
      ++failed;
      std::fflush(stdout);
      continue;
    }
    for (const auto& a : r.assertions) {
      std::printf("%s [%2d] %-24s measured=%.6g threshold=%.6g  %s  (%.1fs)\n", a.passed ? "PASS" : "FAIL",
                  a.criterion, a.id.c_str(), a.measured, a.threshold, a.detail.c_str(), r.wall_time);
      if (!a.passed) ++failed;
    }
    std::fflush(stdout);
  }
  std::printf("%d criteria failed\n", failed);
  return failed ? 1 : 0;
}
