#pragma once

#include <string>
#include <vector>

#include "scenario.hpp"

namespace fractail::cli {

struct Check {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

struct RunReport {
  std::string text;              // the report as written to report.txt
  std::vector<std::string> files;
  std::vector<Check> checks;
  bool passed() const;
};

struct RunOptions {
  std::string out_dir;
  bool plots = false;
};

/// Executes the scenario and writes CSV tables, report.txt and (optionally)
/// SVG plots into options.out_dir. Module errors are rethrown with the
/// scenario path and experiment prepended.
RunReport run_scenario(const Scenario& scenario, const RunOptions& options);

}  // namespace fractail::cli
