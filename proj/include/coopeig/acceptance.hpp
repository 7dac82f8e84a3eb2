#pragma once

#include <string>
#include <vector>

namespace coopeig {

struct CriterionCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct CriterionResult {
  std::string id;
  std::string title;
  bool passed = false;
  std::vector<CriterionCheck> checks;
  std::string note;  // analysis attached to known issues
  double seconds = 0.0;
};

struct AcceptanceOptions {
  std::string config_dir = "configs";
  std::vector<std::string> only;  // run a subset of ids when nonempty
};

/// Runs the bundled verification suite; each criterion prints one line
/// through the returned results. Tolerances are fixed here, not configurable.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opts);

bool all_passed(const std::vector<CriterionResult>& results);
std::string format_result_line(const CriterionResult& r);

}  // namespace coopeig
