#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

namespace vortexlab::harness {

struct CriterionResult {
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

struct AcceptanceOptions {
  std::filesystem::path workdir;  // scratch space for run outputs
  std::ostream* log = nullptr;
};

/// Names of the acceptance criteria, in suite order.
std::vector<std::string> acceptance_names();

/// Runs one criterion; unknown names throw std::invalid_argument. Runtime
/// failures are reported as a failed result rather than thrown.
CriterionResult run_criterion(const std::string& name, const AcceptanceOptions& options);

/// "PASS <name>: <detail>" or "FAIL <name>: <detail>".
std::string format_result(const CriterionResult& r);

}  // namespace vortexlab::harness
