#pragma once

#include <functional>
#include <string>
#include <vector>

#include "boltzspec/session.hpp"

namespace boltzspec {

struct CheckResult {
  std::string module;
  std::string name;
  std::string property;  // the mathematical property being checked
  bool passed = false;
  double value = 0.0;
  double threshold = 0.0;
  std::string detail;
  double seconds = 0.0;
};

struct ValidationReport {
  int dim = 0;
  int degree = 0;
  std::vector<CheckResult> checks;
  double seconds = 0.0;

  bool all_passed() const;
  int failures() const;
  Json to_json(bool with_timing = false) const;
};

// Runs every module property check on the configuration; a check that throws is
// recorded as failed with the error message.
ValidationReport run_validation(Session& session, const std::function<void(const CheckResult&)>& progress = {});

}  // namespace boltzspec
