#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace imopt {

struct CriterionResult {
  std::string id;
  bool pass = false;
  std::string detail;
  double seconds = 0;
};

// Runs the full acceptance suite; prints one pass/fail line per criterion.
std::vector<CriterionResult> run_acceptance_suite(std::ostream& log);

// exit code 0 iff every criterion passed
int cli_selftest(std::ostream& out, std::ostream& err);

}  // namespace imopt
