#pragma once

#include <functional>
#include <string>
#include <vector>

namespace greenlinker {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

struct AcceptanceOptions {
  int threads = 1;
  /// Criterion ids to run; empty runs all ten.
  std::vector<int> only;
};

/// Runs the acceptance criteria in order, reporting each as it finishes.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opts = {},
                                            const std::function<void(const CriterionResult&)>& on_result = {});

/// "PASS  3 pushforward-law (1.2 s): detail"
std::string format_result(const CriterionResult& r);

}  // namespace greenlinker
