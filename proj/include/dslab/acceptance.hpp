#pragma once

#include <functional>
#include <ostream>
#include <string>
#include <vector>

namespace dslab {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;  // measured values
  double seconds = 0.0;
};

// Criterion ids 1..11. Criterion 2 (the solve audit) summarises every solve
// issued by the criteria that ran before it, so it is evaluated last.
CriterionResult run_criterion(int id, int workers);
std::vector<CriterionResult> run_acceptance(const std::vector<int>& ids, int workers,
                                            const std::function<void(const CriterionResult&)>& on_result = {});
std::string format_criterion(const CriterionResult& r);

}  // namespace dslab
