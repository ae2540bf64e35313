#pragma once

#include <string>
#include <vector>

namespace polyglue {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  double value = 0.0;      ///< worst observed quantity
  double threshold = 0.0;  ///< the pinned bound it is compared against
  double seconds = 0.0;
  std::string detail;
};

/// Runs the full acceptance suite. `quick` trims sampling counts (same
/// checks, same thresholds); artifacts (sweep CSV + plot script) are written
/// under `out_dir` when non-empty.
std::vector<CriterionResult> run_acceptance(bool quick, const std::string& out_dir);

std::string format_result_line(const CriterionResult& r);

}  // namespace polyglue
