#pragma once

#include <string>
#include <vector>

#include "srl/evaluation.hpp"

namespace srl {

/// Per-step CSV: step,truth_x,truth_y,est_x,est_y,error
std::string step_csv(const TrajectoryResult& result);

/// JSON summary: mean, std, p80, max and the CDF samples.
std::string summary_json(const TrajectoryResult& result);

struct ComparisonRow {
  std::string label;
  double mean_error = 0.0;
  double std_error = 0.0;
  double p80 = 0.0;
  double max_error = 0.0;
};

/// Machine-readable side-by-side table.
std::string comparison_csv(const std::vector<ComparisonRow>& rows);

/// Human-readable rendering of the same table.
std::string comparison_text(const std::vector<ComparisonRow>& rows);

}  // namespace srl
