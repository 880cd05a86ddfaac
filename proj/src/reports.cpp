#include "srl/reports.hpp"

#include <cstdio>
#include <sstream>

#include <json.hpp>

namespace srl {

namespace {

std::string fixed6(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

}  // namespace

std::string step_csv(const TrajectoryResult& result) {
  std::ostringstream out;
  out << "step,truth_x,truth_y,est_x,est_y,error\n";
  for (std::size_t t = 0; t < result.steps.size(); ++t) {
    const StepResult& s = result.steps[t];
    out << t << ',' << fixed6(s.truth.x) << ',' << fixed6(s.truth.y) << ','
        << fixed6(s.estimate.x) << ',' << fixed6(s.estimate.y) << ','
        << fixed6(s.error) << '\n';
  }
  return out.str();
}

std::string summary_json(const TrajectoryResult& result) {
  nlohmann::ordered_json doc;
  doc["steps"] = result.steps.size();
  doc["mean_error_m"] = result.mean_error;
  doc["std_error_m"] = result.std_error;
  doc["p80_m"] = result.p80;
  doc["max_error_m"] = result.max_error;
  auto& cdf = doc["cdf"] = nlohmann::ordered_json::array();
  for (const CdfPoint& p : result.cdf) {
    cdf.push_back({{"error_m", p.error}, {"fraction", p.fraction}});
  }
  return doc.dump(2) + "\n";
}

std::string comparison_csv(const std::vector<ComparisonRow>& rows) {
  std::ostringstream out;
  out << "algorithm,mean_error_m,std_error_m,p80_m,max_error_m\n";
  for (const ComparisonRow& r : rows) {
    out << r.label << ',' << fixed6(r.mean_error) << ',' << fixed6(r.std_error)
        << ',' << fixed6(r.p80) << ',' << fixed6(r.max_error) << '\n';
  }
  return out.str();
}

std::string comparison_text(const std::vector<ComparisonRow>& rows) {
  std::ostringstream out;
  char line[160];
  std::snprintf(line, sizeof(line), "%-14s %16s %10s %10s\n", "algorithm",
                "mean +/- std (m)", "P80 (m)", "max (m)");
  out << line;
  out << std::string(53, '-') << '\n';
  for (const ComparisonRow& r : rows) {
    std::snprintf(line, sizeof(line), "%-14s %7.2f +/- %5.2f %10.2f %10.2f\n",
                  r.label.c_str(), r.mean_error, r.std_error, r.p80,
                  r.max_error);
    out << line;
  }
  return out.str();
}

}  // namespace srl
