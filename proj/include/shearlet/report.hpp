#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "shearlet/verify.hpp"

namespace shearlet {

struct ReportSet {
  std::vector<InequalityReport> inequalities;
  std::vector<EmpiricalConstantReport> constants;

  bool empty() const { return inequalities.empty() && constants.empty(); }
  bool all_pass() const;
};

nlohmann::ordered_json report_to_json(const InequalityReport& r, const std::string& config_hash);
nlohmann::ordered_json report_to_json(const EmpiricalConstantReport& r, const std::string& config_hash);

// Writes <dir>/<stem>.json (config echo plus records) and <dir>/<stem>.csv.
// Throws Errc::precondition for an empty set and Errc::io if the directory is
// not writable.
void emit_report(const ReportSet& reports, const nlohmann::ordered_json& config_echo, const std::string& config_hash,
                 const std::string& dir, const std::string& stem);

std::string reports_json_text(const ReportSet& reports, const nlohmann::ordered_json& config_echo,
                              const std::string& config_hash);
std::string reports_csv_text(const ReportSet& reports);

}  // namespace shearlet
