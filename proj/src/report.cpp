#include "shearlet/report.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "shearlet/error.hpp"

namespace shearlet {

using json = nlohmann::ordered_json;

namespace {

// JSON has no infinities; non-finite values become strings.
json number_json(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

std::string csv_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

json pairs_json(const std::vector<std::pair<std::string, double>>& items) {
  json j = json::object();
  for (const auto& [k, v] : items) j[k] = number_json(v);
  return j;
}

json records(const ReportSet& reports, const std::string& hash) {
  json arr = json::array();
  for (const auto& r : reports.inequalities) arr.push_back(report_to_json(r, hash));
  for (const auto& r : reports.constants) arr.push_back(report_to_json(r, hash));
  return arr;
}

}  // namespace

bool ReportSet::all_pass() const {
  for (const auto& r : inequalities)
    if (!r.pass) return false;
  return true;
}

json report_to_json(const InequalityReport& r, const std::string& config_hash) {
  json j;
  j["kind"] = "inequality";
  j["name"] = r.name;
  j["signal"] = r.signal;
  j["relation"] = r.relation == Relation::equal ? "equal" : "at_least";
  j["lhs"] = number_json(r.lhs);
  j["rhs"] = number_json(r.rhs);
  j["slack"] = number_json(r.slack);
  j["pass"] = r.pass;
  j["tolerance"] = number_json(r.tolerance);
  j["c_psi"] = number_json(r.c_psi);
  j["uncovered_mass"] = number_json(r.uncovered_mass);
  j["config_hash"] = config_hash;
  j["metadata"] = pairs_json(r.metadata);
  j["notes"] = r.notes;
  return j;
}

json report_to_json(const EmpiricalConstantReport& r, const std::string& config_hash) {
  json j;
  j["kind"] = "constant";
  j["name"] = r.name;
  j["signal"] = r.signal;
  j["constant"] = number_json(r.constant);
  j["secondary"] = number_json(r.secondary);
  j["secondary_label"] = r.secondary_label;
  j["config_hash"] = config_hash;
  j["inputs"] = pairs_json(r.inputs);
  j["notes"] = r.notes;
  return j;
}

std::string reports_json_text(const ReportSet& reports, const json& config_echo, const std::string& config_hash) {
  json j;
  j["config"] = config_echo;
  j["config_hash"] = config_hash;
  j["records"] = records(reports, config_hash);
  return j.dump(2) + "\n";
}

std::string reports_csv_text(const ReportSet& reports) {
  std::ostringstream os;
  os << "name,signal,lhs,rhs,slack,pass\n";
  for (const auto& r : reports.inequalities)
    os << csv_field(r.name) << ',' << csv_field(r.signal) << ',' << csv_number(r.lhs) << ',' << csv_number(r.rhs)
       << ',' << csv_number(r.slack) << ',' << (r.pass ? "true" : "false") << '\n';
  for (const auto& r : reports.constants)
    os << csv_field(r.name) << ',' << csv_field(r.signal) << ',' << csv_number(r.constant) << ','
       << csv_number(r.secondary) << ",," << "info" << '\n';
  return os.str();
}

void emit_report(const ReportSet& reports, const json& config_echo, const std::string& config_hash,
                 const std::string& dir, const std::string& stem) {
  if (reports.empty()) throw Error(Errc::precondition, "emit_report: empty report list");
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw Error(Errc::io, "output directory '" + dir + "' is not usable");
  auto write = [&](const std::string& name, const std::string& body) {
    fs::path p = fs::path(dir) / name;
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::io, "cannot write '" + p.string() + "'");
    out << body;
    out.flush();
    if (!out) throw Error(Errc::io, "write failed for '" + p.string() + "'");
  };
  write(stem + ".json", reports_json_text(reports, config_echo, config_hash));
  write(stem + ".csv", reports_csv_text(reports));
}

}  // namespace shearlet
