#include "imcf/lab/report.hpp"

#include "imcf/error.hpp"
#include "imcf/io/geometry_io.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>

namespace imcf::lab {

using nlohmann::json;

double CheckResult::value(const std::string& key) const {
  for (const auto& [k, v] : values)
    if (k == key) return v;
  return std::nan("");
}

bool ScenarioReport::passed() const {
  return failure.empty() && std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

void write_text(std::ostream& os, const ScenarioReport& r) {
  os << "# scenario " << r.name << " (" << r.scenario << ")\n";
  os << "# config_hash " << r.config_hash << "\n# seed " << r.seed << "\n";
  if (!r.stop_reason.empty()) os << "# stop_reason " << r.stop_reason << "\n";
  if (!r.failure.empty()) os << "# failure " << r.failure << "\n";
  for (const auto& c : r.checks) {
    os << "\n[check]\nname: " << c.name << "\nlabel: " << c.label << '\n';
    for (const auto& [k, v] : c.values) os << "value." << k << ": " << io::format_double(v) << '\n';
    os << "tolerance: " << io::format_double(c.tolerance) << "\nstatus: " << (c.pass ? "pass" : "fail") << '\n';
    if (!c.note.empty()) os << "note: " << c.note << '\n';
  }
  os << "\nresult: " << (r.passed() ? "pass" : "fail") << '\n';
}

namespace {

/// JSON has no NaN or infinity; those become strings.
json number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

double from_number(const json& j) {
  if (j.is_number()) return j.get<double>();
  const auto s = j.get<std::string>();
  if (s == "nan") return std::nan("");
  if (s == "inf") return HUGE_VAL;
  if (s == "-inf") return -HUGE_VAL;
  throw MalformedInput("summary: bad number '" + s + "'");
}

}  // namespace

void write_summary(std::ostream& os, const ScenarioReport& r) {
  json j;
  j["scenario"] = r.scenario;
  j["name"] = r.name;
  j["config_hash"] = r.config_hash;
  j["seed"] = r.seed;
  j["stop_reason"] = r.stop_reason;
  j["failure"] = r.failure;
  j["seconds"] = r.seconds;
  j["passed"] = r.passed();
  json checks = json::array();
  for (const auto& c : r.checks) {
    // Values as an ordered list of pairs so the order survives the round trip.
    json values = json::array();
    for (const auto& [k, v] : c.values) values.push_back(json::array({k, number(v)}));
    checks.push_back({{"name", c.name},
                      {"label", c.label},
                      {"values", values},
                      {"tolerance", number(c.tolerance)},
                      {"pass", c.pass},
                      {"note", c.note}});
  }
  j["checks"] = checks;
  os << std::setw(2) << j << '\n';
}

ScenarioReport read_summary(std::istream& is) {
  json j;
  try {
    is >> j;
    ScenarioReport r;
    r.scenario = j.at("scenario").get<std::string>();
    r.name = j.at("name").get<std::string>();
    r.config_hash = j.at("config_hash").get<std::uint64_t>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.stop_reason = j.at("stop_reason").get<std::string>();
    r.failure = j.at("failure").get<std::string>();
    r.seconds = j.at("seconds").get<double>();
    for (const auto& c : j.at("checks")) {
      CheckResult cr;
      cr.name = c.at("name").get<std::string>();
      cr.label = c.at("label").get<std::string>();
      for (const auto& kv : c.at("values")) cr.values.emplace_back(kv.at(0).get<std::string>(), from_number(kv.at(1)));
      cr.tolerance = from_number(c.at("tolerance"));
      cr.pass = c.at("pass").get<bool>();
      cr.note = c.at("note").get<std::string>();
      r.checks.push_back(std::move(cr));
    }
    return r;
  } catch (const json::exception& e) {
    throw MalformedInput(std::string("summary: ") + e.what());
  }
}

void write_table(std::ostream& os, const std::vector<ScenarioReport>& reports) {
  std::size_t w1 = 8, w2 = 5;
  for (const auto& r : reports) {
    w1 = std::max(w1, r.name.size());
    for (const auto& c : r.checks) w2 = std::max(w2, c.name.size());
  }
  auto row = [&](const std::string& a, const std::string& b, const std::string& status, const std::string& label) {
    os << std::left << std::setw(static_cast<int>(w1)) << a << "  " << std::setw(static_cast<int>(w2)) << b << "  "
       << std::setw(6) << status << "  " << label << '\n';
  };
  row("scenario", "check", "status", "label");
  for (const auto& r : reports) {
    if (!r.failure.empty()) row(r.name, "solver", "FAIL", r.failure);
    for (const auto& c : r.checks) row(r.name, c.name, c.pass ? "PASS" : "FAIL", c.label);
  }
}

std::vector<ScenarioReport> collect_summaries(const std::filesystem::path& dir, const std::string& summary_name) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw UsageError("report: not a directory: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file() && e.path().filename() == summary_name) files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::vector<ScenarioReport> out;
  for (const auto& f : files) {
    std::ifstream in(f);
    try {
      out.push_back(read_summary(in));
    } catch (const MalformedInput& e) {
      throw MalformedInput(f.string() + ": " + e.what());
    }
  }
  return out;
}

}  // namespace imcf::lab
