#pragma once

#include <chrono>
#include <string>
#include <vector>

#include <json.hpp>

namespace kwh {

using Json = nlohmann::ordered_json;

struct CheckRecord {
  std::string name;
  std::string anchor;  // e.g. "Prop 3.3", "Thm 3.8 Eq (3.8)"
  bool pass = false;
  bool required = true;  // informational records never affect the exit code
  double margin = 0.0;
  double elapsed_ms = 0.0;
  std::string detail;
};

struct VerificationReport {
  std::vector<CheckRecord> records;
  Json environment = Json::object();

  long pass_count() const {
    long n = 0;
    for (const auto& r : records)
      if (r.pass) ++n;
    return n;
  }

  long fail_count() const {
    return static_cast<long>(records.size()) - pass_count();
  }

  bool required_failures() const {
    for (const auto& r : records)
      if (r.required && !r.pass) return true;
    return false;
  }

  Json to_json(bool include_timing = true) const {
    Json checks = Json::array();
    for (const auto& r : records) {
      Json rec{{"check", r.name},
               {"anchor", r.anchor},
               {"verdict", r.pass ? "pass" : "fail"},
               {"required", r.required},
               {"margin", r.margin}};
      if (!r.detail.empty()) rec["detail"] = r.detail;
      if (include_timing) rec["elapsed_ms"] = r.elapsed_ms;
      checks.push_back(std::move(rec));
    }
    return Json{{"environment", environment},
                {"checks", checks},
                {"summary",
                 {{"pass", pass_count()}, {"fail", fail_count()}}}};
  }

  std::string serialize(bool include_timing = true) const {
    return to_json(include_timing).dump(2) + "\n";
  }
};

/// Runs one check, recording its verdict, margin, and wall time.
template <typename Fn>
void run_check(VerificationReport& report, const std::string& name,
               const std::string& anchor, bool required, Fn&& body) {
  CheckRecord rec;
  rec.name = name;
  rec.anchor = anchor;
  rec.required = required;
  const auto start = std::chrono::steady_clock::now();
  try {
    body(rec);  // sets rec.pass / rec.margin / rec.detail
  } catch (const std::exception& e) {
    rec.pass = false;
    rec.detail = std::string("exception: ") + e.what();
  }
  rec.elapsed_ms = std::chrono::duration<double, std::milli>(
                       std::chrono::steady_clock::now() - start)
                       .count();
  report.records.push_back(std::move(rec));
}

}  // namespace kwh
