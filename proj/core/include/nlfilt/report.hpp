#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace nlfilt {

using json = nlohmann::ordered_json;

/// One verification check. status is "pass", "fail", "inconclusive" or a
/// "skipped: <reason>" string.
struct CheckReport {
  std::string name;
  json inputs = json::object();
  json measured = json::object();
  json predicted = json::object();
  json tolerances = json::object();
  std::string status = "inconclusive";
  std::vector<std::string> notes;

  bool passed() const noexcept { return status == "pass"; }
  bool failed() const noexcept { return status == "fail"; }
  void set_pass(bool ok) { status = ok ? "pass" : "fail"; }
  json to_json() const;
};

/// Suite-level document: {"suite", "seed", "checks": [...], "summary": {...}}.
json suite_to_json(const std::string& suite, std::uint64_t seed, const std::vector<CheckReport>& checks);

bool any_failed(const std::vector<CheckReport>& checks);

}  // namespace nlfilt
