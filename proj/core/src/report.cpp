#include "nlfilt/report.hpp"

#include <cstdint>

namespace nlfilt {

json CheckReport::to_json() const {
  json j;
  j["name"] = name;
  j["inputs"] = inputs;
  j["measured"] = measured;
  j["predicted"] = predicted;
  j["tolerances"] = tolerances;
  j["status"] = status;
  if (!notes.empty()) j["notes"] = notes;
  return j;
}

json suite_to_json(const std::string& suite, std::uint64_t seed, const std::vector<CheckReport>& checks) {
  json j;
  j["suite"] = suite;
  j["seed"] = seed;
  j["checks"] = json::array();
  int pass = 0, fail = 0, inconclusive = 0, skipped = 0;
  for (const auto& c : checks) {
    j["checks"].push_back(c.to_json());
    if (c.status == "pass") {
      ++pass;
    } else if (c.status == "fail") {
      ++fail;
    } else if (c.status.rfind("skipped", 0) == 0) {
      ++skipped;
    } else {
      ++inconclusive;
    }
  }
  j["summary"] = {{"pass", pass}, {"fail", fail}, {"inconclusive", inconclusive}, {"skipped", skipped}};
  return j;
}

bool any_failed(const std::vector<CheckReport>& checks) {
  for (const auto& c : checks) {
    if (c.failed()) return true;
  }
  return false;
}

}  // namespace nlfilt
