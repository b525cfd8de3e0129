#pragma once

#include <string>
#include <vector>

#include "config.hpp"
#include "nlfilt/report.hpp"

namespace nlfilt::cli {

const std::vector<std::string>& suite_names();

/// Runs one verification suite ("all" runs every suite in order).
/// Throws std::invalid_argument for unknown names.
std::vector<CheckReport> run_suite(const std::string& name, const Config& cfg);

}  // namespace nlfilt::cli
