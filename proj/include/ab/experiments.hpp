#pragma once

#include <string>

#include "ab/config.hpp"

namespace ab {

inline constexpr const char* kBuildId = "alphabridge-0.1.0";

// Runs every seed of the configured experiment, writing
//   <root>/<experiment>/<seed>/metrics.csv, summary.json, checkpoints/...
// plus an aggregate <root>/<experiment>/summary.json.
// Returns 0 on success, 2 when any run aborted on a non-finite loss.
int run_experiment(const RunConfig& rc, const std::string& out_root_override = "");

}  // namespace ab
