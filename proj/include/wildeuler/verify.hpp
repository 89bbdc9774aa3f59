#pragma once

// Invariant suites run by the `verify` command.

#include <string>
#include <vector>

#include <json.hpp>

#include "wildeuler/io.hpp"

namespace wildeuler {

struct SuiteResult {
  std::string name;
  bool pass = false;
  nlohmann::json measured;
};

std::vector<SuiteResult> run_verify_suites(const RunConfig& cfg);

}  // namespace wildeuler
