#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "tqm/config.hpp"

namespace tqm::runner {

struct RunOutcome {
  bool checks_passed = false;
  std::string summary;
  std::vector<std::filesystem::path> artifacts;
};

// Runs a parsed scenario end to end and writes its artifacts into out_dir:
// transactions.csv plus summary.txt always, correlation.csv for epr and chsh,
// field.csv for handshake-field. The summary embeds every statistical check;
// checks_passed is their conjunction.
RunOutcome execute_run(const config::ScenarioConfig& config,
                       const std::filesystem::path& out_dir, unsigned threads);

// Writes only the handshake field samples and returns the file path.
std::filesystem::path execute_field_dump(const config::ScenarioConfig& config,
                                         const std::filesystem::path& out_dir);

}  // namespace tqm::runner
