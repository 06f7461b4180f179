#pragma once

#include "report.hpp"

#include <map>
#include <string>
#include <vector>

namespace epv {

// Flags accepted by each subcommand; anything else is rejected at parse time.
const std::map<std::string, std::vector<std::string>>& capability_table();

// Fill in the command-specific defaults and validate the result.
RunConfig resolve(RunConfig cfg);

Json config_json(const RunConfig& cfg);

Report run(const RunConfig& cfg);

// CSV rendering of the character tables, for `chars --format csv`.
std::string chars_csv(const RunConfig& cfg);

}  // namespace epv
