#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

namespace mcmix::cli {

/// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kRuntimeFailure = 1;
inline constexpr int kUsageError = 2;
inline constexpr int kPartialFailure = 3;

/// Parses `args` (args[0] is the program name) and runs the subcommand.
/// The run summary goes to `out` as JSON; on failure the summary carries
/// "status": "failed" and an "error" or "failures" field.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Converts CSV text with a header row into a JSON array of row objects;
/// numeric fields become numbers.
nlohmann::json csv_to_json(const std::string& csv);

}  // namespace mcmix::cli
