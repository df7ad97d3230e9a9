#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace credaug::cli {

enum ExitCode : int { kOk = 0, kScenarioFailures = 1, kConfigOrDataError = 2 };

/// Entry point behind the credaug executable. `args` excludes the program
/// name. Subcommands: prepare, augment, train, evaluate, run, sweep, quality.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

}  // namespace credaug::cli
