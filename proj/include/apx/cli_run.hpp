#pragma once

#include <optional>
#include <string>

namespace apx {

/// One batch invocation: a subcommand with its file arguments and numeric
/// options. Outputs are deterministic for a fixed configuration.
struct RunConfig {
    std::string command;  // spectrum | kernel | extend | sap-verify | pipeline | tensor
    std::string input;
    std::string out;
    std::string config;      // optional auxiliary config path
    std::string singular;    // pipeline: singular-set file (validated)
    std::string fields_dir;  // optional CSV dump directory
    double epsilon = 0.1;
    unsigned seed = 0;
};

/// Exit status: 0 success, 1 input error, 2 verification failure.
int run(const RunConfig& config);

} // namespace apx
