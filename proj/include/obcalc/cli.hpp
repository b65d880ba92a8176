#pragma once

#include "obcalc/report.hpp"

namespace obcalc {

struct CommandResult {
    Report report;
    std::optional<Document> output;  // transforming commands only
    bool machine = false;
    std::string out_path;  // --out target; empty means stdout
    int exit_code = 0;     // 0 ok, 1 domain failure, 2 usage, 3 internal
};

// Parses argv (without the program name) and runs the command.  Never
// throws; every failure is encoded in the result.
CommandResult run_command(const std::vector<std::string>& args);

// Full pipeline: run, print document to stdout or --out, report to stderr.
int cli_main(int argc, char** argv);

}  // namespace obcalc
