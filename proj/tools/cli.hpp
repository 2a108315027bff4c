#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ibplab::cli {

enum ExitCode { kOk = 0, kParadox = 1, kInputError = 2, kNotConverged = 3, kInternalError = 4 };

/// Runs one command line (without the program name). Documents go to `out`
/// unless --out names a file; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ibplab::cli
