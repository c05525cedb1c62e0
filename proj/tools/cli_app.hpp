#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace procwatt::cli {

/// Runs the command line `args` (program name excluded). Reports go to
/// `out` unless --out is given; diagnostics go to `err`. Returns the exit
/// code: 0 ok, 1 internal, 2 input format, 3 insufficient data,
/// 4 profile-kind mismatch, 5 size limit.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace procwatt::cli
