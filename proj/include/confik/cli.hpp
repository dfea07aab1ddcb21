#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace confik {

/// Entry point of the `confik` tool. `args` excludes the program name.
/// Returns the process exit code: 0 on success, 1 on a usage error, 2 when
/// an input is malformed or inconsistent.
int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

} // namespace confik
