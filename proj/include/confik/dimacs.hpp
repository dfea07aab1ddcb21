#pragma once

#include "confik/logic.hpp"

#include <string>
#include <string_view>

namespace confik {

/// DIMACS CNF with a name map in comments: `c var <id> <name>` for user
/// variables and `c aux <id> <name>` for encoding auxiliaries. Ids are the
/// 1-based DIMACS variable numbers.
std::string write_dimacs(const ClauseSet &cs);

/// Reads plain DIMACS. Variables without a `c var`/`c aux` comment are named
/// by their decimal id. Throws Error(SyntaxError) with a line number.
ClauseSet read_dimacs(std::string_view text);

} // namespace confik
