#pragma once

#include <iosfwd>
#include <string_view>
#include <vector>

#include "oligo/types.hpp"

namespace oligo::cli {

/// "x" or the inclusive range "start:stop:step". Values are rounded to 1e-12
/// so that 0.1:0.9:0.1 yields exactly the decimal grid a reader expects.
std::vector<double> parse_range(std::string_view text);

/// "x" for the incumbent-symmetric triple (x, x, 1 - 2x), or "a,b,c".
Triple parse_triple(std::string_view text);

/// The oligosim command line. Returns 0 on success, 2 on usage, domain,
/// input-parse or existing-output errors, 1 on runtime failures.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace oligo::cli
