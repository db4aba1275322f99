#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace elliptope::harness {

/// Entry point for the command-line tool. Returns the process exit code:
/// 0 success, 1 usage error, 2 numerical limit / undecided, 3 infeasible
/// where feasibility was required.
int cli_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace elliptope::harness
