#pragma once

#include <iosfwd>

namespace irs {

/// Entry point of irsctl. Returns the process exit status: 0 on success,
/// 1 for usage errors, 2 for malformed files, 3 for contract violations.
int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace irs
