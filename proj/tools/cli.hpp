#pragma once

#include <iosfwd>

namespace rtlab::cli {

enum ExitCode : int { Ok = 0, CheckFailed = 1, ConfigFailure = 2, NumericalError = 3 };

/// Entry point behind the `rtlab` binary: verbs simulate, steady, verify <which>, report.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv);

} // namespace rtlab::cli
