#pragma once

#include <iosfwd>

namespace anigreen {

/// Exit status: 0 success, 1 validation failure (bad input, usage), 2
/// numerical failure. Errors go to `err` as "ERROR <code>: message".
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run_cli(int argc, const char* const* argv);

}  // namespace anigreen
