#pragma once

#include <iosfwd>

namespace pllranges {

// Entry point of the command-line tool. Exit status: 0 success, 1 refusal or
// failed check, 2 configuration or usage error.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace pllranges
