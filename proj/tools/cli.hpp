// cli.hpp - subcommand dispatcher behind the nhsw executable

#pragma once

#include <iosfwd>

namespace nhsw::cli {

// Exit codes: 0 success, 1 invalid input, 2 numerical failure, 64 unknown subcommand.
int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace nhsw::cli
