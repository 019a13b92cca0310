#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace maskopt {

// Exit statuses of the command-line front end.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

// Runs one command line. `args` excludes the program name. Results go to
// `out`, usage text and errors to `err`; log lines go to stderr.
int cli_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace maskopt
