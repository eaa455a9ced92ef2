#pragma once

#include <iosfwd>

namespace adcraft::cli {

// Entry point of the `adcraft` binary. Returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace adcraft::cli
