#pragma once

#include <iosfwd>

namespace delaysl::cli {

/// Exit codes: 0 success or verdict true, 2 verdict false, 1 error or usage.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace delaysl::cli
