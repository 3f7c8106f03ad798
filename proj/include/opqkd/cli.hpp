#pragma once

#include <iosfwd>
#include <string>

#include "opqkd/stateset.hpp"

namespace opqkd::cli {

// Process exit statuses.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidationFailed = 1;
inline constexpr int kExitUnsupported = 2;
inline constexpr int kExitRuntime = 3;

/// Eight comma-separated coefficients a..h, each "re" or "re:im".
SetParameters parse_params(const std::string& text);

/// Entry point shared by the executable and the tests.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace opqkd::cli
