#pragma once

#include <iosfwd>

namespace gpme::cli {

/// Exit codes: 0 success, 1 domain refusal or failed check, 2 usage / input error.
/// Errors are reported on `err` as one JSON object {code, reason, context}.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace gpme::cli
